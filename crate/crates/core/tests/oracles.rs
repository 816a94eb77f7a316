use belab_core::dist::{empirical_deviation_at, enumerate_terminal_law};
use belab_core::rates::tightness_constant;
use belab_core::*;
use proptest::prelude::*;

#[test]
fn enumeration_agrees_with_binomial_up_to_20() {
    for n in 1..=20usize {
        let model = MdsModel::scaled_rademacher(n).unwrap();
        let e = enumerate_model_distance(&model).unwrap();
        let b = exact_rademacher_distance(n as u64).unwrap();
        assert!((e.d - b.d).abs() <= 1e-12, "n={n}: {} vs {}", e.d, b.d);
        assert_eq!(e.method, DistanceMethod::ExactEnumeration);
        assert_eq!(b.method, DistanceMethod::ExactBinomial);
    }
}

#[test]
fn enumerated_laws_are_probability_measures() {
    let models = [
        MdsModel::pair_compensated(10, 0.5).unwrap(),
        MdsModel::tilted(11, 0.35).unwrap(),
        MdsModel::skewed_violation(9, 0.6).unwrap(),
    ];
    for m in &models {
        let atoms = enumerate_terminal_law(m).unwrap();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mean: f64 = atoms.iter().map(|a| a.0 * a.1).sum();
        assert!((total - 1.0).abs() < 1e-12, "{:?}", m.kind());
        assert!(mean.abs() < 1e-12, "{:?}", m.kind());
        assert!(atoms.windows(2).all(|w| w[0].0 < w[1].0));
    }
}

#[test]
fn pair_compensated_has_unit_variance_law() {
    // E[X_n^2] = E <X>_n = 1 for every eta
    for eta in [0.0, 0.2, 0.5] {
        let atoms = enumerate_terminal_law(&MdsModel::pair_compensated(12, eta).unwrap()).unwrap();
        let second: f64 = atoms.iter().map(|a| a.0 * a.0 * a.1).sum();
        assert!((second - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sup_is_attained_at_reported_point() {
    let model = MdsModel::pair_compensated(32, 0.3).unwrap();
    let mut xs: Vec<f64> = (0..5000).map(|i| model.path_summary(11, i).x_n).collect();
    let r = kolmogorov_distance(&xs).unwrap();
    xs.sort_by(f64::total_cmp);
    assert_eq!(empirical_deviation_at(&xs, r.argsup), r.d);
    assert!(xs.iter().all(|&x| empirical_deviation_at(&xs, x) <= r.d));
}

#[test]
fn rademacher_scaled_distance_settles() {
    // sqrt(n) D_n -> 1/sqrt(2 pi) for the even lattice
    let target = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let d = exact_rademacher_distance(1 << 20).unwrap().d;
    let scaled = d * (1u64 << 10) as f64;
    assert!((scaled - target).abs() < 1e-3, "{scaled}");
}

#[test]
fn tightness_of_exact_series() {
    let ns: Vec<u64> = (8..=16).step_by(2).map(|e| 1u64 << e).collect();
    let d: Vec<f64> = ns
        .iter()
        .map(|&n| exact_rademacher_distance(n).unwrap().d)
        .collect();
    let eps: Vec<f64> = ns
        .iter()
        .map(|&n| condition_report(&MdsModel::scaled_rademacher(n as usize).unwrap()).epsilon_n)
        .collect();
    let delta = vec![0.0; ns.len()];
    let c = tightness_constant(&d, &eps, &delta).unwrap();
    let curve = bound_curve(&eps, &delta, c).unwrap();
    assert!(d.iter().zip(&curve).all(|(d, b)| d <= b));
    assert!(d.iter().zip(&curve).any(|(d, b)| d == b));
}

#[test]
fn farima_weight_orders() {
    let grid: Vec<usize> = (10..=14).map(|e| 1usize << e).collect();
    let mut bn2 = Vec::new();
    let mut bsup = Vec::new();
    let mut eps = Vec::new();
    for &n in &grid {
        let c = farima_coefficients(0.25, 5 * n).unwrap();
        let w = partial_sum_weights(&c, n, 4 * n, 1.0).unwrap();
        bn2.push((n as f64, w.bn2()));
        bsup.push((n as f64, w.b_sup()));
        eps.push((n as f64, w.eps_n()));
    }
    assert!((fit_loglog(&bn2).unwrap().slope - 1.5).abs() < 0.01);
    assert!((fit_loglog(&bsup).unwrap().slope - 0.25).abs() < 0.01);
    assert!((fit_loglog(&eps).unwrap().slope + 0.5).abs() < 0.01);
}

#[test]
fn short_memory_weights_grow_linearly() {
    let c = CoefficientSeq::finite(vec![1.0, 0.5, 0.25, 0.125]).unwrap();
    assert_eq!(classify_memory(&c), MemoryClass::Short);
    let pts: Vec<(f64, f64)> = [256usize, 1024, 4096]
        .iter()
        .map(|&n| (n as f64, partial_sum_weights(&c, n, n, 1.0).unwrap().bn2()))
        .collect();
    assert!((fit_loglog(&pts).unwrap().slope - 1.0).abs() < 0.01);
    // interior weights equal the coefficient sum
    let w = partial_sum_weights(&c, 64, 64, 1.0).unwrap();
    assert_eq!(w.weight(10), 1.875);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn enlargement_completes_to_one(
        steps in prop::collection::vec(0.0f64..0.4, 0..40),
        eps in 1e-3f64..=0.5,
    ) {
        let mut acc = 0.0;
        let bracket: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
        let e = enlarge_to_unit_variance(&bracket, eps).unwrap();
        prop_assert!((e.bracket_big_n - 1.0).abs() <= 1e-12);
        prop_assert!(e.r as f64 <= (1.0 / (eps * eps)).floor());
        prop_assert!(e.residual_step < eps);
        prop_assert_eq!(e.big_n, bracket.len() as u64 + e.r + 1);
        prop_assert!(e.tau == bracket.len() || bracket[e.tau] > 1.0);
        prop_assert!(e.tau == 0 || bracket[e.tau - 1] <= 1.0);
        prop_assert!(e.pads_satisfy_conditions(eps, 1.0));
    }

    #[test]
    fn kolmogorov_distance_is_order_free(mut xs in prop::collection::vec(-5.0f64..5.0, 1..200)) {
        let a = kolmogorov_distance(&xs).unwrap();
        xs.reverse();
        let b = kolmogorov_distance(&xs).unwrap();
        prop_assert_eq!(a.d, b.d);
        prop_assert!(a.d > 0.0 && a.d <= 1.0);
    }

    #[test]
    fn paths_are_pure_functions(seed in any::<u64>(), idx in any::<u64>(), n in 1usize..64) {
        let m = MdsModel::tilted(n, 0.25).unwrap();
        let p = sample_path(&m, seed, idx);
        prop_assert_eq!(&p, &sample_path(&m, seed, idx));
        let s = m.path_summary(seed, idx);
        prop_assert!((s.x_n - p.x_n).abs() < 1e-12);
        prop_assert!((s.bracket_n - p.bracket_n()).abs() < 1e-12);
    }
}
