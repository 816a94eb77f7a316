use belab::Sampler;
use belab_core::linproc::Innovations;
use belab_core::*;

#[test]
fn farima_normalized_sum_has_unit_variance() {
    let n = 256;
    let coeffs = farima_coefficients(0.25, 5 * n).unwrap();
    let w = partial_sum_weights(&coeffs, n, 4 * n, 1.0).unwrap();
    let s = Sampler::new(4).unwrap();
    let xs = s
        .linproc_values(&w, &Innovations::Rademacher, 2024, 100_000)
        .unwrap();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    assert!((var - 1.0).abs() <= 0.03, "{var}");
    assert!(mean.abs() < 0.02);
}

#[test]
fn martingale_innovations_keep_unit_variance() {
    let n = 64;
    let coeffs = farima_coefficients(0.3, 5 * n).unwrap();
    let w = partial_sum_weights(&coeffs, n, 4 * n, 1.0).unwrap();
    let model = MdsModel::pair_compensated(n + 4 * n + 1 + 1, 0.4).unwrap();
    // horizon must be n + m + 1
    assert!(Sampler::new(1)
        .unwrap()
        .linproc_values(&w, &Innovations::Martingale(model), 0, 10)
        .is_err());
    let model = MdsModel::tilted(n + 4 * n + 1, 0.0).unwrap();
    let xs = Sampler::new(2)
        .unwrap()
        .linproc_values(&w, &Innovations::Martingale(model), 5, 50_000)
        .unwrap();
    let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    assert!((var - 1.0).abs() < 0.03, "{var}");
}

#[test]
fn enlarged_untilted_model_stays_within_band() {
    let model = MdsModel::tilted(64, 0.0).unwrap();
    let eps = condition_report(&model).epsilon_n;
    let exact = exact_rademacher_distance(64).unwrap().d;
    let s = Sampler::new(4).unwrap();
    let mc = s.enlarged_distance(&model, eps, 31, 100_000).unwrap();
    assert!(
        (mc.d - exact).abs() <= mc.dkw_band.unwrap(),
        "{} vs {exact}",
        mc.d
    );
}

#[test]
fn enlargement_of_tilted_model_reaches_unit_variance() {
    let model = MdsModel::tilted(32, 0.4).unwrap();
    let eps = condition_report(&model).epsilon_n;
    for i in 0..500 {
        let p = sample_path(&model, 8, i);
        let e = enlarge_path(&p, eps, 8, i).unwrap();
        let pad_var: f64 = e.xi[e.summary.tau..].iter().map(|x| x * x).sum();
        assert!((e.summary.bracket_tau() + pad_var - 1.0).abs() <= 1e-12);
        assert!(e.summary.pads_satisfy_conditions(eps, model.rho()));
    }
}

#[test]
fn sampled_distance_matches_enumeration() {
    let s = Sampler::new(4).unwrap();
    for m in [
        MdsModel::pair_compensated(16, 0.3).unwrap(),
        MdsModel::tilted(15, 0.4).unwrap(),
        MdsModel::skewed_violation(14, 0.5).unwrap(),
    ] {
        let exact = enumerate_model_distance(&m).unwrap().d;
        let mc = s.model_distance(&m, 3, 200_000).unwrap();
        assert!(
            (mc.d - exact).abs() <= mc.dkw_band.unwrap(),
            "{:?}: {} vs {exact}",
            m.kind(),
            mc.d
        );
    }
}
