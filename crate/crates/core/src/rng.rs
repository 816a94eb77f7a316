//! Counter-based random streams.
//!
//! A [`PathStream`] is keyed by `(seed, path_index)`; the value at step `k` is
//! a hash of the key and `k`, so streams can be evaluated in any order and on
//! any worker without changing the result.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const UNIFORM_DOMAIN: u64 = 1 << 63;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStream {
    key: u64,
}

impl PathStream {
    pub fn new(seed: u64, path_index: u64) -> Self {
        let s = mix64(seed.wrapping_add(GOLDEN));
        let p = mix64(path_index.wrapping_mul(GOLDEN) ^ 0x632B_E59B_D9B4_E019);
        PathStream {
            key: mix64(s ^ p.rotate_left(17)),
        }
    }

    /// An independent stream derived from this one, e.g. for padding steps.
    pub fn substream(self, tag: u64) -> Self {
        PathStream {
            key: mix64(self.key ^ mix64(tag.wrapping_add(1).wrapping_mul(GOLDEN))),
        }
    }

    /// 64 random bits for block `counter`.
    #[inline]
    pub fn block(&self, counter: u64) -> u64 {
        mix64(self.key ^ mix64(counter.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)))
    }

    /// Rademacher sign at 0-based `step`; `true` means +1.
    #[inline]
    pub fn sign(&self, step: u64) -> bool {
        (self.block(step >> 6) >> (step & 63)) & 1 == 1
    }

    /// Sum of the Rademacher signs over steps `start..start + len`.
    pub fn sign_sum(&self, start: u64, len: u64) -> i64 {
        let end = start + len;
        let mut pos = start;
        let mut plus: u64 = 0;
        while pos < end {
            let blk = pos >> 6;
            let lo = pos & 63;
            let hi = core::cmp::min(64, end - (blk << 6));
            let width = hi - lo;
            let mask = if width == 64 {
                u64::MAX
            } else {
                ((1u64 << width) - 1) << lo
            };
            plus += u64::from((self.block(blk) & mask).count_ones());
            pos += width;
        }
        2 * plus as i64 - len as i64
    }

    /// Uniform draw in [0, 1) at 0-based `step`, independent of the signs.
    #[inline]
    pub fn uniform(&self, step: u64) -> f64 {
        (self.block(UNIFORM_DOMAIN | step) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
