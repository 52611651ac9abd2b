//! Counter-based splittable random number generator.
//!
//! Each sample index owns a deterministic substream derived from (seed,
//! index) by a SplitMix64 mix, so estimates are reproducible no matter how
//! the sample range is partitioned across threads.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SubRng {
    state: u64,
}

impl SubRng {
    pub fn new(seed: u64) -> Self {
        SubRng {
            state: mix64(seed ^ GOLDEN_GAMMA),
        }
    }

    /// The substream owned by `index` under `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let s = mix64(seed).wrapping_add(index.wrapping_mul(GOLDEN_GAMMA));
        SubRng { state: mix64(s) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe to feed into a logarithm.
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    /// Exponential holding time with the given rate, by inverse CDF.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.next_f64_open().ln() / rate
    }

    /// Uniform integer in 0..n.
    pub fn below(&mut self, n: u64) -> u64 {
        // rejection-free modulo is fine at our scales
        self.next_u64() % n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_deterministic_and_distinct() {
        let mut a = SubRng::substream(7, 0);
        let mut a2 = SubRng::substream(7, 0);
        let mut b = SubRng::substream(7, 1);
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let xs2: Vec<u64> = (0..4).map(|_| a2.next_u64()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        assert_eq!(xs, xs2);
        assert_ne!(xs, ys);
    }

    #[test]
    fn uniform_mean_sane() {
        let mut r = SubRng::new(42);
        let n = 10_000;
        let mean: f64 = (0..n).map(|_| r.next_f64()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn exponential_mean_sane() {
        let mut r = SubRng::new(3);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| r.exponential(2.0)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.02);
    }
}
