//! Counter-based deterministic PRNG used everywhere randomness is needed.
//!
//! Every random decision in this crate (train/test shuffles, bootstrap
//! draws, weight init, perturbation sampling, instance picks) flows through
//! [`CounterRng`] so that a `(seed, counter)` pair fully determines the
//! stream. The generator is SplitMix64 applied to `seed + counter`:
//!
//! ```text
//! out_i = mix64(seed.wrapping_add(i + 1))
//! mix64(z): z += 0x9E3779B97F4A7C15
//!           z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!           z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!           z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits; normals use the Box-Muller
//! transform; shuffles are Fisher-Yates with `range_usize` rejection
//! sampling. The book's "Reproducibility" chapter documents the same
//! construction so other implementations can match splits bit for bit.

/// SplitMix64-based counter generator. Cheap to fork: `stream(i)` derives an
/// independent stream for e.g. tree `i` of a forest.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
    /// Cached second Box-Muller output.
    spare_normal: Option<f64>,
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            seed,
            counter: 0,
            spare_normal: None,
        }
    }

    /// Derive a disjoint stream for sub-task `index` (tree index, grid cell,
    /// iteration number). Mixing before re-seeding keeps streams for
    /// adjacent indices uncorrelated.
    pub fn stream(&self, index: u64) -> Self {
        CounterRng::new(mix64(self.seed ^ mix64(index.wrapping_add(0xA5A5_A5A5))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.seed.wrapping_add(self.counter))
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) by rejection, bias-free.
    pub fn range_usize(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "range_usize bound must be positive");
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }

    /// Standard normal via Box-Muller on two uniform draws.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0,1] so the log is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.range_usize(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = CounterRng::new(7);
        let mut b = CounterRng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = CounterRng::new(1);
        let mut b = CounterRng::new(2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut rng = CounterRng::new(99);
        for _ in 0..1000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn range_respects_bound() {
        let mut rng = CounterRng::new(3);
        for _ in 0..1000 {
            assert!(rng.range_usize(7) < 7);
        }
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut rng = CounterRng::new(42);
        let mut v: Vec<usize> = (0..20).collect();
        rng.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn normals_have_plausible_moments() {
        let mut rng = CounterRng::new(5);
        let n = 20_000;
        let samples: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn streams_are_independent_of_draw_order() {
        let base = CounterRng::new(11);
        let mut s3 = base.stream(3);
        let first = s3.next_u64();
        let mut again = CounterRng::new(11).stream(3);
        assert_eq!(first, again.next_u64());
    }
}
