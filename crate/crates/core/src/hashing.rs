//! Deterministic shared-randomness hash functions h_t : \[N\] -> \[D_t\].
//!
//! The mixing recipe is a wire-compatibility contract: both endpoints derive
//! the same hash values from the public seed, so the recipe below is normative
//! and bit-exact. Modulo reduction biases the output by at most D/2^64, which
//! is negligible at every supported scale and left uncorrected.

pub(crate) const GOLDEN_GAMMA: u64 = 0x9E3779B97F4A7C15;
pub(crate) const MIX_MUL_1: u64 = 0xBF58476D1CE4E5B9;
pub(crate) const MIX_MUL_2: u64 = 0x94D049BB133111EB;

/// Keying context for one hash function: a public seed, a level index, and
/// the target domain size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashCtx {
    pub seed: u64,
    pub level: u32,
    pub domain: u64,
}

impl HashCtx {
    /// `domain` must be at least 1.
    pub fn new(seed: u64, level: u32, domain: u64) -> Self {
        assert!(domain >= 1, "hash domain must be at least 1");
        HashCtx {
            seed,
            level,
            domain,
        }
    }
}

/// The finalizer stage of the mixing recipe (the splitmix64 avalanche).
#[inline]
pub(crate) fn mix64(mut v: u64) -> u64 {
    v ^= v >> 30;
    v = v.wrapping_mul(MIX_MUL_1);
    v ^= v >> 27;
    v = v.wrapping_mul(MIX_MUL_2);
    v ^= v >> 31;
    v
}

/// Keyed 64-bit mix of (seed, level, key), before any modulo reduction.
#[inline]
pub(crate) fn keyed_mix(seed: u64, level: u64, key: u64) -> u64 {
    mix64(seed ^ level.wrapping_mul(GOLDEN_GAMMA) ^ key.wrapping_mul(MIX_MUL_1))
}

/// Hash item `i` into [0, domain). Deterministic in (seed, level, domain, i).
#[inline]
pub fn hash(ctx: &HashCtx, item: u64) -> u64 {
    keyed_mix(ctx.seed, ctx.level as u64, item) % ctx.domain
}

/// A deterministic stream of pseudorandom words, used for sampling and for
/// per-trial seed derivation in experiment harnesses. Not part of the wire
/// contract (unlike [`hash`]), but stable across platforms.
#[derive(Debug, Clone)]
pub struct SeedStream {
    state: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, bound) by modulo reduction; bound must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_domain_maps_to_zero() {
        let ctx = HashCtx::new(12345, 7, 1);
        for i in 1..100 {
            assert_eq!(hash(&ctx, i), 0);
        }
    }

    #[test]
    fn pinned_golden_values() {
        // Evaluated once by an independent oracle implementation of the
        // recipe and frozen.
        assert_eq!(keyed_mix(0, 1, 1), 0xF14C4DF09BB9A32E);
        assert_eq!(hash(&HashCtx::new(0, 1, 1024), 1), 814);
        assert_eq!(hash(&HashCtx::new(0, 1, 1 << 32), 1), 2612634414);
        assert_eq!(hash(&HashCtx::new(42, 3, 97), 7), 19);
    }

    #[test]
    fn deterministic() {
        let ctx = HashCtx::new(99, 2, 1000);
        for i in [1u64, 50, 999_999_999] {
            assert_eq!(hash(&ctx, i), hash(&ctx, i));
        }
        let mut a = SeedStream::new(7);
        let mut b = SeedStream::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn uniformity_chi_squared() {
        // D = 2^10 cells, 10^6 keys; statistic must sit below the 99.9%
        // quantile of chi^2 with 1023 degrees of freedom (Wilson-Hilferty).
        let d = 1u64 << 10;
        let n = 1_000_000u64;
        let ctx = HashCtx::new(0xDECAFBAD, 1, d);
        let mut counts = vec![0u64; d as usize];
        for i in 1..=n {
            counts[hash(&ctx, i) as usize] += 1;
        }
        let expected = n as f64 / d as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let diff = c as f64 - expected;
                diff * diff / expected
            })
            .sum();
        let dof = (d - 1) as f64;
        let z = 3.0902; // 99.9% standard normal quantile
        let h = 2.0 / (9.0 * dof);
        let q999 = dof * (1.0 - h + z * h.sqrt()).powi(3);
        assert!(chi2 < q999, "chi2 {chi2:.1} >= 99.9% quantile {q999:.1}");
    }

    #[test]
    fn pairwise_collision_rate() {
        // Random item pairs must collide at rate <= 2/D (slack factor 2
        // absorbs the modulo bias and sampling noise).
        let d = 4096u64;
        let ctx = HashCtx::new(0x5EED, 3, d);
        let mut stream = SeedStream::new(1);
        let trials = 1_000_000u64;
        let mut collisions = 0u64;
        for _ in 0..trials {
            let i = stream.next_below(1 << 40) + 1;
            let j = stream.next_below(1 << 40) + 1;
            if i != j && hash(&ctx, i) == hash(&ctx, j) {
                collisions += 1;
            }
        }
        let rate = collisions as f64 / trials as f64;
        assert!(rate <= 2.0 / d as f64, "collision rate {rate} > 2/D");
    }
}
