//! Seeded 64-bit linear congruential generator.
//!
//! The state update is `s <- s * 6364136223846793005 + 1442695040888963407 (mod 2^64)`
//! (Knuth's MMIX constants). The seed is used as the initial state and every
//! draw advances the state once before reading it. Uniform doubles use the top
//! 53 bits of the new state. The sequence is fixed so that fixtures generated
//! from a seed are reproducible by any implementation.

const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
const INCREMENT: u64 = 1_442_695_040_888_963_407;

#[derive(Clone, Debug)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[lo, hi]`. Uses the high bits, which have full period.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + ((self.next_u64() >> 32) % span) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_draws_are_pinned() {
        let mut rng = Lcg64::new(0);
        assert_eq!(rng.next_u64(), INCREMENT);
        assert_eq!(rng.next_u64(), INCREMENT.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT));
    }

    #[test]
    fn unit_interval() {
        let mut rng = Lcg64::new(42);
        for _ in 0..1000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
            let k = rng.range(3, 5);
            assert!((3..=5).contains(&k));
        }
    }
}
