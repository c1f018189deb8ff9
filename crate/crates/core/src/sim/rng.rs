use alloc::vec::Vec;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

const PHI64: u64 = 0x9E37_79B9_7F4A_7C15;

/// Independent seed for sub-stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    SplitMix64::seed_from_u64(seed ^ stream.wrapping_add(1).wrapping_mul(PHI64)).next_u64()
}

#[derive(Debug, Clone)]
pub struct SimRng(Xoshiro256PlusPlus);

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Cumulative table for sampling indices proportionally to weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedIndex {
    cumulative: Vec<f64>,
}

impl WeightedIndex {
    /// `None` unless every weight is finite and non-negative and the total is positive.
    pub fn new(weights: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut total = 0.0;
        let mut cumulative = Vec::new();
        for w in weights {
            if !w.is_finite() || w < 0.0 {
                return None;
            }
            total += w;
            cumulative.push(total);
        }
        if total > 0.0 && total.is_finite() {
            Some(WeightedIndex { cumulative })
        } else {
            None
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let r = rng.next_f64() * total;
        self.cumulative
            .partition_point(|&c| c <= r)
            .min(self.cumulative.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_streams() {
        let mut a = SimRng::new(7);
        let mut b = SimRng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let x = SimRng::new(7).next_f64();
        assert!((0.0..1.0).contains(&x));
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(1, 5), derive_seed(1, 5));
    }

    #[test]
    fn zero_weights_are_never_drawn() {
        let w = WeightedIndex::new([0.0, 1.0, 0.0]).unwrap();
        let mut rng = SimRng::new(3);
        for _ in 0..1000 {
            assert_eq!(w.sample(&mut rng), 1);
        }
        assert!(WeightedIndex::new([0.0, 0.0]).is_none());
        assert!(WeightedIndex::new([1.0, -1.0]).is_none());
        assert!(WeightedIndex::new(core::iter::empty()).is_none());
    }
}
