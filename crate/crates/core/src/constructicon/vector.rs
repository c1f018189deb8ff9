use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Sparse non-negative vector over context-vocabulary indices.
///
/// Entries are sorted by index and never hold zero weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeaningVector {
    weights: Vec<(u32, f64)>,
}

impl MeaningVector {
    /// Builds a vector from `(index, weight)` pairs, summing repeated
    /// indices and dropping zeros. Weights must be finite and non-negative.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut weights: Vec<(u32, f64)> = pairs.into_iter().collect();
        assert!(
            weights.iter().all(|&(_, w)| w.is_finite() && w >= 0.0),
            "meaning vector weights must be finite and non-negative"
        );
        weights.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(weights.len());
        for (i, w) in weights {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        MeaningVector { weights: merged }
    }

    pub fn weights(&self) -> &[(u32, f64)] {
        &self.weights
    }

    pub fn get(&self, index: u32) -> f64 {
        self.weights
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.weights[k].1)
            .unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.weights.len()
    }

    pub fn dot(&self, other: &MeaningVector) -> f64 {
        let (a, b) = (&self.weights, &other.weights);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.weights.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn scaled(&self, factor: f64) -> MeaningVector {
        MeaningVector::from_pairs(self.weights.iter().map(|&(i, w)| (i, w * factor)))
    }
}

/// Cosine similarity clamped to `[0, 1]`; `None` if either vector is zero.
pub fn cosine_similarity(a: &MeaningVector, b: &MeaningVector) -> Option<f64> {
    if a.is_zero() || b.is_zero() {
        return None;
    }
    if a == b {
        return Some(1.0);
    }
    let denom = libm::sqrt(a.norm_sq() * b.norm_sq());
    Some((a.dot(b) / denom).clamp(0.0, 1.0))
}

/// `1 - cos(a, b)`, in `[0, 1]` for non-negative vectors.
pub fn cosine_distance(a: &MeaningVector, b: &MeaningVector) -> Option<f64> {
    cosine_similarity(a, b).map(|c| 1.0 - c)
}
