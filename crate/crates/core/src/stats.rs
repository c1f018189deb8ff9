//! Kruskal-Wallis one-way analysis of variance on ranks.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    /// Tie-corrected H statistic.
    pub h: f64,
    pub df: usize,
    /// Upper chi-square tail probability of `h` with `df` degrees of freedom.
    pub p: f64,
}

/// Midranks (1-based) of `values` and the tie term `Σ (t³ − t)`.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

pub fn kruskal_wallis<G: AsRef<[f64]>>(groups: &[G]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::TooFewGroups(groups.len()));
    }
    let mut pooled = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        let g = g.as_ref();
        if g.is_empty() {
            return Err(Error::EmptyGroup(i));
        }
        if let Some(&x) = g.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(x));
        }
        pooled.extend_from_slice(g);
    }
    let n = pooled.len();
    if n < 3 {
        return Err(Error::TooFewObservations(n));
    }
    let (ranks, ties) = midranks(&pooled);
    let nf = n as f64;
    let correction = 1.0 - ties / (nf * nf * nf - nf);
    if correction <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let len = g.as_ref().len();
        let r: f64 = ranks[offset..offset + len].iter().sum();
        sum += r * r / len as f64;
        offset += len;
    }
    let h = ((12.0 / (nf * (nf + 1.0))) * sum - 3.0 * (nf + 1.0)) / correction;
    let h = h.max(0.0);
    let df = groups.len() - 1;
    Ok(KruskalWallis {
        h,
        df,
        p: chi_square_sf(h, df as f64),
    })
}

/// Upper tail `P(X ≥ x)` of the chi-square distribution.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(df / 2.0, x / 2.0)
}

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Regularized upper incomplete gamma `Q(a, x)`.
///
/// Series for `P` when `x < a + 1`, Lentz continued fraction for `Q`
/// otherwise; each branch is used where it converges fast and without
/// cancellation.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "shape must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefactor = -x + a * libm::log(x) - libm::lgamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        1.0 - sum * libm::exp(log_prefactor)
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        libm::exp(log_prefactor) * h
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn hand_computed_statistics() {
        let kw = kruskal_wallis(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!((kw.h - 2.4).abs() < 1e-9);
        assert_eq!(kw.df, 1);
        let kw = kruskal_wallis(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ])
        .unwrap();
        assert!((kw.h - 7.2).abs() < 1e-9);
        assert_eq!(kw.df, 2);
        // exp(-7.2 / 2) for df = 2
        assert!((kw.p - (-3.6f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn midranks_with_ties() {
        let (r, t) = midranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            kruskal_wallis(&[vec![1.0, 1.0], vec![1.0]]),
            Err(Error::ZeroVariance)
        );
        assert_eq!(
            kruskal_wallis(&[vec![1.0, 2.0]]),
            Err(Error::TooFewGroups(1))
        );
        assert_eq!(
            kruskal_wallis(&[vec![1.0], vec![]]),
            Err(Error::EmptyGroup(1))
        );
        assert_eq!(
            kruskal_wallis(&[vec![1.0], vec![2.0]]),
            Err(Error::TooFewObservations(2))
        );
    }

    #[test]
    fn gamma_q_closed_forms() {
        // Q(1, x) = exp(-x)
        for x in [0.1, 1.0, 2.5, 10.0, 40.0] {
            let q = regularized_gamma_q(1.0, x);
            assert!((q / (-x).exp() - 1.0).abs() < 1e-12, "x = {x}");
        }
        assert_eq!(chi_square_sf(0.0, 3.0), 1.0);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
