//! Distributional shift along abstraction chains across checkpoints.
//!
//! Chains are taken from a reference constructicon (usually the one built over
//! the learner's input). Each chain's cosine distance is measured at every
//! checkpoint; the shift is the change between the first and last one.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catena::Pattern;
use crate::constructicon::Constructicon;
use crate::error::{Error, Result};

/// Tolerance for calling a distance sequence non-decreasing.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

/// Constructicons of one speaker at successive checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSeries {
    speaker_id: String,
    constructicons: Vec<Constructicon>,
}

impl CheckpointSeries {
    pub fn new(speaker_id: impl Into<String>, constructicons: Vec<Constructicon>) -> Result<Self> {
        if constructicons.len() < 2 {
            return Err(Error::TooFewCheckpoints(constructicons.len()));
        }
        let cfg = constructicons[0].config();
        if constructicons.iter().any(|c| c.config() != cfg) {
            return Err(Error::MixedConfigs);
        }
        Ok(CheckpointSeries {
            speaker_id: speaker_id.into(),
            constructicons,
        })
    }

    pub fn speaker_id(&self) -> &str {
        &self.speaker_id
    }

    pub fn constructicons(&self) -> &[Constructicon] {
        &self.constructicons
    }

    pub fn first(&self) -> &Constructicon {
        &self.constructicons[0]
    }

    pub fn last(&self) -> &Constructicon {
        self.constructicons
            .last()
            .expect("at least two checkpoints")
    }

    pub fn len(&self) -> usize {
        self.constructicons.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All attested chain pairs of the reference, sorted.
pub fn chains_in(reference: &Constructicon) -> Vec<(Pattern, Pattern)> {
    let mut chains: Vec<(Pattern, Pattern)> = reference
        .chain_links()
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    chains.sort();
    chains
}

/// Which difference the `shift` field holds. Both differ only by sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftSign {
    /// `d_last − d_first`: positive when the chain members grow apart.
    #[default]
    Distance,
    /// `cos_last − cos_first`: positive when they converge.
    Similarity,
}

impl fmt::Display for ShiftSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftSign::Distance => "distance",
            ShiftSign::Similarity => "similarity",
        })
    }
}

impl FromStr for ShiftSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "distance" => Ok(ShiftSign::Distance),
            "similarity" => Ok(ShiftSign::Similarity),
            other => Err(Error::InvalidConfig(alloc::format!(
                "unknown shift sign {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainShift {
    pub kappa_i: Pattern,
    pub kappa_j: Pattern,
    pub d_first: f64,
    pub d_last: f64,
    pub shift: f64,
}

impl ChainShift {
    pub fn input_cosine(&self) -> f64 {
        1.0 - self.d_first
    }
}

pub fn compute_shifts(
    series: &CheckpointSeries,
    chains: &[(Pattern, Pattern)],
) -> Result<Vec<ChainShift>> {
    compute_shifts_signed(series, chains, ShiftSign::Distance)
}

/// Shift of every chain whose members have nonzero vectors at both ends of
/// the series. Other chains are skipped and logged.
pub fn compute_shifts_signed(
    series: &CheckpointSeries,
    chains: &[(Pattern, Pattern)],
    sign: ShiftSign,
) -> Result<Vec<ChainShift>> {
    let (first, last) = (series.first(), series.last());
    let mut out = Vec::new();
    for (ki, kj) in chains {
        let d = (first.distance(ki, kj), last.distance(ki, kj));
        match d {
            (Ok(d_first), Ok(d_last)) => {
                let shift = match sign {
                    ShiftSign::Distance => d_last - d_first,
                    ShiftSign::Similarity => d_first - d_last,
                };
                out.push(ChainShift {
                    kappa_i: ki.clone(),
                    kappa_j: kj.clone(),
                    d_first,
                    d_last,
                    shift,
                });
            }
            (Err(e), _) | (_, Err(e)) => {
                log::debug!(
                    "skipping chain ({ki}, {kj}) of {}: {e}",
                    series.speaker_id()
                );
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoChains);
    }
    out.sort_by(|a, b| (&a.kappa_i, &a.kappa_j).cmp(&(&b.kappa_i, &b.kappa_j)));
    Ok(out)
}

/// Distance of the chain at every checkpoint, or `None` if it is undefined
/// at any of them.
pub fn distance_trajectory(
    series: &CheckpointSeries,
    chain: &(Pattern, Pattern),
) -> Option<Vec<f64>> {
    series
        .constructicons()
        .iter()
        .map(|c| c.distance(&chain.0, &chain.1).ok())
        .collect()
}

pub fn is_non_decreasing(seq: &[f64]) -> bool {
    seq.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOLERANCE)
}

/// Fraction of sequences that never decrease.
pub fn fraction_non_decreasing<S: AsRef<[f64]>>(seqs: &[S]) -> f64 {
    if seqs.is_empty() {
        return 0.0;
    }
    let n = seqs
        .iter()
        .filter(|s| is_non_decreasing(s.as_ref()))
        .count();
    n as f64 / seqs.len() as f64
}

/// Fraction of chains, among those defined at every checkpoint, whose
/// distance never decreases from one checkpoint to the next.
pub fn monotonicity_report(series: &CheckpointSeries, chains: &[(Pattern, Pattern)]) -> f64 {
    let trajectories: Vec<Vec<f64>> = chains
        .iter()
        .filter_map(|c| distance_trajectory(series, c))
        .collect();
    if trajectories.is_empty() {
        log::warn!(
            "no chain is defined at every checkpoint of {}",
            series.speaker_id()
        );
    }
    fraction_non_decreasing(&trajectories)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupOn {
    KappaI,
    KappaJ,
}

impl GroupOn {
    pub fn name(self) -> &'static str {
        match self {
            GroupOn::KappaI => "kappa_i",
            GroupOn::KappaJ => "kappa_j",
        }
    }
}

impl FromStr for GroupOn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "kappa_i" | "i" => Ok(GroupOn::KappaI),
            "kappa_j" | "j" => Ok(GroupOn::KappaJ),
            other => Err(Error::InvalidConfig(alloc::format!(
                "unknown grouping {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    pub kappa: Pattern,
    pub mean_shift: f64,
    /// Mean of `1 − d_first` over the group.
    pub mean_cosine: f64,
    pub n_chains: usize,
}

/// Groups chains on one member and averages shift and first-checkpoint
/// cosine. Rows are sorted by mean shift, largest first, then by pattern.
pub fn average_shift_by(shifts: &[ChainShift], group_on: GroupOn) -> Result<Vec<ShiftRow>> {
    if shifts.is_empty() {
        return Err(Error::NoShifts);
    }
    let mut groups: BTreeMap<&Pattern, (f64, f64, usize)> = BTreeMap::new();
    for s in shifts {
        let key = match group_on {
            GroupOn::KappaI => &s.kappa_i,
            GroupOn::KappaJ => &s.kappa_j,
        };
        let g = groups.entry(key).or_insert((0.0, 0.0, 0));
        g.0 += s.shift;
        g.1 += s.input_cosine();
        g.2 += 1;
    }
    let mut rows: Vec<ShiftRow> = groups
        .into_iter()
        .map(|(k, (shift, cos, n))| ShiftRow {
            kappa: k.clone(),
            mean_shift: shift / n as f64,
            mean_cosine: cos / n as f64,
            n_chains: n,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.mean_shift
            .total_cmp(&a.mean_shift)
            .then_with(|| a.kappa.cmp(&b.kappa))
    });
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    /// Bins from lowest to highest mean shift.
    pub bins: Vec<Vec<ShiftRow>>,
    /// Largest mean shift of every bin but the last.
    pub boundaries: Vec<f64>,
    /// Set when equal shifts straddle a boundary.
    pub degenerate: bool,
}

impl Binning {
    pub fn label(index: usize, n_bins: usize) -> String {
        match (n_bins, index) {
            (3, 0) => "low".into(),
            (3, 1) => "intermediate".into(),
            (3, 2) => "high".into(),
            _ => alloc::format!("bin{}", index + 1),
        }
    }

    /// Mean input cosines per bin.
    pub fn cosines(&self) -> Vec<Vec<f64>> {
        self.bins
            .iter()
            .map(|b| b.iter().map(|r| r.mean_cosine).collect())
            .collect()
    }
}

/// Splits rows into `n_bins` quantile bins of mean shift.
///
/// Rows are ordered by mean shift with a stable sort and cut into consecutive
/// runs whose sizes differ by at most one (earlier bins take the remainder).
/// Ties are kept in their incoming order, so equal shifts may straddle a
/// boundary; that case is flagged and logged.
pub fn bin_by_shift(rows: &[ShiftRow], n_bins: usize) -> Result<Binning> {
    if n_bins == 0 || rows.len() < n_bins {
        return Err(Error::TooFewRows {
            rows: rows.len(),
            bins: n_bins,
        });
    }
    let mut sorted: Vec<ShiftRow> = rows.to_vec();
    sorted.sort_by(|a, b| a.mean_shift.total_cmp(&b.mean_shift));
    let base = sorted.len() / n_bins;
    let extra = sorted.len() % n_bins;
    let mut bins = Vec::with_capacity(n_bins);
    let mut rest = sorted.into_iter();
    for b in 0..n_bins {
        let size = base + usize::from(b < extra);
        bins.push(rest.by_ref().take(size).collect::<Vec<_>>());
    }
    let boundaries: Vec<f64> = bins[..n_bins - 1]
        .iter()
        .map(|b| b.last().expect("bins are non-empty").mean_shift)
        .collect();
    let degenerate = bins
        .windows(2)
        .any(|w| w[0].last().map(|r| r.mean_shift) == w[1].first().map(|r| r.mean_shift));
    if degenerate {
        log::warn!("tied shifts straddle a bin boundary; rows assigned by stable order");
    }
    Ok(Binning {
        bins,
        boundaries,
        degenerate,
    })
}
