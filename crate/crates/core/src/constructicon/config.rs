use alloc::format;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catena::{CatenaOptions, LevelSet, MaxLen, DEFAULT_CATENA_CAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Raw co-occurrence counts.
    #[default]
    Raw,
    /// Positive pointwise mutual information over the co-occurrence table.
    Ppmi,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Raw => "raw",
            Weighting::Ppmi => "ppmi",
        })
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(Weighting::Raw),
            "ppmi" => Ok(Weighting::Ppmi),
            other => Err(Error::InvalidConfig(format!("unknown weighting {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionConfig {
    pub max_len: MaxLen,
    pub min_freq: u64,
    /// Number of context patterns used as vector dimensions.
    pub context_vocab_size: usize,
    pub weighting: Weighting,
    pub exclude_punct: bool,
    /// Levels each node may be rendered at.
    pub levels: LevelSet,
    pub catena_cap: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            max_len: MaxLen::Bounded(3),
            min_freq: 2,
            context_vocab_size: 10_000,
            weighting: Weighting::Raw,
            exclude_punct: true,
            levels: LevelSet::ALL,
            catena_cap: DEFAULT_CATENA_CAP,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_len == MaxLen::Bounded(0) {
            return Err(Error::InvalidConfig("max_len must be ≥ 1".into()));
        }
        if self.min_freq == 0 {
            return Err(Error::InvalidConfig("min_freq must be ≥ 1".into()));
        }
        if self.context_vocab_size == 0 {
            return Err(Error::InvalidConfig(
                "context_vocab_size must be ≥ 1".into(),
            ));
        }
        if self.levels.is_empty() {
            return Err(Error::InvalidConfig("levels must not be empty".into()));
        }
        if self.catena_cap == 0 {
            return Err(Error::InvalidConfig("catena_cap must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn catena_options(&self) -> CatenaOptions {
        CatenaOptions {
            max_len: self.max_len,
            exclude_punct: self.exclude_punct,
            cap: self.catena_cap,
        }
    }
}
