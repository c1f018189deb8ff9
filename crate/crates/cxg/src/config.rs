//! Run configuration: a TOML file overlaid by command-line flags.

use std::path::Path;

use cxg_core::shift::{GroupOn, ShiftSign};
use cxg_core::sim::{derive_seed, SpeakerPlan};
use cxg_core::ExtractionConfig;
use serde::{Deserialize, Serialize};

use crate::conllu::ParseOptions;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    /// Abort on invalid treebank sentences instead of skipping them.
    pub strict: bool,
    pub truncate_subtypes: bool,
    pub extraction: ExtractionConfig,
    pub shift: ShiftConfig,
    pub population: PopulationConfig,
    pub simulation: SimulationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftConfig {
    pub sign: ShiftSign,
    pub group_on: GroupOn,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopulationConfig {
    /// Restrict the analysis to patterns every speaker met in its input.
    pub exposure_filter: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub speakers: usize,
    pub batch_size: usize,
    pub output_size: usize,
    /// One novelty value per checkpoint.
    pub novelty_schedule: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            threads: 0,
            strict: false,
            truncate_subtypes: true,
            extraction: ExtractionConfig::default(),
            shift: ShiftConfig::default(),
            population: PopulationConfig::default(),
            simulation: SimulationConfig::default(),
        }
    }
}

impl Default for ShiftConfig {
    fn default() -> Self {
        ShiftConfig {
            sign: ShiftSign::Distance,
            group_on: GroupOn::KappaJ,
            bins: 3,
        }
    }
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            exposure_filter: true,
        }
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            speakers: 3,
            batch_size: 300,
            output_size: 300,
            novelty_schedule: vec![0.0, 0.3, 0.6],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::format(path, e))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.extraction.validate()?;
        if self.shift.bins < 2 {
            return Err(CliError::Config("shift.bins must be ≥ 2".into()));
        }
        let s = &self.simulation;
        if s.speakers == 0 || s.batch_size == 0 || s.output_size == 0 {
            return Err(CliError::Config("simulation sizes must be ≥ 1".into()));
        }
        if s.novelty_schedule.is_empty()
            || s.novelty_schedule.iter().any(|x| !(0.0..=1.0).contains(x))
        {
            return Err(CliError::Config(
                "simulation.novelty_schedule needs values in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            strict: self.strict,
            truncate_subtypes: self.truncate_subtypes,
        }
    }

    /// Speaker `k` (0-based) is named `speaker{k+1}`; its input and output
    /// seeds are sub-seeds `2k` and `2k+1` of the run seed.
    pub fn speaker_plans(&self) -> Vec<SpeakerPlan> {
        let s = &self.simulation;
        (0..s.speakers)
            .map(|k| SpeakerPlan {
                speaker_id: format!("speaker{}", k + 1),
                batch_size: s.batch_size,
                output_size: s.output_size,
                novelty_schedule: s.novelty_schedule.clone(),
                input_seed: derive_seed(self.seed, 2 * k as u64),
                output_seed: derive_seed(self.seed, 2 * k as u64 + 1),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cxg_core::MaxLen;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        assert!(text.contains("max_len = 3"));
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_files_fill_in_defaults() {
        let cfg: RunConfig = toml::from_str(
            "seed = 9\n[extraction]\nmax_len = \"unbounded\"\nweighting = \"ppmi\"\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.extraction.max_len, MaxLen::Unbounded);
        assert_eq!(cfg.extraction.min_freq, 2);
        assert!(toml::from_str::<RunConfig>("sed = 9").is_err());
    }

    #[test]
    fn plans_are_distinct_per_speaker() {
        let plans = RunConfig::default().speaker_plans();
        assert_eq!(plans.len(), 3);
        assert_ne!(plans[0].input_seed, plans[1].input_seed);
        assert_ne!(plans[0].input_seed, plans[0].output_seed);
    }
}
