use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::learner::LearnerState;
use super::rng::derive_seed;
use super::template::GrammarTemplate;
use crate::constructicon::{build_constructicon, ExtractionConfig};
use crate::error::{Error, Result};
use crate::population::SpeakerRecord;
use crate::treebank::Corpus;

/// How one simulated speaker is exposed and asked to speak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeakerPlan {
    pub speaker_id: String,
    pub batch_size: usize,
    pub output_size: usize,
    /// Novelty at each checkpoint; its length is the number of checkpoints.
    pub novelty_schedule: Vec<f64>,
    pub input_seed: u64,
    pub output_seed: u64,
}

impl SpeakerPlan {
    pub fn validate(&self) -> Result<()> {
        if self.speaker_id.is_empty() {
            return Err(Error::InvalidConfig("empty speaker_id".into()));
        }
        if self.batch_size == 0 || self.output_size == 0 {
            return Err(Error::InvalidConfig(
                "batch_size and output_size must be ≥ 1".into(),
            ));
        }
        if self.novelty_schedule.is_empty() {
            return Err(Error::InvalidConfig("novelty_schedule is empty".into()));
        }
        if let Some(x) = self
            .novelty_schedule
            .iter()
            .find(|x| !(0.0..=1.0).contains(*x))
        {
            return Err(Error::InvalidConfig(format!("novelty {x} outside [0, 1]")));
        }
        Ok(())
    }
}

/// A speaker's record together with the corpora behind it.
#[derive(Debug, Clone)]
pub struct SpeakerRun {
    pub record: SpeakerRecord,
    /// All input batches, concatenated.
    pub input: Corpus,
    pub outputs: Vec<Corpus>,
}

/// Runs the plan: at checkpoint `b` the learner reads batch `b`, then
/// speaks `output_size` sentences at novelty `novelty_schedule[b]`.
pub fn simulate_speaker(
    template: &GrammarTemplate,
    plan: &SpeakerPlan,
    cfg: &ExtractionConfig,
) -> Result<SpeakerRun> {
    plan.validate()?;
    cfg.validate()?;
    let id = &plan.speaker_id;
    let mut state = LearnerState::new(plan.output_seed);
    let mut input = Corpus::empty(format!("{id}/input"));
    let mut outputs = Vec::with_capacity(plan.novelty_schedule.len());
    let mut lambdas = Vec::with_capacity(plan.novelty_schedule.len());
    for (b, &novelty) in plan.novelty_schedule.iter().enumerate() {
        let batch = template.sample(
            plan.batch_size,
            derive_seed(plan.input_seed, b as u64),
            &format!("{id}-b{}-", b + 1),
            &format!("{id}/batch={}", b + 1),
        )?;
        state = state.train_step(&batch, cfg)?.with_novelty(novelty)?;
        let out =
            state.generate_output(plan.output_size, derive_seed(plan.output_seed, b as u64))?;
        let lambda =
            build_constructicon(&out, cfg)?.with_provenance(format!("{id}/output"), (b + 1) as u32);
        lambdas.push(lambda);
        outputs.push(out);
        for t in batch.into_trees() {
            input.push(t)?;
        }
    }
    let input_lambda = build_constructicon(&input, cfg)?.with_provenance(format!("{id}/input"), 0);
    Ok(SpeakerRun {
        record: SpeakerRecord::new(id.clone(), input_lambda, lambdas)?,
        input,
        outputs,
    })
}

pub fn run_speaker(
    template: &GrammarTemplate,
    plan: &SpeakerPlan,
    cfg: &ExtractionConfig,
) -> Result<SpeakerRecord> {
    simulate_speaker(template, plan, cfg).map(|r| r.record)
}
