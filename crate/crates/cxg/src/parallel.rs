//! Rayon-backed drivers. Results do not depend on the number of workers:
//! every reduction is a sum of integer counts or a set union.

use cxg_core::constructicon::{
    extract_sentence, CooccurrenceTable, Inventory, PatternTally, Provenance,
};
use cxg_core::sim::{simulate_speaker, GrammarTemplate, SpeakerPlan, SpeakerRun};
use cxg_core::{Constructicon, Corpus, Error, ExtractionConfig};
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// A pool with `threads` workers; 0 means one per available core.
pub fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {threads} worker threads: {e}")))
}

/// Same result as [`cxg_core::build_constructicon`], computed on the current pool.
pub fn build_constructicon(
    stream: &Corpus,
    cfg: &ExtractionConfig,
) -> cxg_core::Result<Constructicon> {
    cfg.validate()?;
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let sentences = stream
        .trees()
        .par_iter()
        .map(|t| extract_sentence(t, cfg))
        .collect::<cxg_core::Result<Vec<_>>>()?;
    let tally = sentences
        .par_iter()
        .fold(PatternTally::new, |mut acc, s| {
            acc.add(s);
            acc
        })
        .reduce(PatternTally::new, PatternTally::merge);
    let inventory = Inventory::new(&tally, cfg)?;
    let table = sentences
        .par_iter()
        .fold(CooccurrenceTable::default, |mut acc, s| {
            inventory.add_cooccurrences(s, &mut acc);
            acc
        })
        .reduce(CooccurrenceTable::default, CooccurrenceTable::merge);
    Ok(inventory.assemble(
        table,
        Provenance {
            stream: stream.source().into(),
            checkpoint: 0,
        },
    ))
}

/// Runs independent speakers side by side, keeping the plans' order.
pub fn simulate_population(
    template: &GrammarTemplate,
    plans: &[SpeakerPlan],
    cfg: &ExtractionConfig,
) -> cxg_core::Result<Vec<SpeakerRun>> {
    plans
        .par_iter()
        .map(|p| simulate_speaker(template, p, cfg))
        .collect()
}
