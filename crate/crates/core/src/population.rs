//! Grammar as shared knowledge of a population of speakers.
//!
//! A construction is *produced* by a speaker when it is an entry of the
//! speaker's final output constructicon (which already applies the frequency
//! threshold). Counting producers gives the `G≥p` sets; the core is what
//! every speaker produces and the periphery what at most half of them do.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catena::{enumerate_catenae, CatenaShape, Pattern};
use crate::constructicon::{
    cosine_similarity, extract_sentence, Constructicon, ExtractionConfig, MeaningVector,
};
use crate::error::{Error, Result};
use crate::shift::CheckpointSeries;
use crate::stats::{kruskal_wallis, median, KruskalWallis};
use crate::treebank::DepTree;

/// Label given to tokens no retained pattern covers.
pub const UNCOVERED: &str = "-";

#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerRecord {
    pub speaker_id: String,
    /// Constructicon of the speaker's input stream.
    pub input: Constructicon,
    /// Constructicons of the speaker's output at each checkpoint.
    pub outputs: Vec<Constructicon>,
}

impl SpeakerRecord {
    pub fn new(
        speaker_id: impl Into<String>,
        input: Constructicon,
        outputs: Vec<Constructicon>,
    ) -> Result<Self> {
        let speaker_id = speaker_id.into();
        if outputs.is_empty() {
            return Err(Error::NoOutput(speaker_id));
        }
        if outputs.iter().any(|c| c.config() != input.config()) {
            return Err(Error::MixedConfigs);
        }
        Ok(SpeakerRecord {
            speaker_id,
            input,
            outputs,
        })
    }

    /// The last checkpoint's constructicon.
    pub fn final_constructicon(&self) -> &Constructicon {
        self.outputs.last().expect("outputs are non-empty")
    }

    pub fn output_series(&self) -> Result<CheckpointSeries> {
        CheckpointSeries::new(self.speaker_id.clone(), self.outputs.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    speakers: Vec<SpeakerRecord>,
}

impl Population {
    pub fn new(speakers: Vec<SpeakerRecord>) -> Result<Self> {
        if speakers.len() < 2 {
            return Err(Error::TooFewSpeakers(speakers.len()));
        }
        let mut seen = BTreeSet::new();
        for s in &speakers {
            if !seen.insert(s.speaker_id.as_str()) {
                return Err(Error::DuplicateSpeaker(s.speaker_id.clone()));
            }
        }
        let cfg = speakers[0].input.config();
        if speakers.iter().any(|s| s.input.config() != cfg) {
            return Err(Error::MixedConfigs);
        }
        Ok(Population { speakers })
    }

    pub fn speakers(&self) -> &[SpeakerRecord] {
        &self.speakers
    }

    pub fn len(&self) -> usize {
        self.speakers.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn config(&self) -> &ExtractionConfig {
        self.speakers[0].input.config()
    }

    pub fn speaker(&self, id: &str) -> Result<&SpeakerRecord> {
        self.speakers
            .iter()
            .find(|s| s.speaker_id == id)
            .ok_or_else(|| Error::UnknownSpeaker(id.into()))
    }

    /// Number of speakers producing each pattern.
    pub fn producer_counts(&self) -> BTreeMap<Pattern, usize> {
        let mut counts = BTreeMap::new();
        for s in &self.speakers {
            for p in s.final_constructicon().patterns() {
                *counts.entry(p.clone()).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Final-checkpoint frequencies summed over speakers.
    pub fn aggregate_frequencies(&self) -> BTreeMap<Pattern, u64> {
        let mut freq = BTreeMap::new();
        for s in &self.speakers {
            for e in s.final_constructicon().entries() {
                *freq.entry(e.pattern.clone()).or_insert(0) += e.frequency;
            }
        }
        freq
    }

    /// Patterns present in every speaker's input constructicon.
    pub fn exposed_patterns(&self) -> BTreeSet<Pattern> {
        let mut iter = self.speakers.iter();
        let first = iter.next().expect("population is non-empty");
        let mut set: BTreeSet<Pattern> = first.input.patterns().cloned().collect();
        for s in iter {
            set.retain(|p| s.input.contains(p));
        }
        set
    }
}

/// 1 if the speaker produces `kappa`, else 0.
pub fn indicator(kappa: &Pattern, speaker: &SpeakerRecord) -> u8 {
    u8::from(speaker.final_constructicon().contains(kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreKind {
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarCore {
    pub threshold: usize,
    pub kind: CoreKind,
    pub patterns: BTreeSet<Pattern>,
}

impl GrammarCore {
    pub fn contains(&self, p: &Pattern) -> bool {
        self.patterns.contains(p)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

fn check_threshold(pop: &Population, p: usize) -> Result<()> {
    if p == 0 || p > pop.len() {
        return Err(Error::ThresholdOutOfRange {
            p,
            speakers: pop.len(),
        });
    }
    Ok(())
}

/// Patterns produced by `p` or more speakers.
pub fn g_at_least(pop: &Population, p: usize) -> Result<GrammarCore> {
    check_threshold(pop, p)?;
    Ok(GrammarCore {
        threshold: p,
        kind: CoreKind::AtLeast,
        patterns: pop
            .producer_counts()
            .into_iter()
            .filter(|&(_, n)| n >= p)
            .map(|(k, _)| k)
            .collect(),
    })
}

/// Produced patterns with at most `p` producers.
pub fn g_at_most(pop: &Population, p: usize) -> Result<GrammarCore> {
    check_threshold(pop, p)?;
    Ok(GrammarCore {
        threshold: p,
        kind: CoreKind::AtMost,
        patterns: pop
            .producer_counts()
            .into_iter()
            .filter(|&(_, n)| n <= p)
            .map(|(k, _)| k)
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorePeriphery {
    pub universe: BTreeSet<Pattern>,
    /// Produced by every speaker.
    pub core: GrammarCore,
    /// Produced by at most `⌊P/2⌋` speakers (possibly none).
    pub periphery: GrammarCore,
    pub other: BTreeSet<Pattern>,
}

impl CorePeriphery {
    pub fn groups(&self) -> [(&'static str, &BTreeSet<Pattern>); 3] {
        [
            ("core", &self.core.patterns),
            ("periphery", &self.periphery.patterns),
            ("other", &self.other),
        ]
    }
}

/// Splits the universe into core, periphery and the remainder.
///
/// With `exposure_filter` the universe is the set of patterns every speaker
/// met in its input; otherwise it is every pattern some speaker produces.
pub fn core_periphery(pop: &Population, exposure_filter: bool) -> Result<CorePeriphery> {
    let producers = pop.producer_counts();
    let universe: BTreeSet<Pattern> = if exposure_filter {
        pop.exposed_patterns()
    } else {
        producers.keys().cloned().collect()
    };
    if universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let all = pop.len();
    let half = all / 2;
    let mut core = BTreeSet::new();
    let mut periphery = BTreeSet::new();
    let mut other = BTreeSet::new();
    for p in &universe {
        let n = producers.get(p).copied().unwrap_or(0);
        if n == all {
            core.insert(p.clone());
        } else if n <= half {
            periphery.insert(p.clone());
        } else {
            other.insert(p.clone());
        }
    }
    Ok(CorePeriphery {
        universe,
        core: GrammarCore {
            threshold: all,
            kind: CoreKind::AtLeast,
            patterns: core,
        },
        periphery: GrammarCore {
            threshold: half,
            kind: CoreKind::AtMost,
            patterns: periphery,
        },
        other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySample {
    pub speaker: String,
    pub pattern: Pattern,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFrequencies {
    pub group: String,
    pub samples: Vec<FrequencySample>,
    pub median: f64,
}

impl GroupFrequencies {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.frequency as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyComparison {
    pub groups: Vec<GroupFrequencies>,
    pub test: KruskalWallis,
}

impl FrequencyComparison {
    pub fn group(&self, name: &str) -> Option<&GroupFrequencies> {
        self.groups.iter().find(|g| g.group == name)
    }
}

/// Input frequencies of each group's patterns, pooled over speakers, and
/// the omnibus test across groups. Patterns missing from a speaker's input
/// constructicon contribute nothing for that speaker; empty groups are
/// dropped.
pub fn input_frequency_comparison(
    pop: &Population,
    groups: &CorePeriphery,
) -> Result<FrequencyComparison> {
    let mut out = Vec::new();
    for (name, patterns) in groups.groups() {
        let mut samples = Vec::new();
        for s in pop.speakers() {
            for p in patterns {
                if let Some(f) = s.input.frequency(p) {
                    samples.push(FrequencySample {
                        speaker: s.speaker_id.clone(),
                        pattern: p.clone(),
                        frequency: f,
                    });
                }
            }
        }
        if samples.is_empty() {
            log::warn!("group {name} is empty after restriction; omitted");
            continue;
        }
        let values: Vec<f64> = samples.iter().map(|s| s.frequency as f64).collect();
        out.push(GroupFrequencies {
            group: name.into(),
            median: median(&values).expect("non-empty"),
            samples,
        });
    }
    let values: Vec<Vec<f64>> = out.iter().map(GroupFrequencies::values).collect();
    let test = kruskal_wallis(&values)?;
    Ok(FrequencyComparison { groups: out, test })
}

/// Re-renders a sentence through a retained pattern set.
///
/// Each token takes its label from the retained pattern occurrence covering
/// it with the highest aggregate frequency; ties go to the longer pattern and
/// then to the lexicographically smaller one. Uncovered tokens get `-`.
pub fn project_sentence(
    tree: &DepTree,
    retained: &BTreeSet<Pattern>,
    cfg: &ExtractionConfig,
    frequencies: &BTreeMap<Pattern, u64>,
) -> Result<Vec<String>> {
    type Best<'a> = (u64, usize, &'a Pattern, String);
    let mut best: Vec<Option<Best<'_>>> = alloc::vec![None; tree.len()];
    let catenae = enumerate_catenae(tree, &cfg.catena_options())?;
    let mut owned: Vec<(Pattern, Vec<(usize, String)>)> = Vec::new();
    for c in &catenae {
        let shape = CatenaShape::of(tree, c);
        for r in shape.renderings(cfg.levels) {
            if !retained.contains(&r.pattern) {
                continue;
            }
            let labels = r.pattern.labels();
            let per_token = c
                .ids()
                .iter()
                .zip(labels)
                .map(|(&id, l)| (id, l.value().to_string()))
                .collect();
            owned.push((r.pattern, per_token));
        }
    }
    for (pattern, per_token) in &owned {
        let f = frequencies.get(pattern).copied().unwrap_or(0);
        let len = per_token.len();
        for (id, label) in per_token {
            let slot = &mut best[id - 1];
            let better = match slot {
                None => true,
                Some((bf, bl, bp, _)) => (f, len)
                    .cmp(&(*bf, *bl))
                    .then_with(|| (*bp).cmp(pattern))
                    .is_gt(),
            };
            if better {
                *slot = Some((f, len, pattern, label.clone()));
            }
        }
    }
    Ok(best
        .into_iter()
        .map(|b| b.map_or_else(|| UNCOVERED.to_string(), |(_, _, _, l)| l))
        .collect())
}

fn coverage(observer: &Constructicon, stream: &Constructicon, speaker: &str) -> Result<f64> {
    let total = stream.total_frequency();
    if total == 0 {
        return Err(Error::EmptyOutput(speaker.into()));
    }
    let covered: u64 = stream
        .entries()
        .iter()
        .filter(|e| observer.contains(&e.pattern))
        .map(|e| e.frequency)
        .sum();
    Ok(covered as f64 / total as f64)
}

/// `(coverage_ij, coverage_ji)`: the share of pattern occurrences in one
/// speaker's final output that the other speaker's constructicon retains.
pub fn cross_intelligibility(pop: &Population, i: &str, j: &str) -> Result<(f64, f64)> {
    if i == j {
        return Err(Error::SameSpeaker);
    }
    let (si, sj) = (pop.speaker(i)?, pop.speaker(j)?);
    let (li, lj) = (si.final_constructicon(), sj.final_constructicon());
    Ok((coverage(li, lj, j)?, coverage(lj, li, i)?))
}

/// Square matrix of coverages; row `i`, column `j` is what speaker `i`
/// retrieves from speaker `j`'s output. The diagonal is 1.
pub fn coverage_matrix(pop: &Population) -> Result<Vec<Vec<f64>>> {
    let finals: Vec<&Constructicon> = pop
        .speakers()
        .iter()
        .map(|s| s.final_constructicon())
        .collect();
    let mut m = alloc::vec![alloc::vec![0.0; finals.len()]; finals.len()];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = coverage(finals[a], finals[b], &pop.speakers()[b].speaker_id)?;
        }
    }
    Ok(m)
}

fn project_vector(
    c: &Constructicon,
    v: &MeaningVector,
    shared: &BTreeMap<&Pattern, u32>,
) -> MeaningVector {
    let vocab = c.context_vocab();
    MeaningVector::from_pairs(
        v.weights()
            .iter()
            .filter_map(|&(k, w)| shared.get(&vocab[k as usize]).map(|&s| (s, w))),
    )
}

/// Mean cosine between two speakers' vectors for the patterns of `tree`
/// both of them retain, compared over their shared context vocabulary.
/// Patterns whose projected vector vanishes for either speaker are skipped.
pub fn activation_comparison(pop: &Population, i: &str, j: &str, tree: &DepTree) -> Result<f64> {
    let (si, sj) = (pop.speaker(i)?, pop.speaker(j)?);
    let (li, lj) = (si.final_constructicon(), sj.final_constructicon());
    let jv: BTreeSet<&Pattern> = lj.context_vocab().iter().collect();
    let shared: BTreeMap<&Pattern, u32> = li
        .context_vocab()
        .iter()
        .filter(|p| jv.contains(p))
        .enumerate()
        .map(|(k, p)| (p, k as u32))
        .collect();

    let sentence = extract_sentence(tree, li.config())?;
    let activated: BTreeSet<&Pattern> = sentence
        .patterns()
        .filter(|p| li.contains(p) && lj.contains(p))
        .collect();
    let mut sims = Vec::new();
    for p in activated {
        let a = project_vector(li, li.vector(p).expect("retained"), &shared);
        let b = project_vector(lj, lj.vector(p).expect("retained"), &shared);
        if let Some(c) = cosine_similarity(&a, &b) {
            sims.push(c);
        }
    }
    if sims.is_empty() {
        return Err(Error::NoSharedActivation(i.into(), j.into()));
    }
    Ok(sims.iter().sum::<f64>() / sims.len() as f64)
}
