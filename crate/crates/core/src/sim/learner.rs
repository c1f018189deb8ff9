use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rng::{SimRng, WeightedIndex};
use crate::catena::Pattern;
use crate::constructicon::{extract_sentence, ExtractionConfig};
use crate::error::{Error, Result};
use crate::treebank::{Corpus, DepTree, Token};

/// One token of an attested tree, without its position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TokenShape {
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub deprel: String,
    pub head: usize,
}

impl TokenShape {
    fn of(t: &Token) -> Self {
        TokenShape {
            form: t.form.clone(),
            lemma: t.lemma.clone(),
            upos: t.upos.clone(),
            deprel: t.deprel.clone(),
            head: t.head,
        }
    }
}

type Skeleton = Vec<(String, String, usize)>;
type LexKey = (String, String);
type FormTable<'a> = (Vec<&'a (String, String)>, WeightedIndex);

/// Everything a simulated speaker has counted so far.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    pattern_counts: BTreeMap<Pattern, u64>,
    tree_counts: BTreeMap<Vec<TokenShape>, u64>,
    lexicon: BTreeMap<LexKey, BTreeMap<(String, String), u64>>,
    checkpoint_index: u32,
    novelty: f64,
    seed: u64,
}

impl LearnerState {
    pub fn new(seed: u64) -> Self {
        LearnerState {
            seed,
            ..Default::default()
        }
    }

    pub fn pattern_counts(&self) -> &BTreeMap<Pattern, u64> {
        &self.pattern_counts
    }

    /// Attested trees with their counts.
    pub fn tree_counts(&self) -> &BTreeMap<Vec<TokenShape>, u64> {
        &self.tree_counts
    }

    pub fn checkpoint_index(&self) -> u32 {
        self.checkpoint_index
    }

    pub fn novelty(&self) -> f64 {
        self.novelty
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_trained(&self) -> bool {
        !self.tree_counts.is_empty()
    }

    /// Probability that an output sentence is a new combination rather than a replay.
    pub fn with_novelty(mut self, novelty: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&novelty) {
            return Err(Error::InvalidConfig(format!(
                "novelty {novelty} outside [0, 1]"
            )));
        }
        self.novelty = novelty;
        Ok(self)
    }

    /// Adds the counts of `batch`. The result does not depend on sentence order.
    pub fn train_step(&self, batch: &Corpus, cfg: &ExtractionConfig) -> Result<LearnerState> {
        if batch.is_empty() {
            return Err(Error::EmptyStream);
        }
        let mut next = self.clone();
        for tree in batch {
            let sp = extract_sentence(tree, cfg)?;
            for p in sp.patterns() {
                *next.pattern_counts.entry(p.clone()).or_insert(0) += 1;
            }
            let shape: Vec<TokenShape> = tree.tokens().iter().map(TokenShape::of).collect();
            *next.tree_counts.entry(shape).or_insert(0) += 1;
            for t in tree.tokens() {
                *next
                    .lexicon
                    .entry((t.upos.clone(), t.deprel.clone()))
                    .or_default()
                    .entry((t.form.clone(), t.lemma.clone()))
                    .or_insert(0) += 1;
            }
        }
        next.checkpoint_index += 1;
        Ok(next)
    }

    /// Produces `n` sentences.
    ///
    /// Each sentence is, with probability `1 − novelty`, an attested tree
    /// drawn by frequency. Otherwise an attested skeleton (part of speech,
    /// relation and head per position) is drawn by frequency and every
    /// position refilled from the forms seen with that part of speech and
    /// relation.
    pub fn generate_output(&self, n: usize, seed: u64) -> Result<Corpus> {
        if !self.is_trained() {
            return Err(Error::Untrained);
        }
        let trees: Vec<&Vec<TokenShape>> = self.tree_counts.keys().collect();
        let tree_index = WeightedIndex::new(self.tree_counts.values().map(|&c| c as f64))
            .expect("positive counts");

        let mut skeleton_counts: BTreeMap<Skeleton, u64> = BTreeMap::new();
        for (shape, &c) in &self.tree_counts {
            let sk = shape
                .iter()
                .map(|t| (t.upos.clone(), t.deprel.clone(), t.head))
                .collect();
            *skeleton_counts.entry(sk).or_insert(0) += c;
        }
        let skeletons: Vec<&Skeleton> = skeleton_counts.keys().collect();
        let skeleton_index = WeightedIndex::new(skeleton_counts.values().map(|&c| c as f64))
            .expect("positive counts");
        let lexicon: BTreeMap<&LexKey, FormTable> = self
            .lexicon
            .iter()
            .map(|(k, forms)| {
                let w =
                    WeightedIndex::new(forms.values().map(|&c| c as f64)).expect("positive counts");
                (k, (forms.keys().collect(), w))
            })
            .collect();

        let mut rng = SimRng::new(seed);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let novel = rng.next_f64() < self.novelty;
            let tokens: Vec<Token> = if novel {
                let sk = skeletons[skeleton_index.sample(&mut rng)];
                sk.iter()
                    .enumerate()
                    .map(|(k, (upos, deprel, head))| {
                        let (forms, w) = &lexicon[&(upos.clone(), deprel.clone())];
                        let (form, lemma) = forms[w.sample(&mut rng)];
                        Token::new(
                            k + 1,
                            form.clone(),
                            lemma.clone(),
                            upos.clone(),
                            *head,
                            deprel.clone(),
                        )
                    })
                    .collect()
            } else {
                trees[tree_index.sample(&mut rng)]
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        Token::new(
                            k + 1,
                            t.form.clone(),
                            t.lemma.clone(),
                            t.upos.clone(),
                            t.head,
                            t.deprel.clone(),
                        )
                    })
                    .collect()
            };
            out.push(DepTree::new(
                format!("o{}-{}", self.checkpoint_index, i + 1),
                tokens,
            )?);
        }
        Corpus::new(format!("output/checkpoint={}", self.checkpoint_index), out)
    }
}
