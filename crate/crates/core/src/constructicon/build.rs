use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use super::config::{ExtractionConfig, Weighting};
use super::vector::{cosine_distance, cosine_similarity, MeaningVector};
use crate::catena::render::{abstract_shape, less_abstract};
use crate::catena::{enumerate_catenae, CatenaShape, Pattern};
use crate::error::{Error, Result};
use crate::treebank::{Corpus, DepTree};

/// The pattern occurrences of one sentence, grouped by catena occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePatterns {
    pub sent_id: String,
    pub shapes: Vec<CatenaShape>,
    /// Renderings of `shapes[i]` under the configured levels.
    pub occurrences: Vec<Vec<Pattern>>,
}

impl SentencePatterns {
    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.occurrences.iter().flatten()
    }
}

pub fn extract_sentence(tree: &DepTree, cfg: &ExtractionConfig) -> Result<SentencePatterns> {
    let catenae = enumerate_catenae(tree, &cfg.catena_options())?;
    let mut shapes = Vec::with_capacity(catenae.len());
    let mut occurrences = Vec::with_capacity(catenae.len());
    for c in &catenae {
        let shape = CatenaShape::of(tree, c);
        occurrences.push(
            shape
                .renderings(cfg.levels)
                .into_iter()
                .map(|r| r.pattern)
                .collect(),
        );
        shapes.push(shape);
    }
    Ok(SentencePatterns {
        sent_id: tree.sent_id().into(),
        shapes,
        occurrences,
    })
}

/// First-pass counts: pattern frequencies and distinct catena shapes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternTally {
    counts: BTreeMap<Pattern, u64>,
    shapes: BTreeSet<CatenaShape>,
    sentences: u64,
}

impl PatternTally {
    pub fn new() -> Self {
        PatternTally::default()
    }

    pub fn add(&mut self, sentence: &SentencePatterns) {
        for p in sentence.patterns() {
            *self.counts.entry(p.clone()).or_insert(0) += 1;
        }
        for s in &sentence.shapes {
            if !self.shapes.contains(s) {
                self.shapes.insert(s.clone());
            }
        }
        self.sentences += 1;
    }

    pub fn merge(mut self, other: PatternTally) -> PatternTally {
        if self.counts.len() < other.counts.len() {
            return other.merge(self);
        }
        for (p, c) in other.counts {
            *self.counts.entry(p).or_insert(0) += c;
        }
        self.shapes.extend(other.shapes);
        self.sentences += other.sentences;
        self
    }

    pub fn counts(&self) -> &BTreeMap<Pattern, u64> {
        &self.counts
    }

    pub fn sentences(&self) -> u64 {
        self.sentences
    }
}

/// The kept patterns, the context vocabulary and the chain links among kept
/// patterns, fixed after the first pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Inventory {
    config: ExtractionConfig,
    entries: Vec<(Pattern, u64)>,
    entry_index: BTreeMap<Pattern, u32>,
    vocab: Vec<Pattern>,
    vocab_index: BTreeMap<Pattern, u32>,
    links: BTreeSet<(usize, usize)>,
}

impl Inventory {
    pub fn new(tally: &PatternTally, cfg: &ExtractionConfig) -> Result<Self> {
        cfg.validate()?;
        if tally.sentences == 0 {
            return Err(Error::EmptyStream);
        }
        let entries: Vec<(Pattern, u64)> = tally
            .counts
            .iter()
            .filter(|(_, &c)| c >= cfg.min_freq)
            .map(|(p, &c)| (p.clone(), c))
            .collect();
        if entries.is_empty() {
            return Err(Error::NoPatternsSurvive {
                min_freq: cfg.min_freq,
            });
        }
        let entry_index: BTreeMap<Pattern, u32> = entries
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (p.clone(), i as u32))
            .collect();

        let mut ranked: Vec<(&Pattern, u64)> = tally.counts.iter().map(|(p, &c)| (p, c)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let vocab: Vec<Pattern> = ranked
            .into_iter()
            .take(cfg.context_vocab_size)
            .map(|(p, _)| p.clone())
            .collect();
        let vocab_index = vocab
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();

        let mut links = BTreeSet::new();
        for shape in &tally.shapes {
            let a = abstract_shape(shape, cfg.levels);
            for (x, y) in a.link_patterns() {
                if let (Some(&i), Some(&j)) = (entry_index.get(x), entry_index.get(y)) {
                    links.insert((i as usize, j as usize));
                }
            }
        }

        Ok(Inventory {
            config: *cfg,
            entries,
            entry_index,
            vocab,
            vocab_index,
            links,
        })
    }

    pub fn entries(&self) -> &[(Pattern, u64)] {
        &self.entries
    }

    pub fn context_vocab(&self) -> &[Pattern] {
        &self.vocab
    }

    /// Second-pass counts for one sentence.
    ///
    /// Two pattern occurrences co-occur when they come from different catena
    /// occurrences of the sentence; renderings of the same catena are
    /// alternative analyses of the same material. Every unordered pair of
    /// co-occurring occurrences is counted once, so for a kept pattern `k`
    /// and a context pattern `c != k` the count is `m_k·m_c − Σ r_k·r_c`,
    /// and for `c == k` it is `(m_k² − Σ r_k²) / 2`, where `m` counts
    /// occurrences in the sentence and `r` within one catena.
    pub fn cooccurrences(&self, sentence: &SentencePatterns) -> CooccurrenceTable {
        let mut table = CooccurrenceTable::default();
        self.add_cooccurrences(sentence, &mut table);
        table
    }

    /// Adds one sentence's counts to `table`.
    pub fn add_cooccurrences(&self, sentence: &SentencePatterns, table: &mut CooccurrenceTable) {
        let mut within: HashMap<(u32, u32), i64> = HashMap::new();
        let mut entry_counts: BTreeMap<u32, i64> = BTreeMap::new();
        let mut vocab_counts: BTreeMap<u32, i64> = BTreeMap::new();
        let mut local_e: Vec<u32> = Vec::new();
        let mut local_v: Vec<u32> = Vec::new();
        for occ in &sentence.occurrences {
            local_e.clear();
            local_v.clear();
            for p in occ {
                if let Some(&e) = self.entry_index.get(p) {
                    local_e.push(e);
                }
                if let Some(&v) = self.vocab_index.get(p) {
                    local_v.push(v);
                }
            }
            for &e in &local_e {
                for &v in &local_v {
                    *within.entry((e, v)).or_insert(0) += 1;
                }
                *entry_counts.entry(e).or_insert(0) += 1;
            }
            for &v in &local_v {
                *vocab_counts.entry(v).or_insert(0) += 1;
            }
        }

        for (&e, &me) in &entry_counts {
            let self_v = self.vocab_index.get(&self.entries[e as usize].0).copied();
            for (&v, &mv) in &vocab_counts {
                let mut n = me * mv - within.get(&(e, v)).copied().unwrap_or(0);
                if Some(v) == self_v {
                    debug_assert!(n % 2 == 0);
                    n /= 2;
                }
                debug_assert!(n >= 0);
                if n > 0 {
                    *table.cells.entry((e, v)).or_insert(0) += n as u64;
                }
            }
        }
    }

    /// Applies the weighting and produces the finished constructicon.
    pub fn assemble(self, table: CooccurrenceTable, provenance: Provenance) -> Constructicon {
        let n_entries = self.entries.len();
        let mut rows: Vec<Vec<(u32, f64)>> = alloc::vec![Vec::new(); n_entries];
        match self.config.weighting {
            Weighting::Raw => {
                for ((e, v), n) in table.sorted() {
                    rows[e as usize].push((v, n as f64));
                }
            }
            Weighting::Ppmi => {
                let mut row_sum = alloc::vec![0u64; n_entries];
                let mut col_sum = alloc::vec![0u64; self.vocab.len()];
                let mut total = 0u64;
                let cells = table.sorted();
                for &((e, v), n) in &cells {
                    row_sum[e as usize] += n;
                    col_sum[v as usize] += n;
                    total += n;
                }
                for ((e, v), n) in cells {
                    let ratio = (n as f64 * total as f64)
                        / (row_sum[e as usize] as f64 * col_sum[v as usize] as f64);
                    let pmi = libm::log(ratio);
                    if pmi > 0.0 {
                        rows[e as usize].push((v, pmi));
                    }
                }
            }
        }
        let entries = self
            .entries
            .into_iter()
            .zip(rows)
            .map(|((pattern, frequency), row)| Entry {
                pattern,
                frequency,
                vector: MeaningVector::from_pairs(row),
            })
            .collect();
        Constructicon {
            config: self.config,
            provenance,
            index: self.entry_index,
            entries,
            context_vocab: self.vocab,
            chain_links: self.links.into_iter().collect(),
        }
    }
}

/// Second-pass counts: `(entry, context)` co-occurrence cells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CooccurrenceTable {
    cells: HashMap<(u32, u32), u64>,
}

impl CooccurrenceTable {
    fn sorted(&self) -> Vec<((u32, u32), u64)> {
        let mut cells: Vec<_> = self.cells.iter().map(|(&k, &n)| (k, n)).collect();
        cells.sort_unstable_by_key(|&(k, _)| k);
        cells
    }

    pub fn merge(mut self, other: CooccurrenceTable) -> CooccurrenceTable {
        if self.cells.len() < other.cells.len() {
            return other.merge(self);
        }
        for (k, n) in other.cells {
            *self.cells.entry(k).or_insert(0) += n;
        }
        self
    }

    pub fn get(&self, entry: u32, context: u32) -> u64 {
        self.cells.get(&(entry, context)).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub stream: String,
    pub checkpoint: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub pattern: Pattern,
    pub frequency: u64,
    pub vector: MeaningVector,
}

/// A frequency-filtered pattern inventory with meaning vectors and chain links.
#[derive(Debug, Clone, PartialEq)]
pub struct Constructicon {
    config: ExtractionConfig,
    provenance: Provenance,
    entries: Vec<Entry>,
    index: BTreeMap<Pattern, u32>,
    context_vocab: Vec<Pattern>,
    chain_links: Vec<(usize, usize)>,
}

/// Builds the constructicon of a stream, sequentially.
pub fn build_constructicon(stream: &Corpus, cfg: &ExtractionConfig) -> Result<Constructicon> {
    cfg.validate()?;
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let sentences = stream
        .iter()
        .map(|t| extract_sentence(t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut tally = PatternTally::new();
    for s in &sentences {
        tally.add(s);
    }
    let inventory = Inventory::new(&tally, cfg)?;
    let mut table = CooccurrenceTable::default();
    for s in &sentences {
        inventory.add_cooccurrences(s, &mut table);
    }
    Ok(inventory.assemble(
        table,
        Provenance {
            stream: stream.source().into(),
            checkpoint: 0,
        },
    ))
}

impl Constructicon {
    /// Reassembles a constructicon from stored parts, checking its invariants.
    pub fn from_parts(
        config: ExtractionConfig,
        provenance: Provenance,
        entries: Vec<Entry>,
        context_vocab: Vec<Pattern>,
        chain_links: Vec<(usize, usize)>,
    ) -> Result<Self> {
        config.validate()?;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if entries.is_empty() {
            return Err(Error::NoPatternsSurvive {
                min_freq: config.min_freq,
            });
        }
        if context_vocab.len() > config.context_vocab_size {
            return bad(alloc::format!(
                "context vocabulary has {} patterns, limit is {}",
                context_vocab.len(),
                config.context_vocab_size
            ));
        }
        if context_vocab.iter().collect::<BTreeSet<_>>().len() != context_vocab.len() {
            return bad("duplicate context pattern".into());
        }
        for w in entries.windows(2) {
            if w[0].pattern >= w[1].pattern {
                return bad(alloc::format!(
                    "entries not strictly sorted at {}",
                    w[1].pattern
                ));
            }
        }
        for e in &entries {
            if e.frequency < config.min_freq {
                return bad(alloc::format!("{} has frequency below min_freq", e.pattern));
            }
            if e.vector
                .weights()
                .iter()
                .any(|&(i, _)| i as usize >= context_vocab.len())
            {
                return bad(alloc::format!(
                    "{} has a dimension outside the vocabulary",
                    e.pattern
                ));
            }
        }
        let mut links = chain_links;
        links.sort_unstable();
        links.dedup();
        for &(i, j) in &links {
            if i >= entries.len() || j >= entries.len() {
                return bad(alloc::format!("chain link ({i}, {j}) out of range"));
            }
            if !less_abstract(&entries[i].pattern.levels(), &entries[j].pattern.levels()) {
                return bad(alloc::format!(
                    "chain link {} -> {} violates level order",
                    entries[i].pattern,
                    entries[j].pattern
                ));
            }
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.pattern.clone(), i as u32))
            .collect();
        Ok(Constructicon {
            config,
            provenance,
            entries,
            index,
            context_vocab,
            chain_links: links,
        })
    }

    pub fn with_provenance(mut self, stream: impl Into<String>, checkpoint: u32) -> Self {
        self.provenance = Provenance {
            stream: stream.into(),
            checkpoint,
        };
        self
    }

    pub fn config(&self) -> &ExtractionConfig {
        &self.config
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.entries.iter().map(|e| &e.pattern)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.index.contains_key(p)
    }

    pub fn get(&self, p: &Pattern) -> Option<&Entry> {
        self.index.get(p).map(|&i| &self.entries[i as usize])
    }

    pub fn frequency(&self, p: &Pattern) -> Option<u64> {
        self.get(p).map(|e| e.frequency)
    }

    pub fn vector(&self, p: &Pattern) -> Option<&MeaningVector> {
        self.get(p).map(|e| &e.vector)
    }

    pub fn total_frequency(&self) -> u64 {
        self.entries.iter().map(|e| e.frequency).sum()
    }

    pub fn context_vocab(&self) -> &[Pattern] {
        &self.context_vocab
    }

    /// Chain links as index pairs into [`Constructicon::entries`].
    pub fn chain_link_indices(&self) -> &[(usize, usize)] {
        &self.chain_links
    }

    pub fn chain_links(&self) -> impl Iterator<Item = (&Pattern, &Pattern)> {
        self.chain_links
            .iter()
            .map(|&(i, j)| (&self.entries[i].pattern, &self.entries[j].pattern))
    }

    fn index_of(&self, p: &Pattern) -> Result<usize> {
        self.index
            .get(p)
            .map(|&i| i as usize)
            .ok_or_else(|| Error::UnknownPattern(p.to_string()))
    }

    /// Whether `(p1, p2)` was attested as a chain link during extraction.
    pub fn is_chain(&self, p1: &Pattern, p2: &Pattern) -> Result<bool> {
        let i = self.index_of(p1)?;
        let j = self.index_of(p2)?;
        Ok(self.chain_links.binary_search(&(i, j)).is_ok())
    }

    fn nonzero_vector(&self, p: &Pattern) -> Result<&MeaningVector> {
        let v = &self.entries[self.index_of(p)?].vector;
        if v.is_zero() {
            return Err(Error::ZeroVector(p.to_string()));
        }
        Ok(v)
    }

    /// Cosine distance between the meaning vectors of two patterns.
    pub fn distance(&self, k1: &Pattern, k2: &Pattern) -> Result<f64> {
        let a = self.nonzero_vector(k1)?;
        let b = self.nonzero_vector(k2)?;
        Ok(cosine_distance(a, b).expect("both vectors are nonzero"))
    }

    pub fn similarity(&self, k1: &Pattern, k2: &Pattern) -> Result<f64> {
        let a = self.nonzero_vector(k1)?;
        let b = self.nonzero_vector(k2)?;
        Ok(cosine_similarity(a, b).expect("both vectors are nonzero"))
    }
}

/// Patterns present in both constructicons.
pub fn shared_patterns(c1: &Constructicon, c2: &Constructicon) -> BTreeSet<Pattern> {
    c1.patterns().filter(|p| c2.contains(p)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catena::MaxLen;
    use crate::treebank::tests::mary;
    use crate::treebank::Token;
    use alloc::vec;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn single_node_cfg() -> ExtractionConfig {
        ExtractionConfig {
            max_len: MaxLen::Bounded(1),
            min_freq: 1,
            ..ExtractionConfig::default()
        }
    }

    #[test]
    fn mary_single_nodes() {
        let corpus = Corpus::new("mary", vec![mary()]).unwrap();
        let c = build_constructicon(&corpus, &single_node_cfg()).unwrap();
        // 15 pattern occurrences, _NOUN renders both Mary and lamb
        assert_eq!(c.len(), 14);
        assert_eq!(c.total_frequency(), 15);
        assert_eq!(c.frequency(&pat("_NOUN")), Some(2));
        assert_eq!(c.context_vocab().len(), 14);
        assert_eq!(c.context_vocab()[0], pat("_NOUN"));

        let idx = |p: &str| c.context_vocab().iter().position(|q| *q == pat(p)).unwrap() as u32;
        let mary_v = c.vector(&pat("Mary")).unwrap();
        // contexts are the 12 renderings of the other four tokens
        assert_eq!(mary_v.nnz(), 12);
        assert_eq!(mary_v.get(idx("had")), 1.0);
        assert_eq!(mary_v.get(idx("_NOUN")), 1.0);
        assert_eq!(mary_v.get(idx("@nsubj")), 0.0);
        assert_eq!(mary_v.get(idx("Mary")), 0.0);
        let noun = c.vector(&pat("_NOUN")).unwrap();
        // one unordered pair of distinct _NOUN occurrences
        assert_eq!(noun.get(idx("_NOUN")), 1.0);
        assert_eq!(noun.get(idx("had")), 2.0);
        assert_eq!(noun.get(idx("lamb")), 1.0);
        assert_eq!(noun.get(idx("Mary")), 1.0);
    }

    #[test]
    fn threshold_filters_everything() {
        let corpus = Corpus::new("mary", vec![mary()]).unwrap();
        let cfg = ExtractionConfig {
            min_freq: 3,
            ..single_node_cfg()
        };
        assert_eq!(
            build_constructicon(&corpus, &cfg),
            Err(Error::NoPatternsSurvive { min_freq: 3 })
        );
        assert_eq!(
            build_constructicon(&Corpus::empty("e"), &cfg),
            Err(Error::EmptyStream)
        );
    }

    fn renamed(t: &DepTree, id: &str) -> DepTree {
        DepTree::new(id, t.tokens().to_vec()).unwrap()
    }

    #[test]
    fn doubling_scales_raw_and_preserves_ppmi() {
        let other = DepTree::new(
            "dog",
            vec![
                Token::new(1, "the", "the", "DET", 2, "det"),
                Token::new(2, "dog", "dog", "NOUN", 3, "nsubj"),
                Token::new(3, "barks", "bark", "VERB", 0, "root"),
            ],
        )
        .unwrap();
        let once = Corpus::new("x", vec![mary(), other.clone()]).unwrap();
        let twice = Corpus::new(
            "x",
            vec![
                mary(),
                other.clone(),
                renamed(&mary(), "m2"),
                renamed(&other, "d2"),
            ],
        )
        .unwrap();
        let cfg = ExtractionConfig {
            min_freq: 1,
            ..ExtractionConfig::default()
        };
        let a = build_constructicon(&once, &cfg).unwrap();
        let b = build_constructicon(&twice, &cfg).unwrap();
        assert_eq!(a.context_vocab(), b.context_vocab());
        for (ea, eb) in a.entries().iter().zip(b.entries()) {
            assert_eq!(ea.pattern, eb.pattern);
            assert_eq!(2 * ea.frequency, eb.frequency);
            assert_eq!(ea.vector.scaled(2.0), eb.vector);
        }
        let ppmi = ExtractionConfig {
            weighting: Weighting::Ppmi,
            ..cfg
        };
        let a = build_constructicon(&once, &ppmi).unwrap();
        let b = build_constructicon(&twice, &ppmi).unwrap();
        for (ea, eb) in a.entries().iter().zip(b.entries()) {
            assert_eq!(ea.vector, eb.vector);
        }
    }

    #[test]
    fn distances_and_chains() {
        let corpus = Corpus::new("mary", vec![mary()]).unwrap();
        let cfg = ExtractionConfig {
            min_freq: 1,
            ..ExtractionConfig::default()
        };
        let c = build_constructicon(&corpus, &cfg).unwrap();
        assert!(c.is_chain(&pat("lamb"), &pat("_NOUN")).unwrap());
        assert!(c.is_chain(&pat("Mary had"), &pat("@nsubj @root")).unwrap());
        assert!(!c.is_chain(&pat("_NOUN"), &pat("lamb")).unwrap());
        assert!(!c.is_chain(&pat("lamb"), &pat("lamb")).unwrap());
        assert!(matches!(
            c.is_chain(&pat("the dog"), &pat("a _NOUN")),
            Err(Error::UnknownPattern(_))
        ));
        let d = c.distance(&pat("lamb"), &pat("_NOUN")).unwrap();
        assert!((0.0..=1.0).contains(&d));
        assert_eq!(c.distance(&pat("lamb"), &pat("lamb")).unwrap(), 0.0);
        assert_eq!(d, c.distance(&pat("_NOUN"), &pat("lamb")).unwrap());
        for (i, j) in c.chain_links() {
            assert!(less_abstract(&i.levels(), &j.levels()));
        }
    }

    #[test]
    fn shared_pattern_sets() {
        let cfg = ExtractionConfig {
            min_freq: 1,
            max_len: MaxLen::Bounded(1),
            ..ExtractionConfig::default()
        };
        let a = build_constructicon(&Corpus::new("a", vec![mary()]).unwrap(), &cfg).unwrap();
        assert_eq!(shared_patterns(&a, &a).len(), a.len());
        let hi = DepTree::new("hi", vec![Token::new(1, "hi", "hi", "INTJ", 0, "root")]).unwrap();
        let b = build_constructicon(&Corpus::new("b", vec![hi]).unwrap(), &cfg).unwrap();
        // only "@root" is shared
        assert_eq!(
            shared_patterns(&a, &b).into_iter().collect::<Vec<_>>(),
            vec![pat("@root")]
        );
    }
}
