use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rng::{SimRng, WeightedIndex};
use crate::error::{Error, Result};
use crate::treebank::{Corpus, DepTree, Token};

/// A weighted grammar of tree fragments with slot lexicons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarTemplate {
    /// Default seed for generation.
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "fragment", default)]
    pub fragments: Vec<Fragment>,
    #[serde(default)]
    pub slots: BTreeMap<String, Slot>,
}

/// A tree skeleton whose nodes are slots, in surface order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fragment {
    pub name: String,
    pub weight: f64,
    pub nodes: Vec<FragmentNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentNode {
    pub slot: String,
    pub deprel: String,
    /// 1-based position of the head within the fragment, 0 for the root.
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub fillers: Vec<Filler>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Filler {
    pub form: String,
    pub upos: String,
    #[serde(default)]
    pub lemma: Option<String>,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

fn positive(w: f64) -> bool {
    w.is_finite() && w > 0.0
}

impl GrammarTemplate {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTemplate(msg));
        if self.fragments.is_empty() {
            return bad("no fragments".into());
        }
        for (name, slot) in &self.slots {
            if slot.fillers.is_empty() {
                return bad(format!("slot {name} has no fillers"));
            }
            for f in &slot.fillers {
                if !positive(f.weight) {
                    return bad(format!(
                        "filler {} of slot {name} has weight {}",
                        f.form, f.weight
                    ));
                }
                if f.form.is_empty() || f.upos.is_empty() {
                    return bad(format!(
                        "slot {name} has a filler with an empty form or upos"
                    ));
                }
            }
        }
        for frag in &self.fragments {
            if !positive(frag.weight) {
                return bad(format!("fragment {} has weight {}", frag.name, frag.weight));
            }
            for node in &frag.nodes {
                if !self.slots.contains_key(&node.slot) {
                    return bad(format!(
                        "fragment {} uses unknown slot {}",
                        frag.name, node.slot
                    ));
                }
            }
            let skeleton: Vec<Token> = frag
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| Token::new(i + 1, "x", "x", "X", n.head, n.deprel.clone()))
                .collect();
            if let Err(Error::InvalidTree { source, .. }) =
                DepTree::new(frag.name.clone(), skeleton)
            {
                return bad(format!("fragment {}: {source}", frag.name));
            }
        }
        Ok(())
    }

    /// Samples `n` trees named `{prefix}{1..=n}`.
    pub(crate) fn sample(&self, n: usize, seed: u64, prefix: &str, source: &str) -> Result<Corpus> {
        self.validate()?;
        let frag_index =
            WeightedIndex::new(self.fragments.iter().map(|f| f.weight)).ok_or_else(|| {
                Error::InvalidTemplate("fragment weights do not sum to a positive value".into())
            })?;
        let slot_index: BTreeMap<&str, WeightedIndex> = self
            .slots
            .iter()
            .map(|(k, s)| {
                let w = WeightedIndex::new(s.fillers.iter().map(|f| f.weight))
                    .expect("validated weights");
                (k.as_str(), w)
            })
            .collect();
        let mut rng = SimRng::new(seed);
        let mut trees = Vec::with_capacity(n);
        for i in 0..n {
            let frag = &self.fragments[frag_index.sample(&mut rng)];
            let tokens = frag
                .nodes
                .iter()
                .enumerate()
                .map(|(k, node)| {
                    let slot = &self.slots[&node.slot];
                    let f = &slot.fillers[slot_index[node.slot.as_str()].sample(&mut rng)];
                    Token::new(
                        k + 1,
                        f.form.clone(),
                        f.lemma.clone().unwrap_or_else(|| f.form.clone()),
                        f.upos.clone(),
                        node.head,
                        node.deprel.clone(),
                    )
                })
                .collect();
            trees.push(DepTree::new(format!("{prefix}{}", i + 1), tokens)?);
        }
        Corpus::new(source, trees)
    }
}

/// Samples `n` trees: a fragment by weight, then each slot's filler by weight.
pub fn generate_corpus(template: &GrammarTemplate, n: usize, seed: u64) -> Result<Corpus> {
    if n == 0 {
        return Err(Error::InvalidConfig("n_sentences must be ≥ 1".into()));
    }
    template.sample(n, seed, "s", &format!("template/seed={seed}"))
}
