#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cxg_core::constructicon::{Entry, Provenance};
use cxg_core::sim::{Filler, Fragment, FragmentNode, GrammarTemplate, Slot};
use cxg_core::{Constructicon, DepTree, ExtractionConfig, MeaningVector, Pattern, Token};

const FORMS: [&str; 6] = ["the", "dog", "saw", "a", "cat", "ran"];
const UPOS: [&str; 5] = ["DET", "NOUN", "VERB", "ADJ", "PUNCT"];
const DEPREL: [&str; 5] = ["det", "nsubj", "obj", "amod", "punct"];

/// A random tree over `draws.len()` tokens, built from the draws alone.
pub fn random_tree(draws: &[u64]) -> DepTree {
    let n = draws.len();
    let mut order: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = (draws[i] % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    let mut head = vec![0usize; n + 1];
    for k in 1..n {
        let parent = order[(draws[k].rotate_left(17) % k as u64) as usize];
        head[order[k]] = parent;
    }
    let tokens = (1..=n)
        .map(|id| {
            let d = draws[id - 1].rotate_left(31);
            let deprel = if head[id] == 0 {
                "root"
            } else {
                DEPREL[(d % 5) as usize]
            };
            Token::new(
                id,
                FORMS[(d / 7 % 6) as usize],
                FORMS[(d / 7 % 6) as usize],
                UPOS[(d / 97 % 5) as usize],
                head[id],
                deprel,
            )
        })
        .collect();
    DepTree::new("r", tokens).expect("random tree is valid")
}

/// Every non-empty token subset connected in the undirected tree graph.
pub fn brute_force_catenae(tree: &DepTree) -> BTreeSet<Vec<usize>> {
    let n = tree.len();
    let mut adj = vec![Vec::new(); n + 1];
    for t in tree.tokens() {
        if t.head != 0 {
            adj[t.id].push(t.head);
            adj[t.head].push(t.id);
        }
    }
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (1..=n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
        let mut seen = BTreeSet::from([members[0]]);
        let mut queue = VecDeque::from([members[0]]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if mask & (1 << (w - 1)) != 0 && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() == members.len() {
            out.insert(members);
        }
    }
    out
}

/// A constructicon containing exactly `patterns`, all with frequency `freq`.
pub fn constructicon_of(patterns: &BTreeSet<Pattern>, freq: u64) -> Constructicon {
    let entries = patterns
        .iter()
        .map(|p| Entry {
            pattern: p.clone(),
            frequency: freq,
            vector: MeaningVector::from_pairs([]),
        })
        .collect();
    Constructicon::from_parts(
        ExtractionConfig::default(),
        Provenance::default(),
        entries,
        vec![],
        vec![],
    )
    .expect("valid parts")
}

fn node(slot: &str, deprel: &str, head: usize) -> FragmentNode {
    FragmentNode {
        slot: slot.into(),
        deprel: deprel.into(),
        head,
    }
}

fn slot(upos: &str, forms: &[&str]) -> Slot {
    Slot {
        fillers: forms
            .iter()
            .map(|f| Filler {
                form: (*f).into(),
                upos: upos.into(),
                lemma: None,
                weight: 1.0,
            })
            .collect(),
    }
}

/// A small three-fragment grammar.
pub fn toy_template() -> GrammarTemplate {
    GrammarTemplate {
        seed: 1,
        fragments: vec![
            Fragment {
                name: "intransitive".into(),
                weight: 3.0,
                nodes: vec![
                    node("D", "det", 2),
                    node("N", "nsubj", 3),
                    node("V", "root", 0),
                ],
            },
            Fragment {
                name: "transitive".into(),
                weight: 2.0,
                nodes: vec![
                    node("N", "nsubj", 2),
                    node("T", "root", 0),
                    node("D", "det", 4),
                    node("N", "obj", 2),
                ],
            },
            Fragment {
                name: "bare".into(),
                weight: 1.0,
                nodes: vec![node("N", "nsubj", 2), node("V", "root", 0)],
            },
        ],
        slots: BTreeMap::from([
            ("D".into(), slot("DET", &["the", "a"])),
            ("N".into(), slot("NOUN", &["dog", "cat", "bird", "fish"])),
            ("V".into(), slot("VERB", &["ran", "slept"])),
            ("T".into(), slot("VERB", &["saw", "chased"])),
        ]),
    }
}
