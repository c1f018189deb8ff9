//! Dependency trees and corpora.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Token {
    /// 1-based surface position.
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub deprel: String,
    /// Head position, 0 for the root.
    pub head: usize,
}

impl Token {
    pub fn new(
        id: usize,
        form: impl Into<String>,
        lemma: impl Into<String>,
        upos: impl Into<String>,
        head: usize,
        deprel: impl Into<String>,
    ) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            deprel: deprel.into(),
            head,
        }
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

/// A validated dependency-parsed sentence.
///
/// Construction goes through [`DepTree::new`], which enforces a single root,
/// in-range heads, consecutive ids and acyclicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DepTree {
    sent_id: String,
    tokens: Vec<Token>,
}

impl DepTree {
    pub fn new(sent_id: impl Into<String>, tokens: Vec<Token>) -> Result<Self> {
        let sent_id = sent_id.into();
        validate(&tokens).map_err(|source| Error::InvalidTree {
            sent_id: sent_id.clone(),
            source,
        })?;
        Ok(DepTree { sent_id, tokens })
    }

    pub fn sent_id(&self) -> &str {
        &self.sent_id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based id.
    pub fn token(&self, id: usize) -> &Token {
        &self.tokens[id - 1]
    }

    pub fn root(&self) -> usize {
        self.tokens
            .iter()
            .find(|t| t.is_root())
            .map(|t| t.id)
            .expect("validated tree has a root")
    }

    /// Dependents of every token, indexed by `id - 1`, in surface order.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.tokens.len()];
        for t in &self.tokens {
            if t.head != 0 {
                children[t.head - 1].push(t.id);
            }
        }
        children
    }

    pub fn into_parts(self) -> (String, Vec<Token>) {
        (self.sent_id, self.tokens)
    }
}

impl<'de> Deserialize<'de> for DepTree {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> core::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            sent_id: String,
            tokens: Vec<Token>,
        }
        let raw = Raw::deserialize(deserializer)?;
        DepTree::new(raw.sent_id, raw.tokens).map_err(serde::de::Error::custom)
    }
}

fn validate(tokens: &[Token]) -> core::result::Result<(), TreeError> {
    if tokens.is_empty() {
        return Err(TreeError::Empty);
    }
    let n = tokens.len();
    let mut root = None;
    for (i, t) in tokens.iter().enumerate() {
        if t.id != i + 1 {
            return Err(TreeError::NonConsecutiveIds {
                expected: i + 1,
                found: t.id,
            });
        }
        for (field, value) in [("form", &t.form), ("upos", &t.upos), ("deprel", &t.deprel)] {
            if value.is_empty() {
                return Err(TreeError::EmptyField { id: t.id, field });
            }
        }
        if t.head == t.id {
            return Err(TreeError::SelfLoop { id: t.id });
        }
        if t.head > n {
            return Err(TreeError::DanglingHead {
                id: t.id,
                head: t.head,
            });
        }
        if t.head == 0 {
            if let Some(first) = root {
                return Err(TreeError::MultipleRoots {
                    first,
                    second: t.id,
                });
            }
            root = Some(t.id);
        }
    }
    if root.is_none() {
        return Err(TreeError::NoRoot);
    }
    // 0 = unvisited, 1 = on current path, 2 = known to reach the root
    let mut state = vec![0u8; n + 1];
    state[0] = 2;
    for start in 1..=n {
        let mut path = Vec::new();
        let mut cur = start;
        while state[cur] == 0 {
            state[cur] = 1;
            path.push(cur);
            cur = tokens[cur - 1].head;
        }
        if state[cur] == 1 {
            return Err(TreeError::Cycle { id: cur });
        }
        for id in path {
            state[id] = 2;
        }
    }
    Ok(())
}

/// An ordered collection of trees with unique sentence ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Corpus {
    trees: Vec<DepTree>,
    source: String,
}

impl Corpus {
    pub fn new(source: impl Into<String>, trees: Vec<DepTree>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for t in &trees {
            if !seen.insert(t.sent_id()) {
                return Err(Error::DuplicateSentence(t.sent_id().into()));
            }
        }
        Ok(Corpus {
            trees,
            source: source.into(),
        })
    }

    pub fn empty(source: impl Into<String>) -> Self {
        Corpus {
            trees: Vec::new(),
            source: source.into(),
        }
    }

    pub fn push(&mut self, tree: DepTree) -> Result<()> {
        if self.trees.iter().any(|t| t.sent_id() == tree.sent_id()) {
            return Err(Error::DuplicateSentence(tree.sent_id().into()));
        }
        self.trees.push(tree);
        Ok(())
    }

    pub fn trees(&self) -> &[DepTree] {
        &self.trees
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, DepTree> {
        self.trees.iter()
    }

    pub fn into_trees(self) -> Vec<DepTree> {
        self.trees
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a DepTree;
    type IntoIter = core::slice::Iter<'a, DepTree>;

    fn into_iter(self) -> Self::IntoIter {
        self.trees.iter()
    }
}
