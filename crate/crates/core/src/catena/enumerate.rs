use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::treebank::DepTree;

pub const DEFAULT_CATENA_CAP: usize = 100_000;

/// A connected set of tokens, ids in surface order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Catena(Vec<usize>);

impl Catena {
    /// Builds a catena from arbitrary ids; connectivity is not checked.
    pub fn from_ids(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Catena(ids)
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sent_id` followed by comma-joined token ids.
    pub fn display<'a>(&'a self, sent_id: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a str, &'a [usize]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} ", self.0)?;
                for (i, id) in self.1.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{id}")?;
                }
                Ok(())
            }
        }
        D(sent_id, &self.0)
    }
}

/// Serialized as the bound itself or `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaxLen {
    Bounded(usize),
    Unbounded,
}

impl MaxLen {
    pub fn admits(self, len: usize) -> bool {
        match self {
            MaxLen::Bounded(m) => len <= m,
            MaxLen::Unbounded => true,
        }
    }
}

impl fmt::Display for MaxLen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxLen::Bounded(m) => write!(f, "{m}"),
            MaxLen::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for MaxLen {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            MaxLen::Bounded(m) => s.serialize_u64(*m as u64),
            MaxLen::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for MaxLen {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Bound(u64),
            Word(alloc::string::String),
        }
        let parsed = match Repr::deserialize(d)? {
            Repr::Bound(n) => alloc::format!("{n}").parse(),
            Repr::Word(w) => w.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

impl core::str::FromStr for MaxLen {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unbounded" | "none" => Ok(MaxLen::Unbounded),
            n => match n.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(MaxLen::Bounded(m)),
                _ => Err(Error::InvalidConfig(alloc::format!(
                    "max_len must be a positive integer or \"unbounded\", got {n:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatenaOptions {
    pub max_len: MaxLen,
    pub exclude_punct: bool,
    /// Per-sentence limit on the number of catenae.
    pub cap: usize,
}

impl CatenaOptions {
    pub fn unbounded() -> Self {
        CatenaOptions {
            max_len: MaxLen::Unbounded,
            exclude_punct: false,
            cap: DEFAULT_CATENA_CAP,
        }
    }

    pub fn bounded(max_len: usize) -> Self {
        CatenaOptions {
            max_len: MaxLen::Bounded(max_len),
            ..CatenaOptions::unbounded()
        }
    }
}

/// Enumerates every catena of `tree` within the length bound.
///
/// Works bottom-up: the catenae whose topmost node is `v` are `{v}` joined
/// with any selection of catenae topped by `v`'s children. Each catena has a
/// unique topmost node, so the union over all nodes has no duplicates.
/// Excluded (punctuation) tokens neither appear in catenae nor connect them.
/// The result is sorted by id tuple.
pub fn enumerate_catenae(tree: &DepTree, opts: &CatenaOptions) -> Result<Vec<Catena>> {
    let n = tree.len();
    let children = tree.children();
    let excluded: Vec<bool> = tree
        .tokens()
        .iter()
        .map(|t| opts.exclude_punct && t.upos == "PUNCT")
        .collect();

    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([tree.root()]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        queue.extend(children[v - 1].iter().copied());
    }

    let overflow = || Error::CatenaOverflow {
        sent_id: tree.sent_id().into(),
        limit: opts.cap,
    };

    let mut rooted: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    let mut total = 0usize;
    for &v in order.iter().rev() {
        if excluded[v - 1] {
            continue;
        }
        let mut acc: Vec<Vec<usize>> = vec![vec![v]];
        for &c in &children[v - 1] {
            if excluded[c - 1] {
                continue;
            }
            let mut grown = Vec::new();
            for a in &acc {
                for s in &rooted[c - 1] {
                    if opts.max_len.admits(a.len() + s.len()) {
                        let mut joined = a.clone();
                        joined.extend_from_slice(s);
                        grown.push(joined);
                    }
                }
                if total + acc.len() + grown.len() > opts.cap {
                    return Err(overflow());
                }
            }
            acc.extend(grown);
        }
        total += acc.len();
        if total > opts.cap {
            return Err(overflow());
        }
        rooted[v - 1] = acc;
    }

    let mut out: Vec<Catena> = rooted.into_iter().flatten().map(Catena::from_ids).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
