use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::enumerate::Catena;
use super::pattern::{Level, LevelSet, NodeLabel, Pattern};
use crate::error::{Error, Result};
use crate::treebank::DepTree;

/// The three labels of each node of one catena occurrence, in surface order.
///
/// Two occurrences with the same shape render to the same patterns and
/// attest the same chain links, so extraction only needs to keep shapes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CatenaShape {
    nodes: Vec<[NodeLabel; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendering {
    pub levels: Vec<Level>,
    pub pattern: Pattern,
}

impl CatenaShape {
    pub fn of(tree: &DepTree, catena: &Catena) -> Self {
        let nodes = catena
            .ids()
            .iter()
            .map(|&id| {
                let t = tree.token(id);
                let rel = if t.is_root() {
                    "root"
                } else {
                    t.deprel.as_str()
                };
                [
                    NodeLabel::lex(&t.form),
                    NodeLabel::pos(&t.upos),
                    NodeLabel::rel(rel),
                ]
            })
            .collect();
        CatenaShape { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Every rendering with node levels drawn from `levels`, in odometer
    /// order (last node varies fastest, LEX before POS before REL).
    pub fn renderings(&self, levels: LevelSet) -> Vec<Rendering> {
        let choices: Vec<Level> = levels.iter().collect();
        let k = self.nodes.len();
        if choices.is_empty() || k == 0 {
            return Vec::new();
        }
        let total = choices.len().pow(k as u32);
        let mut out = Vec::with_capacity(total);
        let mut digits = alloc::vec![0usize; k];
        for _ in 0..total {
            let lv: Vec<Level> = digits.iter().map(|&d| choices[d]).collect();
            let labels = self.nodes.iter().zip(&lv).map(|(n, &l)| &n[l as usize]);
            out.push(Rendering {
                pattern: Pattern::from_labels(labels),
                levels: lv,
            });
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < choices.len() {
                    break;
                }
                *d = 0;
            }
        }
        out
    }

    /// Ordered pairs of renderings where the first is node-wise no more
    /// abstract than the second and strictly less abstract somewhere.
    pub fn chain_links(&self, levels: LevelSet) -> Vec<(Pattern, Pattern)> {
        let r = self.renderings(levels);
        link_indices(&r)
            .into_iter()
            .map(|(i, j)| (r[i].pattern.clone(), r[j].pattern.clone()))
            .collect()
    }
}

/// `a` is a strictly less abstract rendering than `b`.
pub(crate) fn less_abstract(a: &[Level], b: &[Level]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y) && a != b
}

fn link_indices(r: &[Rendering]) -> Vec<(usize, usize)> {
    let mut links = Vec::new();
    for (i, a) in r.iter().enumerate() {
        for (j, b) in r.iter().enumerate() {
            if less_abstract(&a.levels, &b.levels) && a.pattern != b.pattern {
                links.push((i, j));
            }
        }
    }
    links
}

/// All level renderings of one catena and the chain links among them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abstraction {
    pub renderings: Vec<Rendering>,
    /// Index pairs into `renderings`.
    pub links: Vec<(usize, usize)>,
}

impl Abstraction {
    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.renderings.iter().map(|r| &r.pattern)
    }

    pub fn link_patterns(&self) -> impl Iterator<Item = (&Pattern, &Pattern)> {
        self.links
            .iter()
            .map(|&(i, j)| (&self.renderings[i].pattern, &self.renderings[j].pattern))
    }
}

/// Renders a k-node catena at all 3^k level combinations.
pub fn abstract_catena(tree: &DepTree, catena: &Catena) -> Abstraction {
    abstract_shape(&CatenaShape::of(tree, catena), LevelSet::ALL)
}

pub(crate) fn abstract_shape(shape: &CatenaShape, levels: LevelSet) -> Abstraction {
    let renderings = shape.renderings(levels);
    let links = link_indices(&renderings);
    Abstraction { renderings, links }
}

/// Attested abstraction-chain links.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainLinks {
    known: BTreeSet<Pattern>,
    links: BTreeSet<(Pattern, Pattern)>,
}

impl ChainLinks {
    pub fn new() -> Self {
        ChainLinks::default()
    }

    pub fn record(&mut self, abstraction: &Abstraction) {
        self.known.extend(abstraction.patterns().cloned());
        for (a, b) in abstraction.link_patterns() {
            self.links.insert((a.clone(), b.clone()));
        }
    }

    pub fn merge(&mut self, other: ChainLinks) {
        self.known.extend(other.known);
        self.links.extend(other.links);
    }

    pub fn knows(&self, p: &Pattern) -> bool {
        self.known.contains(p)
    }

    /// Whether `(p1, p2)` was attested by a shared catena occurrence.
    pub fn is_chain(&self, p1: &Pattern, p2: &Pattern) -> Result<bool> {
        for p in [p1, p2] {
            if !self.known.contains(p) {
                return Err(Error::UnknownPattern(p.to_string()));
            }
        }
        Ok(p1 != p2 && self.links.contains(&(p1.clone(), p2.clone())))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Pattern, Pattern)> {
        self.links.iter()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::tests::mary;
    use crate::treebank::Token;
    use alloc::vec;
    use alloc::vec::Vec;

    fn pats(a: &Abstraction) -> Vec<&str> {
        a.patterns().map(Pattern::as_str).collect()
    }

    #[test]
    fn mary_had_renders_nine_ways() {
        let a = abstract_catena(&mary(), &Catena::from_ids(vec![1, 2]));
        assert_eq!(
            pats(&a),
            vec![
                "Mary had",
                "Mary _VERB",
                "Mary @root",
                "_NOUN had",
                "_NOUN _VERB",
                "_NOUN @root",
                "@nsubj had",
                "@nsubj _VERB",
                "@nsubj @root",
            ]
        );
        // 6^2 - 3^2 ordered pairs
        assert_eq!(a.links.len(), 27);
    }

    #[test]
    fn lamb_links() {
        let a = abstract_catena(&mary(), &Catena::from_ids(vec![5]));
        assert_eq!(pats(&a), vec!["lamb", "_NOUN", "@dobj"]);
        let links: Vec<(&str, &str)> = a
            .link_patterns()
            .map(|(x, y)| (x.as_str(), y.as_str()))
            .collect();
        assert_eq!(
            links,
            vec![("lamb", "_NOUN"), ("lamb", "@dobj"), ("_NOUN", "@dobj")]
        );
    }

    #[test]
    fn ditransitive_chain_is_attested() {
        let t = DepTree::new(
            "give",
            vec![
                Token::new(1, "she", "she", "PRON", 2, "nsubj"),
                Token::new(2, "gave", "GIVE", "VERB", 0, "root"),
                Token::new(3, "him", "he", "PRON", 2, "iobj"),
                Token::new(4, "books", "book", "NOUN", 2, "dobj"),
            ],
        )
        .unwrap();
        let mut store = ChainLinks::new();
        store.record(&abstract_catena(&t, &Catena::from_ids(vec![1, 2, 3, 4])));
        let ki: Pattern = "@nsubj gave @iobj @dobj".parse().unwrap();
        let kj: Pattern = "@nsubj @root @iobj @dobj".parse().unwrap();
        assert!(store.is_chain(&ki, &kj).unwrap());
        assert!(!store.is_chain(&kj, &ki).unwrap());
        assert!(!store.is_chain(&ki, &ki).unwrap());
        let unknown: Pattern = "the dog".parse().unwrap();
        assert!(matches!(
            store.is_chain(&unknown, &kj),
            Err(Error::UnknownPattern(_))
        ));
    }

    #[test]
    fn restricted_levels() {
        let shape = CatenaShape::of(&mary(), &Catena::from_ids(vec![3, 4, 5]));
        let lex = shape.renderings(LevelSet::only(Level::Lex));
        assert_eq!(lex.len(), 1);
        assert_eq!(lex[0].pattern.as_str(), "a little lamb");
        assert!(shape.chain_links(LevelSet::only(Level::Lex)).is_empty());
        let two = LevelSet::only(Level::Lex).with(Level::Rel);
        assert_eq!(shape.renderings(two).len(), 8);
    }
}
