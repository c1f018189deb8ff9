use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Abstraction level of a node label, ordered from most lexical to most schematic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Lex,
    Pos,
    Rel,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Lex, Level::Pos, Level::Rel];

    pub fn name(self) -> &'static str {
        match self {
            Level::Lex => "lex",
            Level::Pos => "pos",
            Level::Rel => "rel",
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lex" => Ok(Level::Lex),
            "pos" => Ok(Level::Pos),
            "rel" => Ok(Level::Rel),
            other => Err(Error::InvalidConfig(alloc::format!(
                "unknown level {other:?}"
            ))),
        }
    }
}

/// Subset of levels a node may be rendered at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelSet(u8);

impl LevelSet {
    pub const ALL: LevelSet = LevelSet(0b111);

    pub fn empty() -> Self {
        LevelSet(0)
    }

    pub fn only(level: Level) -> Self {
        LevelSet::empty().with(level)
    }

    pub fn with(self, level: Level) -> Self {
        LevelSet(self.0 | 1 << level as u8)
    }

    pub fn contains(self, level: Level) -> bool {
        self.0 & (1 << level as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Level> {
        Level::ALL.into_iter().filter(move |l| self.contains(*l))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
}

impl Default for LevelSet {
    fn default() -> Self {
        LevelSet::ALL
    }
}

impl fmt::Display for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            f.write_str(l.name())?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for LevelSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = LevelSet::empty();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            set = set.with(part.parse()?);
        }
        if set.is_empty() {
            return Err(Error::InvalidConfig("empty level set".into()));
        }
        Ok(set)
    }
}

impl Serialize for LevelSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LevelSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One node of a pattern: a surface form, `_UPOS`, or `@deprel`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeLabel {
    level: Level,
    value: String,
}

impl NodeLabel {
    pub fn lex(form: &str) -> Self {
        NodeLabel {
            level: Level::Lex,
            value: form.into(),
        }
    }

    pub fn pos(upos: &str) -> Self {
        let mut value = String::with_capacity(upos.len() + 1);
        value.push('_');
        value.push_str(upos);
        NodeLabel {
            level: Level::Pos,
            value,
        }
    }

    pub fn rel(deprel: &str) -> Self {
        let mut value = String::with_capacity(deprel.len() + 1);
        value.push('@');
        value.push_str(deprel);
        NodeLabel {
            level: Level::Rel,
            value,
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Rendered value including its level prefix.
    pub fn value(&self) -> &str {
        &self.value
    }

    fn encode_into(&self, out: &mut String) {
        let start = out.len();
        escape_into(&self.value, out);
        if self.level == Level::Lex && matches!(out[start..].chars().next(), Some('_' | '@' | '\\'))
        {
            out.insert(start, '\\');
        }
    }

    fn decode(raw: &str) -> Result<Self, Error> {
        let (level, body) = match raw.chars().next() {
            None => return Err(Error::MalformedPattern("empty label".into())),
            Some('\\') => (Level::Lex, &raw[1..]),
            Some('_') => (Level::Pos, raw),
            Some('@') => (Level::Rel, raw),
            Some(_) => (Level::Lex, raw),
        };
        let value = unescape(body)?;
        if value.is_empty() || (level != Level::Lex && value.len() < 2) {
            return Err(Error::MalformedPattern(raw.into()));
        }
        Ok(NodeLabel { level, value })
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.encode_into(&mut s);
        f.write_str(&s)
    }
}

fn escape_into(value: &str, out: &mut String) {
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ' ' => out.push_str("\\s"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
}

fn unescape(s: &str) -> Result<String, Error> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        out.push(match chars.next() {
            Some('\\') => '\\',
            Some('s') => ' ',
            Some('t') => '\t',
            Some('n') => '\n',
            Some('r') => '\r',
            _ => return Err(Error::MalformedPattern(s.into())),
        });
    }
    Ok(out)
}

/// A construction: node labels in surface order.
///
/// Stored in its serialized form (labels joined by single spaces), so the
/// derived ordering is the lexicographic order of the serialization.
/// Whitespace and backslashes inside labels are escaped, and lexical labels
/// that would read as `_`/`@` labels get a leading backslash.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(String);

impl Pattern {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a NodeLabel>) -> Self {
        let mut s = String::new();
        for (i, l) in labels.into_iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            l.encode_into(&mut s);
        }
        assert!(!s.is_empty(), "pattern needs at least one label");
        Pattern(s)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn labels(&self) -> Vec<NodeLabel> {
        self.0
            .split(' ')
            .map(|raw| NodeLabel::decode(raw).expect("pattern holds valid labels"))
            .collect()
    }

    pub fn levels(&self) -> Vec<Level> {
        self.labels().iter().map(NodeLabel::level).collect()
    }

    pub fn len(&self) -> usize {
        self.0.split(' ').count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(Error::MalformedPattern("empty pattern".into()));
        }
        for raw in s.split(' ') {
            NodeLabel::decode(raw)?;
        }
        Ok(Pattern(s.into()))
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
