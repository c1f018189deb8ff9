//! Line-oriented constructicon dumps.
//!
//! ```text
//! cxg-constructicon v1
//! stream <text>
//! checkpoint <n>
//! config max_len=3 min_freq=2 context_vocab_size=10000 weighting=raw exclude_punct=true levels=lex,pos,rel catena_cap=100000
//! vocab <K>
//! <pattern>                                  K lines, dimension order
//! entries <M>
//! <pattern>\t<frequency>\t<dim>:<weight> …   M lines, sorted by pattern
//! links <L>
//! <i>\t<j>                                   entry indices, less → more abstract
//! end
//! ```
//!
//! Weights are written with Rust's shortest round-trip float formatting, so
//! reading a dump gives back an identical constructicon.

use std::fmt::Write as _;
use std::path::Path;

use cxg_core::constructicon::{Entry, Provenance};
use cxg_core::{Constructicon, ExtractionConfig, MeaningVector, Pattern};

use crate::error::{CliError, Result};

pub const MAGIC: &str = "cxg-constructicon v1";

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('\n', "\\n")
        .replace('\r', "\\r")
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

pub fn config_line(cfg: &ExtractionConfig) -> String {
    format!(
        "max_len={} min_freq={} context_vocab_size={} weighting={} exclude_punct={} levels={} catena_cap={}",
        cfg.max_len, cfg.min_freq, cfg.context_vocab_size, cfg.weighting, cfg.exclude_punct, cfg.levels, cfg.catena_cap
    )
}

fn parse_config(s: &str) -> std::result::Result<ExtractionConfig, String> {
    let mut cfg = ExtractionConfig::default();
    let mut seen = std::collections::BTreeSet::new();
    for item in s.split_whitespace() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("config item {item:?} lacks '='"))?;
        if !seen.insert(k) {
            return Err(format!("config key {k} repeated"));
        }
        let bad = |e: &dyn std::fmt::Display| format!("config {k}: {e}");
        match k {
            "max_len" => cfg.max_len = v.parse().map_err(|e| bad(&e))?,
            "min_freq" => cfg.min_freq = v.parse().map_err(|e| bad(&e))?,
            "context_vocab_size" => cfg.context_vocab_size = v.parse().map_err(|e| bad(&e))?,
            "weighting" => cfg.weighting = v.parse().map_err(|e| bad(&e))?,
            "exclude_punct" => cfg.exclude_punct = v.parse().map_err(|e| bad(&e))?,
            "levels" => cfg.levels = v.parse().map_err(|e| bad(&e))?,
            "catena_cap" => cfg.catena_cap = v.parse().map_err(|e| bad(&e))?,
            other => return Err(format!("unknown config key {other}")),
        }
    }
    if seen.len() != 7 {
        return Err("config line is incomplete".into());
    }
    Ok(cfg)
}

pub fn write_constructicon(c: &Constructicon) -> String {
    let mut out = String::new();
    let p = c.provenance();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "stream {}", escape(&p.stream)).unwrap();
    writeln!(out, "checkpoint {}", p.checkpoint).unwrap();
    writeln!(out, "config {}", config_line(c.config())).unwrap();
    writeln!(out, "vocab {}", c.context_vocab().len()).unwrap();
    for v in c.context_vocab() {
        writeln!(out, "{v}").unwrap();
    }
    writeln!(out, "entries {}", c.len()).unwrap();
    for e in c.entries() {
        write!(out, "{}\t{}\t", e.pattern, e.frequency).unwrap();
        for (k, (dim, w)) in e.vector.weights().iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{dim}:{w}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "links {}", c.chain_link_indices().len()).unwrap();
    for (i, j) in c.chain_link_indices() {
        writeln!(out, "{i}\t{j}").unwrap();
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> std::result::Result<&'a str, String> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l)
            }
            None => Err("unexpected end of file".into()),
        }
    }

    fn keyed(&mut self, key: &str) -> std::result::Result<&'a str, String> {
        let l = self.next()?;
        l.strip_prefix(key)
            .and_then(|r| {
                r.strip_prefix(' ')
                    .or(if r.is_empty() { Some("") } else { None })
            })
            .ok_or_else(|| format!("expected `{key} …`"))
    }

    fn count(&mut self, key: &str) -> std::result::Result<usize, String> {
        let v = self.keyed(key)?;
        v.parse()
            .map_err(|_| format!("{key} count {v:?} is not an integer"))
    }
}

fn parse_inner(lines: &mut Lines<'_>) -> std::result::Result<Constructicon, String> {
    if lines.next()? != MAGIC {
        return Err(format!(
            "not a constructicon dump (expected header `{MAGIC}`)"
        ));
    }
    let stream = unescape(lines.keyed("stream")?);
    let checkpoint = lines.keyed("checkpoint")?;
    let checkpoint: u32 = checkpoint
        .parse()
        .map_err(|_| format!("checkpoint {checkpoint:?} is not an integer"))?;
    let config = parse_config(lines.keyed("config")?)?;

    let n_vocab = lines.count("vocab")?;
    let mut vocab = Vec::with_capacity(n_vocab);
    for _ in 0..n_vocab {
        vocab.push(
            lines
                .next()?
                .parse::<Pattern>()
                .map_err(|e| e.to_string())?,
        );
    }
    let n_entries = lines.count("entries")?;
    let mut entries = Vec::with_capacity(n_entries);
    for _ in 0..n_entries {
        let l = lines.next()?;
        let mut cols = l.split('\t');
        let (Some(p), Some(f), Some(v), None) =
            (cols.next(), cols.next(), cols.next(), cols.next())
        else {
            return Err("entry lines have three tab-separated columns".into());
        };
        let pattern: Pattern = p.parse().map_err(|e: cxg_core::Error| e.to_string())?;
        let frequency: u64 = f
            .parse()
            .map_err(|_| format!("frequency {f:?} is not an integer"))?;
        let mut pairs = Vec::new();
        for item in v.split(' ').filter(|s| !s.is_empty()) {
            let (d, w) = item
                .split_once(':')
                .ok_or_else(|| format!("vector item {item:?} lacks ':'"))?;
            let d: u32 = d
                .parse()
                .map_err(|_| format!("dimension {d:?} is not an integer"))?;
            let w: f64 = w
                .parse()
                .map_err(|_| format!("weight {w:?} is not a number"))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(format!("weight {w} must be positive and finite"));
            }
            if pairs.last().is_some_and(|&(prev, _)| prev >= d) {
                return Err("vector dimensions must be strictly increasing".into());
            }
            pairs.push((d, w));
        }
        entries.push(Entry {
            pattern,
            frequency,
            vector: MeaningVector::from_pairs(pairs),
        });
    }
    let n_links = lines.count("links")?;
    let mut links = Vec::with_capacity(n_links);
    for _ in 0..n_links {
        let l = lines.next()?;
        let (i, j) = l.split_once('\t').ok_or("link lines are `i<TAB>j`")?;
        let i: usize = i
            .parse()
            .map_err(|_| format!("link index {i:?} is not an integer"))?;
        let j: usize = j
            .parse()
            .map_err(|_| format!("link index {j:?} is not an integer"))?;
        links.push((i, j));
    }
    if lines.next()? != "end" {
        return Err("expected `end`".into());
    }
    Constructicon::from_parts(
        config,
        Provenance { stream, checkpoint },
        entries,
        vocab,
        links,
    )
    .map_err(|e| e.to_string())
}

pub fn parse_constructicon(text: &str) -> std::result::Result<Constructicon, (usize, String)> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let c = parse_inner(&mut lines).map_err(|e| (lines.last, e))?;
    if let Ok(extra) = lines.next() {
        if !extra.trim().is_empty() {
            return Err((lines.last, "content after `end`".into()));
        }
    }
    Ok(c)
}

pub fn read_constructicon(path: &Path) -> Result<Constructicon> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_constructicon(&text)
        .map_err(|(line, msg)| CliError::format(path, format!("line {line}: {msg}")))
}

pub fn write_constructicon_file(path: &Path, c: &Constructicon) -> Result<()> {
    crate::write_file(path, write_constructicon(c).as_bytes())
}
