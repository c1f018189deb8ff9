//! CoNLL-U reading and writing.
//!
//! Only ID, FORM, LEMMA, UPOS, HEAD and DEPREL are read. Multiword-token
//! ranges (`3-4`) and empty nodes (`5.1`) are skipped. Sentences without a
//! `# sent_id = …` comment are named by their 1-based position in the file.

use std::fmt::Write as _;

use cxg_core::{Corpus, DepTree, Error, Token};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseOptions {
    /// Abort on the first invalid sentence instead of skipping it.
    pub strict: bool,
    /// Cut relation subtypes: `nsubj:pass` becomes `nsubj`.
    pub truncate_subtypes: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            strict: true,
            truncate_subtypes: true,
        }
    }
}

/// Parsed corpus plus the sentences dropped in permissive mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub corpus: Corpus,
    /// `(line of the sentence's first token, reason)`.
    pub skipped: Vec<(usize, String)>,
}

struct Pending {
    sent_id: Option<String>,
    first_line: usize,
    tokens: Vec<Token>,
}

fn column_error(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_token(line_no: usize, line: &str, opts: &ParseOptions) -> Result<Option<Token>> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(column_error(
            line_no,
            format!("expected 10 tab-separated columns, found {}", cols.len()),
        ));
    }
    let id = cols[0];
    if id.contains('-') || id.contains('.') {
        return Ok(None);
    }
    let id: usize = id
        .parse()
        .map_err(|_| column_error(line_no, format!("ID {id:?} is not an integer")))?;
    let head: usize = cols[6]
        .parse()
        .map_err(|_| column_error(line_no, format!("HEAD {:?} is not an integer", cols[6])))?;
    let mut deprel = cols[7];
    if opts.truncate_subtypes {
        if let Some((base, _)) = deprel.split_once(':') {
            deprel = base;
        }
    }
    Ok(Some(Token::new(
        id, cols[1], cols[2], cols[3], head, deprel,
    )))
}

/// Parses CoNLL-U text into a corpus named `source`.
pub fn parse_conllu(text: &str, source: &str, opts: &ParseOptions) -> Result<Parsed> {
    let mut corpus = Corpus::empty(source);
    let mut skipped = Vec::new();
    let mut pending: Option<Pending> = None;
    let mut ordinal = 0usize;

    let finish = |p: Pending,
                  ordinal: usize,
                  corpus: &mut Corpus,
                  skipped: &mut Vec<(usize, String)>|
     -> Result<()> {
        let sent_id = p.sent_id.unwrap_or_else(|| ordinal.to_string());
        let outcome = DepTree::new(sent_id, p.tokens).and_then(|t| corpus.push(t));
        match outcome {
            Ok(()) => Ok(()),
            Err(e) if opts.strict => Err(CliError::Invalid {
                line: p.first_line,
                source: e,
            }),
            Err(e) => {
                log::warn!("{source}: line {}: skipping sentence: {e}", p.first_line);
                skipped.push((p.first_line, e.to_string()));
                Ok(())
            }
        }
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if let Some(p) = pending.take() {
                ordinal += 1;
                finish(p, ordinal, &mut corpus, &mut skipped)?;
            }
            continue;
        }
        let p = pending.get_or_insert_with(|| Pending {
            sent_id: None,
            first_line: line_no,
            tokens: Vec::new(),
        });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    p.sent_id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        if let Some(tok) = parse_token(line_no, line, opts)? {
            if p.tokens.is_empty() {
                p.first_line = line_no;
            }
            p.tokens.push(tok);
        }
    }
    if let Some(p) = pending.take() {
        ordinal += 1;
        finish(p, ordinal, &mut corpus, &mut skipped)?;
    }
    Ok(Parsed { corpus, skipped })
}

/// Reads a CoNLL-U file; the path becomes the corpus source.
pub fn read_conllu(path: &std::path::Path, opts: &ParseOptions) -> Result<Parsed> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_conllu(&text, &path.display().to_string(), opts).map_err(|e| CliError::InFile {
        path: path.into(),
        source: Box::new(e),
    })
}

/// Writes one `# sent_id` comment and ten columns per token; unread columns are `_`.
pub fn write_conllu(corpus: &Corpus) -> String {
    let mut out = String::new();
    for tree in corpus {
        writeln!(out, "# sent_id = {}", tree.sent_id()).unwrap();
        for t in tree.tokens() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
                t.id, t.form, t.lemma, t.upos, t.head, t.deprel
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

/// True when every field of `corpus` survives a write/parse round trip.
pub fn is_writable(corpus: &Corpus) -> std::result::Result<(), Error> {
    for tree in corpus {
        for t in tree.tokens() {
            for (name, value) in [
                ("form", &t.form),
                ("lemma", &t.lemma),
                ("upos", &t.upos),
                ("deprel", &t.deprel),
            ] {
                if value.contains(['\t', '\n', '\r']) {
                    return Err(Error::InvalidConfig(format!(
                        "sentence {} token {}: {name} contains a tab or line break",
                        tree.sent_id(),
                        t.id
                    )));
                }
            }
        }
    }
    Ok(())
}
