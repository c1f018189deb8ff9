//! Grammar templates stored as TOML.
//!
//! ```toml
//! seed = 7                      # optional default seed
//!
//! [slots.N]                     # one table per slot
//! fillers = [
//!   { form = "dog", upos = "NOUN", weight = 3.0 },
//!   { form = "cats", upos = "NOUN", lemma = "cat" },   # weight defaults to 1
//! ]
//!
//! [[fragment]]                  # a weighted tree skeleton
//! name = "bark"
//! weight = 2.0
//! nodes = [                     # surface order; head is a 1-based position, 0 = root
//!   { slot = "N", deprel = "nsubj", head = 2 },
//!   { slot = "V", deprel = "root", head = 0 },
//! ]
//! ```

use std::path::Path;

use cxg_core::sim::GrammarTemplate;

use crate::error::{CliError, Result};

pub fn parse_template(text: &str) -> std::result::Result<GrammarTemplate, String> {
    let t: GrammarTemplate = toml::from_str(text).map_err(|e| e.to_string())?;
    t.validate().map_err(|e| e.to_string())?;
    Ok(t)
}

pub fn load_template(path: &Path) -> Result<GrammarTemplate> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(CliError::TemplateNotFound(path.into()))
        }
        Err(e) => return Err(CliError::io(path)(e)),
    };
    parse_template(&text).map_err(|msg| CliError::format(path, msg))
}

/// The bundled demonstration grammar.
pub const DEMO_TEMPLATE: &str = include_str!("../templates/demo.toml");

pub fn demo_template() -> GrammarTemplate {
    parse_template(DEMO_TEMPLATE).expect("bundled template is valid")
}
