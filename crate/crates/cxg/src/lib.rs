//! File formats, parallel drivers and the `cxg` command-line tool built on
//! [`cxg_core`].
//!
//! | format | module |
//! |---|---|
//! | CoNLL-U treebanks | [`conllu`] |
//! | grammar templates (TOML) | [`template`] |
//! | constructicon dumps (`cxg-constructicon v1`) | [`dump`] |
//! | TSV / CSV / JSON tables | [`tables`] |
//! | run configuration (TOML) | [`config`] |

pub mod cli;
pub mod config;
pub mod conllu;
pub mod dump;
pub mod error;
pub mod parallel;
pub mod pipeline;
pub mod tables;
pub mod template;

pub use error::{CliError, Result};

use std::path::Path;

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    std::fs::write(path, bytes).map_err(CliError::io(path))
}
