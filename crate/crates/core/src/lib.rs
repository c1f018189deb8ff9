//! Catena-based construction extraction and learner analyses.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - dependency trees and their validation ([`treebank`]),
//! - catena enumeration and multi-level pattern rendering ([`catena`]),
//! - distributional constructicons and the cosine distance ([`constructicon`]),
//! - distributional shift along abstraction chains over checkpoints ([`shift`]),
//! - core/periphery analysis over a population of speakers ([`population`]),
//! - a seeded toy speaker that learns from and generates dependency trees ([`sim`]),
//! - the Kruskal-Wallis test and chi-square tail ([`stats`]).
//!
//! File formats, parallel drivers and the command-line tool live in the
//! companion `cxg` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catena;
pub mod constructicon;
pub mod error;
pub mod population;
pub mod shift;
pub mod sim;
pub mod stats;
pub mod treebank;

pub use catena::{Catena, Level, LevelSet, NodeLabel, Pattern};
pub use constructicon::{
    build_constructicon, shared_patterns, Constructicon, ExtractionConfig, MaxLen, MeaningVector,
    Weighting,
};
pub use error::{Error, Result, TreeError};
pub use treebank::{Corpus, DepTree, Token};
