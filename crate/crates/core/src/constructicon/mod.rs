//! Distributional constructicons.
//!
//! A constructicon is built from a stream of trees in two passes. The first
//! pass counts pattern occurrences and collects catena shapes (for chain
//! links); the frequency threshold and the context vocabulary are fixed from
//! those counts. The second pass counts, per sentence, how often each kept
//! pattern co-occurs with each context pattern. Both passes produce plain
//! integer tallies whose merge is associative and commutative, so sentence
//! order and parallel splitting cannot change the result.

mod build;
mod config;
mod vector;

pub use build::{
    build_constructicon, extract_sentence, shared_patterns, Constructicon, CooccurrenceTable,
    Entry, Inventory, PatternTally, Provenance, SentencePatterns,
};
pub use config::{ExtractionConfig, Weighting};
pub use vector::{cosine_distance, cosine_similarity, MeaningVector};

pub use crate::catena::MaxLen;
