//! Seeded toy speakers.
//!
//! A [`GrammarTemplate`] generates gold-parsed corpora. A [`LearnerState`]
//! counts what it has seen and produces output by replaying attested trees
//! or, with probability `novelty`, by refilling an attested tree skeleton
//! from the learned lexicon.
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Uniform reals take the top 53 bits
//! of a draw; weighted choices invert the cumulative weight table. Sub-seeds
//! for batch `b` are the first SplitMix64 output for `seed ^ (b+1)·φ64`,
//! where `φ64 = 0x9E3779B97F4A7C15`. Identical seeds give bit-identical
//! corpora on every platform.

mod learner;
mod rng;
mod speaker;
mod template;

pub use learner::{LearnerState, TokenShape};
pub use rng::{derive_seed, SimRng, WeightedIndex};
pub use speaker::{run_speaker, simulate_speaker, SpeakerPlan, SpeakerRun};
pub use template::{generate_corpus, Filler, Fragment, FragmentNode, GrammarTemplate, Slot};
