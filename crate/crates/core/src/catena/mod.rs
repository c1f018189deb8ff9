//! Catenae of dependency trees and their rendering as construction patterns.
//!
//! A catena is a set of tokens connected through head–dependent edges. Each
//! catena is rendered at every combination of abstraction levels
//! (form, `_UPOS`, `@deprel`), and pairs of renderings of the same occurrence
//! that are node-wise ordered form the attested abstraction-chain links.

mod enumerate;
mod pattern;
pub(crate) mod render;

pub use enumerate::{enumerate_catenae, Catena, CatenaOptions, MaxLen, DEFAULT_CATENA_CAP};
pub use pattern::{Level, LevelSet, NodeLabel, Pattern};
pub use render::{abstract_catena, Abstraction, CatenaShape, ChainLinks, Rendering};
