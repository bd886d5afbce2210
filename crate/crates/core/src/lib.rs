//! Exact computations for D-sequence topologies on the integers.
//!
//! The crate works entirely in exact arithmetic: circle elements are reduced
//! rationals modulo 1, D-sequences are lazily extended divisibility chains of
//! big integers, and every topological statement is decided either exactly
//! (neighborhood membership) or explicitly relative to a finite window or
//! prefix (polars, hulls, convergence certificates).

pub mod analysis;
pub mod chars;
pub mod circle;
pub mod cli;
pub mod dseq;
pub mod error;
pub mod graev;
mod json;
pub mod topo;

pub use chars::Character;
pub use circle::CircleElem;
pub use dseq::{DSequence, DigitExpansion, GrowthTag, IndexSeq};
pub use error::{Error, Result};
pub use graev::{Certificate, GraevSpec, SearchCaps};
