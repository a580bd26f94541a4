//! Toolkit for Arabic grammatical error correction corpora: edit extraction
//! with merges and splits, error-type annotation and detection labels, a
//! bigram MLE corrector, and M²/GED scoring.

pub mod align;
pub mod annotate;
pub mod config;
pub mod corpus;
mod error;
pub mod eval;
pub mod mle;

pub use error::{Error, Result};

/// Version of the on-disk formats written by this crate.
pub const FORMAT_VERSION: &str = "1";
