//! Text front-end: Hangul jamo decomposition and symbol vocabularies.

pub mod jamo;
pub mod vocab;

pub use jamo::{compose_hangul, decompose_hangul, Decomposed, JamoTriple};
pub use vocab::{SymbolVocabulary, TokenSequence, EOS_ID, EOS_SYMBOL, PAD_ID, PAD_SYMBOL};
