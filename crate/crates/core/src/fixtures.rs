//! Shared test fixtures.

use crate::corpus::{parse_conll, Document};

/// Gold annotation of test sentence 1009 (36 tokens).
pub const SAMPLE_CONLL: &str = include_str!("../../../fixtures/1009.conll");

pub fn sample_sentence() -> Document {
    parse_conll(SAMPLE_CONLL, "1009").expect("fixture parses")
}
