//! Named-entity recognition support for German legal-norm sentences:
//! CoNLL corpus I/O, IOB span handling, a rule engine with gazetteers,
//! consolidation of generative per-class predictions, token and Jaccard
//! metrics, and cross-system comparison tables.

pub mod class;
pub mod consolidation;
pub mod corpus;
pub mod metrics;
pub mod report;
pub mod rules;
pub mod span;

#[cfg(test)]
mod fixtures;

pub use class::{EntityClass, IobTag, TagParseError, UnknownClass};
pub use consolidation::{
    consolidate, consolidate_optimistic, consolidate_pessimistic, emit_iob_triple, CompletionFormat,
    ConsolidationError, ConsolidationMode, IobTriple, PredictionBundle, Rejection,
};
pub use corpus::{
    parse_conll, split_corpus, validate_alignment, write_conll, AlignmentError, CorpusError, CorpusSplit, Document,
    SplitConfig, Token,
};
pub use metrics::{evaluate, ClassCounts, ClassMetrics, EvaluationResult, JaccardPopulation, JaccardReport, Scores};
pub use report::{ComparisonTable, Locale, TableFormat};
pub use rules::{apply_ruleset, compile_ruleset, CompiledRuleset, RulesetError};
pub use span::{spans_to_tags, tags_to_spans, EntitySpan, SpanError, TokenIndexSet};
