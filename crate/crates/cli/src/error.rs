use std::path::PathBuf;

use normner_core::consolidation::ConsolidationError;
use normner_core::corpus::CorpusError;
use normner_core::metrics::MetricsError;
use normner_core::report::ReportError;
use normner_core::rules::RulesetError;
use normner_core::span::SpanError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or missing inputs.
    #[error("{0}")]
    Config(String),
    #[error("ruleset: {0}")]
    Ruleset(#[from] RulesetError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Consolidation(#[from] ConsolidationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error("{} document(s) could not be evaluated:\n  {}", .0.len(), .0.join("\n  "))]
    Evaluation(Vec<String>),
    #[error("{path}: not an evaluation result: {message}")]
    Schema { path: PathBuf, message: String },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 for configuration errors, 1 for data errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Ruleset(_) | CliError::Report(ReportError::NoResults) => 2,
            CliError::Corpus(CorpusError::InvalidRatios { .. }) => 2,
            _ => 1,
        }
    }
}
