//! Command-line front end: corpus splitting, rule application,
//! consolidation of generative completions, evaluation and report tables.

mod commands;
mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_apply_rules, cmd_consolidate, cmd_evaluate, cmd_report, cmd_split, read_result_file, ApplySummary,
    ConsolidateSummary, SplitSummary,
};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "normner", version, about = "NER tooling for German legal-norm corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition a corpus directory into train/dev/test.
    Split(SplitArgs),
    /// Tag every document of a directory with a JSON ruleset.
    ApplyRules(ApplyRulesArgs),
    /// Merge per-class generative completions into optimistic and pessimistic IOB files.
    Consolidate(ConsolidateArgs),
    /// Score a prediction directory against gold.
    Evaluate(EvaluateArgs),
    /// Render comparison tables from evaluation result files.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// train,dev,test
    #[arg(long, value_delimiter = ',', num_args = 3, default_value = "0.6,0.2,0.2")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ApplyRulesArgs {
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ConsolidateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    /// Directory of `<doc_id>.<Class>.<k>.txt` completion files.
    #[arg(long)]
    pub completions: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3.0)]
    pub max_len_factor: f64,
    /// Separator between a token and its tag in completions.
    #[arg(long, default_value_t = '/')]
    pub delimiter: char,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PopulationArg {
    /// Documents where the class occurs in gold or prediction.
    Either,
    /// Documents where the class occurs in gold.
    GoldOnly,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// System name in the result; defaults to the prediction directory name.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, value_enum, default_value = "either")]
    pub population: PopulationArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Md,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocaleArg {
    De,
    En,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    F1,
    Jaccard,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long, value_enum, default_value = "md")]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value = "en")]
    pub locale: LocaleArg,
    #[arg(long, value_enum, default_value = "all")]
    pub table: TableArg,
    /// Evaluation result JSON files, one column per file in the given order.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one subcommand and returns a short summary for the terminal.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Split(a) => {
            let s = cmd_split(&a)?;
            Ok(format!(
                "train {} / dev {} / test {} documents",
                s.train.len(),
                s.dev.len(),
                s.test.len()
            ))
        }
        Command::ApplyRules(a) => {
            let s = cmd_apply_rules(&a)?;
            Ok(format!("{} documents tagged, {} entities", s.documents, s.entities))
        }
        Command::Consolidate(a) => {
            let s = cmd_consolidate(&a)?;
            Ok(format!(
                "{} documents, {} completions accepted, {} rejected (see rejections.log)\n\
                 note: genai-opt is chosen with knowledge of gold and is for evaluation only",
                s.documents, s.accepted, s.rejected
            ))
        }
        Command::Evaluate(a) => {
            let r = cmd_evaluate(&a)?;
            Ok(format!(
                "{}: {} documents, micro F1 {:.4}, macro F1 {:.4}",
                r.system, r.documents, r.micro.f1, r.macro_f1
            ))
        }
        Command::Report(a) => {
            let text = cmd_report(&a)?;
            if a.out.is_none() {
                print!("{text}");
            }
            Ok(String::new())
        }
    }
}
