use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use normner_core::consolidation::{build_bundle, emit_iob_triple, list_completions, CompletionFormat, RejectionRecord};
use normner_core::corpus::{
    list_corpus_dir, read_document, split_corpus, validate_alignment, write_document, Document, SplitConfig,
};
use normner_core::metrics::{evaluate, EvaluationResult, JaccardPopulation};
use normner_core::report::{f1_table, jaccard_table, Locale, TableFormat};
use normner_core::rules::{apply_ruleset, load_ruleset_file};
use normner_core::span::spans_to_tags;
use rayon::prelude::*;

use crate::{
    ApplyRulesArgs, CliError, ConsolidateArgs, EvaluateArgs, FormatArg, LocaleArg, PopulationArg, ReportArgs,
    SplitArgs, TableArg,
};

fn require_dir(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{what} directory {} does not exist",
            path.display()
        )))
    }
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(CliError::io(path))
}

fn read_dir_docs(dir: &Path) -> Result<Vec<(Document, PathBuf)>, CliError> {
    list_corpus_dir(dir)?
        .into_iter()
        .map(|(_, path)| Ok((read_document(&path)?, path)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSummary {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
}

/// Copies every document of `--in` into `out/{train,dev,test}` and writes
/// `out/manifest.tsv`. Existing non-empty split directories are refused.
pub fn cmd_split(args: &SplitArgs) -> Result<SplitSummary, CliError> {
    require_dir(&args.input, "input")?;
    let [train, dev, test] = args.ratios[..] else {
        return Err(CliError::Config("--ratios takes exactly three values".into()));
    };
    let cfg = SplitConfig::new(train, dev, test, args.seed)?;

    let docs = read_dir_docs(&args.input)?;
    let sources: BTreeMap<String, PathBuf> = docs.iter().map(|(d, p)| (d.id().to_string(), p.clone())).collect();
    let split = split_corpus(docs.into_iter().map(|(d, _)| d).collect(), &cfg)?;

    let parts = [("train", &split.train), ("dev", &split.dev), ("test", &split.test)];
    for (name, _) in &parts {
        let dir = args.out.join(name);
        if dir.is_dir() && fs::read_dir(&dir).map_err(CliError::io(&dir))?.next().is_some() {
            return Err(CliError::Config(format!("{} exists and is not empty", dir.display())));
        }
    }

    let mut manifest = format!(
        "# seed={} ratios={},{},{}\n",
        cfg.seed, cfg.train_ratio, cfg.dev_ratio, cfg.test_ratio
    );
    for (name, part) in &parts {
        let dir = args.out.join(name);
        create_dir(&dir)?;
        for doc in part.iter() {
            let src = &sources[doc.id()];
            let dst = dir.join(src.file_name().expect("listed corpus files have names"));
            fs::copy(src, &dst).map_err(CliError::io(&dst))?;
            manifest.push_str(&format!("{name}\t{}\n", doc.id()));
        }
    }
    let manifest_path = args.out.join("manifest.tsv");
    fs::write(&manifest_path, manifest).map_err(CliError::io(&manifest_path))?;

    let ids = |docs: &[Document]| docs.iter().map(|d| d.id().to_string()).collect();
    Ok(SplitSummary {
        train: ids(&split.train),
        dev: ids(&split.dev),
        test: ids(&split.test),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApplySummary {
    pub documents: usize,
    pub entities: usize,
}

/// Writes one prediction file per input document. Filter gazetteers are
/// built from the input directory itself.
pub fn cmd_apply_rules(args: &ApplyRulesArgs) -> Result<ApplySummary, CliError> {
    if !args.rules.is_file() {
        return Err(CliError::Config(format!(
            "rules file {} does not exist",
            args.rules.display()
        )));
    }
    let spec = load_ruleset_file(&args.rules)?;
    require_dir(&args.input, "input")?;
    let docs: Vec<Document> = read_dir_docs(&args.input)?.into_iter().map(|(d, _)| d).collect();
    let ruleset = spec.compile(&docs)?;
    create_dir(&args.out)?;

    let counts = docs
        .par_iter()
        .map(|doc| {
            let spans = apply_ruleset(&ruleset, doc);
            let pred = doc.with_tags(spans_to_tags(&spans, doc.len())?)?;
            write_document(&args.out, &pred)?;
            Ok(spans.len())
        })
        .collect::<Result<Vec<usize>, CliError>>()?;
    Ok(ApplySummary {
        documents: docs.len(),
        entities: counts.iter().sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsolidateSummary {
    pub documents: usize,
    pub accepted: usize,
    pub rejected: usize,
}

/// Writes `out/{gold,genai-opt,genai-pes}` and `out/rejections.log`.
pub fn cmd_consolidate(args: &ConsolidateArgs) -> Result<ConsolidateSummary, CliError> {
    require_dir(&args.gold, "gold")?;
    require_dir(&args.completions, "completions")?;
    if args.max_len_factor.is_nan() || args.max_len_factor <= 0.0 {
        return Err(CliError::Config("--max-len-factor must be positive".into()));
    }
    let format = CompletionFormat {
        max_len_factor: args.max_len_factor,
        delimiter: args.delimiter,
    };

    let docs: Vec<Document> = read_dir_docs(&args.gold)?.into_iter().map(|(d, _)| d).collect();
    let (files, unnamed) = list_completions(&args.completions)?;

    let mut rejections: Vec<RejectionRecord> = Vec::new();
    let mut texts: BTreeMap<String, Vec<(String, u32, String)>> = BTreeMap::new();
    for f in files {
        match fs::read_to_string(&f.path) {
            Ok(text) => texts.entry(f.doc_id).or_default().push((f.class, f.index, text)),
            Err(e) => rejections.push(RejectionRecord {
                doc_id: f.doc_id,
                class: f.class,
                index: f.index,
                reason: format!("unreadable: {e}"),
            }),
        }
    }
    let known: BTreeSet<&str> = docs.iter().map(Document::id).collect();
    for (doc_id, items) in &texts {
        if !known.contains(doc_id.as_str()) {
            rejections.extend(items.iter().map(|(class, index, _)| RejectionRecord {
                doc_id: doc_id.clone(),
                class: class.clone(),
                index: *index,
                reason: "no gold document with this id".into(),
            }));
        }
    }

    let dirs = ["gold", "genai-opt", "genai-pes"].map(|d| args.out.join(d));
    for d in &dirs {
        create_dir(d)?;
    }

    let per_doc = docs
        .par_iter()
        .map(|doc| {
            let items = texts.get(doc.id()).map(Vec::as_slice).unwrap_or_default();
            let (bundle, rejected) =
                build_bundle(doc, items.iter().map(|(c, k, t)| (c.as_str(), *k, t.as_str())), &format);
            let triple = emit_iob_triple(&bundle, doc)?;
            write_document(&dirs[0], &triple.gold)?;
            write_document(&dirs[1], &triple.optimistic)?;
            write_document(&dirs[2], &triple.pessimistic)?;
            Ok((bundle.candidate_count(), rejected))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut accepted = 0;
    for (n, rejected) in per_doc {
        accepted += n;
        rejections.extend(rejected);
    }
    rejections.sort_by(|a, b| (&a.doc_id, &a.class, a.index).cmp(&(&b.doc_id, &b.class, b.index)));

    let mut log = String::new();
    for path in &unnamed {
        log.push_str(&format!("{}\t-\tunrecognized completion file name\n", path.display()));
    }
    for r in &rejections {
        log.push_str(&format!("{r}\n"));
    }
    let log_path = args.out.join("rejections.log");
    fs::write(&log_path, log).map_err(CliError::io(&log_path))?;

    Ok(ConsolidateSummary {
        documents: docs.len(),
        accepted,
        rejected: rejections.len() + unnamed.len(),
    })
}

/// Pairs gold and prediction files by id, scores them and writes the result
/// JSON. Missing counterparts and misaligned pairs are all reported at once.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<EvaluationResult, CliError> {
    require_dir(&args.gold, "gold")?;
    require_dir(&args.pred, "prediction")?;
    let gold: BTreeMap<String, PathBuf> = list_corpus_dir(&args.gold)?.into_iter().collect();
    let pred: BTreeMap<String, PathBuf> = list_corpus_dir(&args.pred)?.into_iter().collect();

    let mut problems = Vec::new();
    for id in pred.keys().filter(|id| !gold.contains_key(*id)) {
        problems.push(format!("{id}: prediction has no gold counterpart"));
    }
    let mut pairs = Vec::new();
    for (id, gold_path) in &gold {
        let Some(pred_path) = pred.get(id) else {
            problems.push(format!("{id}: gold has no prediction counterpart"));
            continue;
        };
        let g = read_document(gold_path)?;
        let p = read_document(pred_path)?;
        if let Err(e) = validate_alignment(&g, &p) {
            problems.push(format!("{id}: {e}"));
            continue;
        }
        pairs.push((g, p));
    }
    if !problems.is_empty() {
        problems.sort();
        return Err(CliError::Evaluation(problems));
    }

    let system = match &args.system {
        Some(s) => s.clone(),
        None => args
            .pred
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "system".into()),
    };
    let population = match args.population {
        PopulationArg::Either => JaccardPopulation::Either,
        PopulationArg::GoldOnly => JaccardPopulation::GoldOnly,
    };
    let refs: Vec<(&Document, &Document)> = pairs.iter().map(|(g, p)| (g, p)).collect();
    let result = evaluate(&system, &refs, population)?;

    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let json = serde_json::to_string_pretty(&result).expect("evaluation results serialize");
    fs::write(&args.out, json + "\n").map_err(CliError::io(&args.out))?;
    Ok(result)
}

pub fn read_result_file(path: &Path) -> Result<EvaluationResult, CliError> {
    let text = fs::read_to_string(path).map_err(|source| match source.kind() {
        std::io::ErrorKind::NotFound => CliError::Config(format!("result file {} does not exist", path.display())),
        _ => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Renders the requested tables; also writes them to `--out` when given.
pub fn cmd_report(args: &ReportArgs) -> Result<String, CliError> {
    let results = args
        .files
        .iter()
        .map(|p| read_result_file(p))
        .collect::<Result<Vec<_>, _>>()?;
    let locale = match args.locale {
        LocaleArg::De => Locale::German,
        LocaleArg::En => Locale::English,
    };
    let format = match args.format {
        FormatArg::Md => TableFormat::Markdown,
        FormatArg::Csv => TableFormat::Csv,
    };

    let mut tables = Vec::new();
    if matches!(args.table, TableArg::F1 | TableArg::All) {
        tables.push(f1_table(&results, locale)?);
    }
    let has_jaccard = results.iter().any(|r| !r.jaccard.is_empty());
    if args.table == TableArg::Jaccard || (args.table == TableArg::All && has_jaccard) {
        tables.push(jaccard_table(&results, locale)?);
    }
    let rendered = tables
        .iter()
        .map(|t| t.render(format, locale))
        .collect::<Result<Vec<_>, _>>()?
        .join("\n");

    if let Some(out) = &args.out {
        fs::write(out, &rendered).map_err(CliError::io(out))?;
    }
    Ok(rendered)
}
