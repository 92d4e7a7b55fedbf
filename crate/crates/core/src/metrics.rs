//! Token-level precision/recall/F1 and per-document Jaccard statistics.
//!
//! Token-level scores compare class identity per position; B-/I- prefixes
//! are ignored and `O` is not a class. Span-level scores are the Jaccard
//! index of the sets of token positions carrying a class in gold and
//! prediction, aggregated over documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::class::{EntityClass, IobTag};
use crate::corpus::{validate_alignment, AlignmentError, Document};
use crate::span::token_index_set;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("document `{doc_id}`: {source}")]
    Alignment {
        doc_id: String,
        #[source]
        source: AlignmentError,
    },
    #[error("document id `{0}` appears more than once")]
    DuplicateDocument(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ClassCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, fp, fn_ }
    }

    /// Gold token count.
    pub fn support(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn predicted(&self) -> u64 {
        self.tp + self.fp
    }
}

impl std::ops::AddAssign for ClassCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: EntityClass,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(default)]
    pub support: u64,
}

impl ClassMetrics {
    pub fn from_counts(class: EntityClass, counts: &ClassCounts) -> Self {
        let s = prf(counts);
        Self {
            class,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
            support: counts.support(),
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1_from(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

pub fn prf(counts: &ClassCounts) -> Scores {
    let precision = ratio(counts.tp, counts.predicted());
    let recall = ratio(counts.tp, counts.support());
    Scores {
        precision,
        recall,
        f1: f1_from(precision, recall),
    }
}

/// Adds the token-level counts of one aligned tag pair into `table`.
fn accumulate(table: &mut BTreeMap<EntityClass, ClassCounts>, gold: &[IobTag], pred: &[IobTag]) {
    for (g, p) in gold.iter().zip(pred) {
        let (g, p) = (g.class(), p.class());
        if g == p {
            if let Some(c) = g {
                table.entry(c).or_default().tp += 1;
            }
            continue;
        }
        if let Some(c) = p {
            table.entry(c).or_default().fp += 1;
        }
        if let Some(c) = g {
            table.entry(c).or_default().fn_ += 1;
        }
    }
}

/// Per-class token counts for one aligned document pair. Classes absent from
/// both documents have no entry.
pub fn token_counts(gold: &Document, pred: &Document) -> Result<BTreeMap<EntityClass, ClassCounts>, AlignmentError> {
    validate_alignment(gold, pred)?;
    let mut table = BTreeMap::new();
    accumulate(&mut table, gold.tags(), pred.tags());
    Ok(table)
}

/// Pools counts over the ten real classes (plus `X` when asked) and scores
/// the totals.
pub fn micro_average(counts: &BTreeMap<EntityClass, ClassCounts>, include_conflict: bool) -> Scores {
    let mut total = ClassCounts::default();
    for (class, c) in counts {
        if include_conflict || !class.is_conflict() {
            total += *c;
        }
    }
    prf(&total)
}

/// Unweighted mean F1 over all ten real classes; missing classes count as 0.
pub fn macro_average(metrics: &BTreeMap<EntityClass, ClassMetrics>) -> f64 {
    let sum: f64 = EntityClass::REAL
        .iter()
        .map(|c| metrics.get(c).map_or(0.0, |m| m.f1))
        .sum();
    sum / EntityClass::REAL.len() as f64
}

/// Which documents enter a class's Jaccard population.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JaccardPopulation {
    /// The class occurs in gold or prediction. A prediction-only occurrence
    /// scores 0.
    #[default]
    Either,
    /// The class occurs in gold.
    GoldOnly,
}

/// Jaccard index of the position sets of `class`, or `None` when the
/// document is outside the population.
pub fn jaccard_of_tags(
    gold: &[IobTag],
    pred: &[IobTag],
    class: EntityClass,
    population: JaccardPopulation,
) -> Option<f64> {
    let g = token_index_set(gold, class);
    let p = token_index_set(pred, class);
    let counted = match population {
        JaccardPopulation::Either => !(g.is_empty() && p.is_empty()),
        JaccardPopulation::GoldOnly => !g.is_empty(),
    };
    if !counted {
        return None;
    }
    let union = g.union_len(&p);
    Some(if union == 0 {
        0.0
    } else {
        g.intersection_len(&p) as f64 / union as f64
    })
}

pub fn jaccard_per_doc(gold: &Document, pred: &Document, class: EntityClass) -> Result<Option<f64>, AlignmentError> {
    validate_alignment(gold, pred)?;
    Ok(jaccard_of_tags(
        gold.tags(),
        pred.tags(),
        class,
        JaccardPopulation::Either,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JaccardReport {
    pub class: EntityClass,
    pub mean: f64,
    #[serde(default)]
    pub median: f64,
    #[serde(default)]
    pub zero_overlap_count: usize,
    #[serde(default)]
    pub total_count: usize,
    /// Zero-overlap documents over counted documents: 0 is best, 1 worst.
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_doc: BTreeMap<String, f64>,
}

impl JaccardReport {
    /// Statistics over the given per-document scores. Sums run in doc-id
    /// order. An empty population reports 0 for mean, median and ratio.
    pub fn from_scores(class: EntityClass, per_doc: BTreeMap<String, f64>) -> Self {
        let total_count = per_doc.len();
        let zero_overlap_count = per_doc.values().filter(|s| **s == 0.0).count();
        let (mean, median, ratio) = if total_count == 0 {
            (0.0, 0.0, 0.0)
        } else {
            let mean = per_doc.values().sum::<f64>() / total_count as f64;
            (
                mean,
                median(per_doc.values().copied()),
                zero_overlap_count as f64 / total_count as f64,
            )
        };
        Self {
            class,
            mean,
            median,
            zero_overlap_count,
            total_count,
            ratio,
            per_doc,
        }
    }
}

/// Median; for an even count, the mean of the two central values.
pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

fn check_pair(gold: &Document, pred: &Document) -> Result<(), MetricsError> {
    validate_alignment(gold, pred).map_err(|source| MetricsError::Alignment {
        doc_id: gold.id().to_string(),
        source,
    })
}

pub fn jaccard_report<'a>(
    pairs: impl IntoIterator<Item = (&'a Document, &'a Document)>,
    class: EntityClass,
    population: JaccardPopulation,
) -> Result<JaccardReport, MetricsError> {
    let mut per_doc = BTreeMap::new();
    let mut seen = std::collections::BTreeSet::new();
    for (gold, pred) in pairs {
        check_pair(gold, pred)?;
        if !seen.insert(gold.id()) {
            return Err(MetricsError::DuplicateDocument(gold.id().to_string()));
        }
        if let Some(score) = jaccard_of_tags(gold.tags(), pred.tags(), class, population) {
            per_doc.insert(gold.id().to_string(), score);
        }
    }
    Ok(JaccardReport::from_scores(class, per_doc))
}

/// Scores for the conflict class, kept out of every average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub metrics: ClassMetrics,
    pub jaccard: JaccardReport,
}

/// Evaluation of one system over a corpus; the interchange format between
/// `evaluate` and `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationResult {
    pub system: String,
    #[serde(default)]
    pub documents: usize,
    #[serde(default)]
    pub population: JaccardPopulation,
    pub per_class: BTreeMap<EntityClass, ClassMetrics>,
    pub micro: Scores,
    pub macro_f1: f64,
    #[serde(default)]
    pub jaccard: BTreeMap<EntityClass, JaccardReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conflict: Option<ConflictReport>,
}

/// Token-level and Jaccard evaluation of aligned (gold, prediction) pairs.
pub fn evaluate<'a>(
    system: &str,
    pairs: &[(&'a Document, &'a Document)],
    population: JaccardPopulation,
) -> Result<EvaluationResult, MetricsError> {
    let mut sorted: Vec<(&Document, &Document)> = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.id().cmp(b.0.id()));

    let mut counts = BTreeMap::new();
    let mut per_doc: BTreeMap<EntityClass, BTreeMap<String, f64>> = BTreeMap::new();
    let mut conflict_seen = false;
    for w in sorted.windows(2) {
        if w[0].0.id() == w[1].0.id() {
            return Err(MetricsError::DuplicateDocument(w[0].0.id().to_string()));
        }
    }
    for (gold, pred) in &sorted {
        check_pair(gold, pred)?;
        accumulate(&mut counts, gold.tags(), pred.tags());
        conflict_seen |= gold
            .tags()
            .iter()
            .chain(pred.tags())
            .any(|t| t.class() == Some(EntityClass::X));
        for class in EntityClass::ALL {
            if let Some(score) = jaccard_of_tags(gold.tags(), pred.tags(), class, population) {
                per_doc.entry(class).or_default().insert(gold.id().to_string(), score);
            }
        }
    }

    let per_class: BTreeMap<EntityClass, ClassMetrics> = EntityClass::REAL
        .iter()
        .map(|&c| {
            (
                c,
                ClassMetrics::from_counts(c, &counts.get(&c).copied().unwrap_or_default()),
            )
        })
        .collect();
    let jaccard = EntityClass::REAL
        .iter()
        .map(|&c| (c, JaccardReport::from_scores(c, per_doc.remove(&c).unwrap_or_default())))
        .collect();
    let conflict = conflict_seen.then(|| ConflictReport {
        metrics: ClassMetrics::from_counts(
            EntityClass::X,
            &counts.get(&EntityClass::X).copied().unwrap_or_default(),
        ),
        jaccard: JaccardReport::from_scores(EntityClass::X, per_doc.remove(&EntityClass::X).unwrap_or_default()),
    });

    Ok(EvaluationResult {
        system: system.to_string(),
        documents: sorted.len(),
        population,
        micro: micro_average(&counts, false),
        macro_f1: macro_average(&per_class),
        per_class,
        jaccard,
        conflict,
    })
}
