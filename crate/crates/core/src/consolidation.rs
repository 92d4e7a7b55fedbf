//! Validation of generative per-class completions and their consolidation
//! into one tag sequence per sentence.
//!
//! Each sentence is prompted once per class; every accepted completion
//! contributes one candidate tag sequence. Candidates are merged per token
//! position:
//!
//! * pessimistic: no class → `O`, one class → that class, several → `X`;
//! * optimistic: the gold label if it is among the options at that position,
//!   otherwise the pessimistic label. This needs gold labels and is only
//!   meaningful as an evaluation upper bound.
//!
//! In both modes B-/I- prefixes are re-derived by strict IOB2 encoding of the
//! resulting per-token class runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::class::{EntityClass, IobTag};
use crate::corpus::{check_token_alignment, AlignmentError, CorpusError, Document};
use crate::span::classes_to_tags;

#[derive(Debug, thiserror::Error)]
pub enum ConsolidationError {
    #[error("candidate for {class} has {found} tags, sentence has {expected} tokens")]
    CandidateLength {
        class: EntityClass,
        expected: usize,
        found: usize,
    },
    #[error("the conflict class X cannot be a prompt class")]
    ConflictKey,
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Why a completion was not accepted.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    #[error("too long: {chars} chars exceeds limit {limit}")]
    TooLong { chars: usize, limit: usize },
    #[error("token sequence mismatch: expected {expected} tokens, found {found}")]
    TokenSequenceMismatch { expected: usize, found: usize },
    #[error("unparseable annotation `{piece}`")]
    UnparseableAnnotation { piece: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionFormat {
    /// A completion may be at most this many times as long (in characters)
    /// as the space-joined input sentence.
    pub max_len_factor: f64,
    /// Separator between a token and its inline tag, e.g. `kann/B-Signalwort`.
    pub delimiter: char,
}

impl Default for CompletionFormat {
    fn default() -> Self {
        Self {
            max_len_factor: 3.0,
            delimiter: '/',
        }
    }
}

/// Checks one raw completion against the input sentence and extracts its
/// tag sequence.
///
/// The completion is split on whitespace; each piece is `token<delim>tag` or
/// a bare token, which counts as `O`. A piece whose suffix looks like a tag
/// (`B-…`/`I-…`) but names an unknown class, or the conflict class, is
/// unparseable.
pub fn validate_completion<S: AsRef<str>>(
    input_tokens: &[S],
    completion: &str,
    format: &CompletionFormat,
) -> Result<Vec<IobTag>, Rejection> {
    let input_chars =
        input_tokens.iter().map(|t| t.as_ref().chars().count()).sum::<usize>() + input_tokens.len().saturating_sub(1);
    let limit = (format.max_len_factor * input_chars as f64).floor() as usize;
    let chars = completion.trim().chars().count();
    if chars > limit {
        return Err(Rejection::TooLong { chars, limit });
    }

    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    for piece in completion.split_whitespace() {
        let (token, tag) = split_annotation(piece, format.delimiter)?;
        tokens.push(token);
        tags.push(tag);
    }

    let same = tokens.len() == input_tokens.len() && tokens.iter().zip(input_tokens).all(|(a, b)| *a == b.as_ref());
    if !same {
        return Err(Rejection::TokenSequenceMismatch {
            expected: input_tokens.len(),
            found: tokens.len(),
        });
    }
    Ok(tags)
}

fn split_annotation(piece: &str, delimiter: char) -> Result<(&str, IobTag), Rejection> {
    let Some((token, tag)) = piece.rsplit_once(delimiter) else {
        return Ok((piece, IobTag::Outside));
    };
    if token.is_empty() {
        return Ok((piece, IobTag::Outside));
    }
    match tag.parse::<IobTag>() {
        Ok(t) if t.class().is_some_and(EntityClass::is_conflict) => {
            Err(Rejection::UnparseableAnnotation { piece: piece.into() })
        }
        Ok(t) => Ok((token, t)),
        Err(_) if tag.starts_with("B-") || tag.starts_with("I-") => {
            Err(Rejection::UnparseableAnnotation { piece: piece.into() })
        }
        Err(_) => Ok((piece, IobTag::Outside)),
    }
}

/// Candidate tag sequences for one sentence, grouped by prompt class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionBundle {
    doc_id: String,
    tokens: Vec<String>,
    per_class: BTreeMap<EntityClass, Vec<Vec<IobTag>>>,
}

impl PredictionBundle {
    pub fn new(doc_id: impl Into<String>, tokens: Vec<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            tokens,
            per_class: BTreeMap::new(),
        }
    }

    pub fn for_document(doc: &Document) -> Self {
        Self::new(doc.id(), doc.texts().map(String::from).collect())
    }

    pub fn add_candidate(&mut self, class: EntityClass, tags: Vec<IobTag>) -> Result<(), ConsolidationError> {
        if class.is_conflict() {
            return Err(ConsolidationError::ConflictKey);
        }
        if tags.len() != self.tokens.len() {
            return Err(ConsolidationError::CandidateLength {
                class,
                expected: self.tokens.len(),
                found: tags.len(),
            });
        }
        self.per_class.entry(class).or_default().push(tags);
        Ok(())
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn per_class(&self) -> &BTreeMap<EntityClass, Vec<Vec<IobTag>>> {
        &self.per_class
    }

    pub fn candidate_count(&self) -> usize {
        self.per_class.values().map(Vec::len).sum()
    }

    fn candidates(&self) -> impl Iterator<Item = &Vec<IobTag>> {
        self.per_class.values().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsolidationMode {
    Optimistic,
    Pessimistic,
}

impl fmt::Display for ConsolidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConsolidationMode::Optimistic => "optimistic",
            ConsolidationMode::Pessimistic => "pessimistic",
        })
    }
}

/// What the candidates say about one token position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PositionVotes {
    pub classes: BTreeSet<EntityClass>,
    /// Some candidate tags this position `O`.
    pub outside_predicted: bool,
}

impl PositionVotes {
    /// `O` is an option when some candidate predicts it or when no candidate
    /// covers the position with a class.
    pub fn outside_is_option(&self) -> bool {
        self.outside_predicted || self.classes.is_empty()
    }

    pub fn offers(&self, label: Option<EntityClass>) -> bool {
        match label {
            None => self.outside_is_option(),
            Some(c) => self.classes.contains(&c),
        }
    }

    pub fn pessimistic(&self) -> Option<EntityClass> {
        let mut it = self.classes.iter();
        match (it.next(), it.next()) {
            (None, _) => None,
            (Some(&c), None) => Some(c),
            (Some(_), Some(_)) => Some(EntityClass::X),
        }
    }
}

pub fn position_votes(bundle: &PredictionBundle) -> Vec<PositionVotes> {
    let mut votes = vec![PositionVotes::default(); bundle.tokens.len()];
    for candidate in bundle.candidates() {
        for (v, tag) in votes.iter_mut().zip(candidate) {
            match tag.class() {
                Some(c) => {
                    v.classes.insert(c);
                }
                None => v.outside_predicted = true,
            }
        }
    }
    votes
}

pub fn consolidate_pessimistic(bundle: &PredictionBundle) -> Vec<IobTag> {
    let classes: Vec<Option<EntityClass>> = position_votes(bundle).iter().map(PositionVotes::pessimistic).collect();
    classes_to_tags(&classes)
}

pub fn consolidate_optimistic(bundle: &PredictionBundle, gold: &[IobTag]) -> Result<Vec<IobTag>, ConsolidationError> {
    if gold.len() != bundle.tokens.len() {
        return Err(AlignmentError::LengthMismatch {
            gold_len: gold.len(),
            pred_len: bundle.tokens.len(),
        }
        .into());
    }
    let classes: Vec<Option<EntityClass>> = position_votes(bundle)
        .iter()
        .zip(gold)
        .map(|(votes, g)| {
            let wanted = g.class();
            if votes.offers(wanted) {
                wanted
            } else {
                votes.pessimistic()
            }
        })
        .collect();
    Ok(classes_to_tags(&classes))
}

pub fn consolidate(
    bundle: &PredictionBundle,
    mode: ConsolidationMode,
    gold: &[IobTag],
) -> Result<Vec<IobTag>, ConsolidationError> {
    match mode {
        ConsolidationMode::Optimistic => consolidate_optimistic(bundle, gold),
        ConsolidationMode::Pessimistic => Ok(consolidate_pessimistic(bundle)),
    }
}

/// Gold, optimistic and pessimistic documents sharing the bundle's tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IobTriple {
    pub gold: Document,
    pub optimistic: Document,
    pub pessimistic: Document,
}

pub fn emit_iob_triple(bundle: &PredictionBundle, gold: &Document) -> Result<IobTriple, ConsolidationError> {
    check_token_alignment(
        gold.texts(),
        gold.len(),
        bundle.tokens.iter().map(String::as_str),
        bundle.tokens.len(),
    )?;
    let optimistic = gold.with_tags(consolidate_optimistic(bundle, gold.tags())?)?;
    let pessimistic = gold.with_tags(consolidate_pessimistic(bundle))?;
    Ok(IobTriple {
        gold: gold.with_tags(gold.tags().to_vec())?,
        optimistic,
        pessimistic,
    })
}

/// One completion file, `<doc_id>.<ClassName>.<k>.txt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionFile {
    pub doc_id: String,
    pub class: String,
    pub index: u32,
    pub path: PathBuf,
}

pub fn parse_completion_file_name(name: &str) -> Option<(String, String, u32)> {
    let stem = name.strip_suffix(".txt")?;
    let (rest, k) = stem.rsplit_once('.')?;
    let (doc_id, class) = rest.rsplit_once('.')?;
    if doc_id.is_empty() || class.is_empty() {
        return None;
    }
    Some((doc_id.to_string(), class.to_string(), k.parse().ok()?))
}

/// Lists completion files, sorted by (doc id, class, index). Files that do
/// not follow the naming scheme are returned separately.
pub fn list_completions(dir: &Path) -> Result<(Vec<CompletionFile>, Vec<PathBuf>), ConsolidationError> {
    let io_err = |source| ConsolidationError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    let mut unnamed = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if !path.is_file() {
            continue;
        }
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        match parse_completion_file_name(name) {
            Some((doc_id, class, index)) => files.push(CompletionFile {
                doc_id,
                class,
                index,
                path,
            }),
            None => unnamed.push(path),
        }
    }
    files.sort_by(|a, b| (&a.doc_id, &a.class, a.index).cmp(&(&b.doc_id, &b.class, b.index)));
    unnamed.sort();
    Ok((files, unnamed))
}

/// A rejected completion, for the rejection log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectionRecord {
    pub doc_id: String,
    pub class: String,
    pub index: u32,
    pub reason: String,
}

impl fmt::Display for RejectionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{} (completion {})",
            self.doc_id, self.class, self.reason, self.index
        )
    }
}

/// Builds the bundle for `doc` from its completion texts, given as
/// `(class name, index, text)`. Rejections are collected, never fatal.
pub fn build_bundle<'a>(
    doc: &Document,
    completions: impl IntoIterator<Item = (&'a str, u32, &'a str)>,
    format: &CompletionFormat,
) -> (PredictionBundle, Vec<RejectionRecord>) {
    let mut bundle = PredictionBundle::for_document(doc);
    let mut rejected = Vec::new();
    for (class_name, index, text) in completions {
        let reject = |reason: String| RejectionRecord {
            doc_id: doc.id().to_string(),
            class: class_name.to_string(),
            index,
            reason,
        };
        let class = match class_name.parse::<EntityClass>() {
            Ok(c) if !c.is_conflict() => c,
            _ => {
                rejected.push(reject(format!("unknown prompt class `{class_name}`")));
                continue;
            }
        };
        match validate_completion(&bundle.tokens, text, format) {
            Ok(tags) => bundle
                .add_candidate(class, tags)
                .expect("validated completion matches sentence length"),
            Err(e) => rejected.push(reject(e.to_string())),
        }
    }
    (bundle, rejected)
}
