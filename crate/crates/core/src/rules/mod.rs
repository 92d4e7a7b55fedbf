//! Rule-based recognizer: token patterns over surface attributes, phrase
//! patterns, gazetteers and deterministic overlap resolution.
//!
//! Patterns only see token surface forms. There is no access to
//! part-of-speech, dependency or phrase-structure information, so patterns
//! for clause-level classes are bounded in depth by construction.

mod file;
mod gazetteer;
mod matcher;
mod resolve;

use std::collections::HashMap;
use std::path::PathBuf;

pub use file::{load_ruleset_file, parse_ruleset_json, RulesetSpec};
pub use gazetteer::{
    build_dynamic_gazetteer, parse_word_list, FilterPredicate, FilterSpec, GazetteerSource, GazetteerSpec,
};
pub use matcher::{is_digit, is_title, match_sequence, Attribute, Quantifier, TokenMatcher, TokenView};
pub use resolve::{resolve_overlaps, Candidate};

use crate::class::EntityClass;
use crate::corpus::Document;
use crate::span::EntitySpan;

#[derive(Debug, thiserror::Error)]
pub enum RulesetError {
    #[error("pattern `{pattern_id}`: invalid regex: {message}")]
    BadRegex { pattern_id: String, message: String },
    #[error("gazetteer for {0} has no entries")]
    EmptyGazetteer(EntityClass),
    #[error("pattern `{0}` has no matchers")]
    EmptyPattern(String),
    #[error("pattern `{0}` can match an empty span; at least one matcher must be ONE or ONE_OR_MORE")]
    MatchesEmpty(String),
    #[error("pattern `{0}`: IN_LIST needs at least one value")]
    EmptyInList(String),
    #[error("phrase pattern {index} is empty or has a token containing whitespace")]
    BadPhrase { index: usize },
    #[error("a filter needs at least one predicate")]
    EmptyFilter,
    #[error("rules may not produce the conflict class X")]
    ConflictClass,
    #[error("pattern `{pattern_id}`: {message}")]
    BadValue { pattern_id: String, message: String },
    #[error("ruleset JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Where a pattern came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    #[default]
    Static,
    DerivedFromDev,
    DerivedFromModelGazetteer,
}

#[derive(Debug, Clone)]
pub struct TokenPattern {
    pub id: String,
    pub class: EntityClass,
    pub matchers: Vec<TokenMatcher>,
    /// Lower is stronger.
    pub priority: i32,
    pub provenance: Provenance,
}

impl TokenPattern {
    pub fn new(id: impl Into<String>, class: EntityClass, matchers: Vec<TokenMatcher>) -> Self {
        Self {
            id: id.into(),
            class,
            matchers,
            priority: 0,
            provenance: Provenance::Static,
        }
    }

    fn validate(&self) -> Result<(), RulesetError> {
        if self.class.is_conflict() {
            return Err(RulesetError::ConflictClass);
        }
        if self.matchers.is_empty() {
            return Err(RulesetError::EmptyPattern(self.id.clone()));
        }
        if !self.matchers.iter().any(|m| m.quantifier.requires_token()) {
            return Err(RulesetError::MatchesEmpty(self.id.clone()));
        }
        if self
            .matchers
            .iter()
            .any(|m| matches!(&m.attribute, Attribute::InList(l) if l.is_empty()))
        {
            return Err(RulesetError::EmptyInList(self.id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhrasePattern {
    pub class: EntityClass,
    pub phrase: Vec<String>,
    pub priority: i32,
    pub case_sensitive: bool,
    pub provenance: Provenance,
}

impl PhrasePattern {
    pub fn new(class: EntityClass, phrase: Vec<String>) -> Self {
        Self {
            class,
            phrase,
            priority: 0,
            case_sensitive: true,
            provenance: Provenance::Static,
        }
    }

    fn is_well_formed(&self) -> bool {
        !self.phrase.is_empty()
            && self
                .phrase
                .iter()
                .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace))
    }
}

#[derive(Debug, Clone)]
struct CompiledTokenPattern {
    pattern: TokenPattern,
    order: usize,
}

#[derive(Debug, Clone)]
struct CompiledPhrase {
    class: EntityClass,
    /// Lowercased when `case_sensitive` is false.
    tokens: Vec<String>,
    case_sensitive: bool,
    priority: i32,
    provenance: Provenance,
    order: usize,
}

/// An immutable, matchable ruleset.
///
/// Pattern order is token patterns in declaration order, then phrase
/// patterns, then gazetteer entries. Phrases are indexed by their first
/// token.
#[derive(Debug, Clone, Default)]
pub struct CompiledRuleset {
    token_patterns: Vec<CompiledTokenPattern>,
    phrases: Vec<CompiledPhrase>,
    exact_index: HashMap<String, Vec<usize>>,
    folded_index: HashMap<String, Vec<usize>>,
}

impl CompiledRuleset {
    pub fn token_pattern_count(&self) -> usize {
        self.token_patterns.len()
    }

    pub fn phrase_pattern_count(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_patterns.is_empty() && self.phrases.is_empty()
    }

    /// Number of compiled patterns per provenance tag.
    pub fn provenance_counts(&self) -> HashMap<Provenance, usize> {
        let mut counts = HashMap::new();
        let tags = self
            .token_patterns
            .iter()
            .map(|p| p.pattern.provenance)
            .chain(self.phrases.iter().map(|p| p.provenance));
        for tag in tags {
            *counts.entry(tag).or_insert(0) += 1;
        }
        counts
    }

    /// All raw matches in `doc`, before overlap resolution.
    pub fn candidates(&self, doc: &Document) -> Vec<Candidate> {
        let views: Vec<TokenView<'_>> = doc.texts().map(TokenView::new).collect();
        let mut out = Vec::new();

        for start in 0..views.len() {
            for tp in &self.token_patterns {
                if let Some(end) = match_sequence(&tp.pattern.matchers, &views, start) {
                    out.push(Candidate {
                        span: EntitySpan::new(tp.pattern.class, start, end),
                        priority: tp.pattern.priority,
                        pattern_order: tp.order,
                    });
                }
            }

            let exact = self.exact_index.get(views[start].text).into_iter().flatten();
            let folded = self.folded_index.get(&views[start].lower).into_iter().flatten();
            for &i in exact.chain(folded) {
                let phrase = &self.phrases[i];
                let end = start + phrase.tokens.len();
                if end > views.len() {
                    continue;
                }
                let hit = phrase.tokens.iter().zip(&views[start..end]).all(|(p, v)| {
                    if phrase.case_sensitive {
                        p == v.text
                    } else {
                        *p == v.lower
                    }
                });
                if hit {
                    out.push(Candidate {
                        span: EntitySpan::new(phrase.class, start, end),
                        priority: phrase.priority,
                        pattern_order: phrase.order,
                    });
                }
            }
        }
        out
    }
}

/// Compiles patterns and gazetteers into a [`CompiledRuleset`].
///
/// `corpus` is the text that filter-based gazetteers scan for candidate
/// tokens; it is ignored by every other source and may be empty.
pub fn compile_ruleset(
    token_patterns: Vec<TokenPattern>,
    phrase_patterns: Vec<PhrasePattern>,
    gazetteers: &[GazetteerSpec],
    corpus: &[Document],
) -> Result<CompiledRuleset, RulesetError> {
    for tp in &token_patterns {
        tp.validate()?;
    }
    let mut phrases = phrase_patterns;
    for (index, p) in phrases.iter().enumerate() {
        if p.class.is_conflict() {
            return Err(RulesetError::ConflictClass);
        }
        if !p.is_well_formed() {
            return Err(RulesetError::BadPhrase { index });
        }
    }
    for g in gazetteers {
        if g.class.is_conflict() {
            return Err(RulesetError::ConflictClass);
        }
        phrases.extend(g.expand(corpus)?);
    }

    let token_patterns: Vec<CompiledTokenPattern> = token_patterns
        .into_iter()
        .enumerate()
        .map(|(order, pattern)| CompiledTokenPattern { pattern, order })
        .collect();
    let offset = token_patterns.len();

    let mut rs = CompiledRuleset {
        token_patterns,
        ..Default::default()
    };
    for (i, p) in phrases.into_iter().enumerate() {
        let tokens: Vec<String> = if p.case_sensitive {
            p.phrase
        } else {
            p.phrase.iter().map(|t| t.to_lowercase()).collect()
        };
        let index = if p.case_sensitive {
            &mut rs.exact_index
        } else {
            &mut rs.folded_index
        };
        index.entry(tokens[0].clone()).or_default().push(i);
        rs.phrases.push(CompiledPhrase {
            class: p.class,
            tokens,
            case_sensitive: p.case_sensitive,
            priority: p.priority,
            provenance: p.provenance,
            order: offset + i,
        });
    }
    rs.token_patterns.sort_by_key(|tp| (tp.pattern.priority, tp.order));
    Ok(rs)
}

/// Finds every pattern match in `doc` and resolves overlaps. Gold tags are
/// never consulted.
pub fn apply_ruleset(rs: &CompiledRuleset, doc: &Document) -> Vec<EntitySpan> {
    resolve_overlaps(&rs.candidates(doc))
}
