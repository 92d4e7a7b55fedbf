//! JSON ruleset files.
//!
//! ```json
//! {
//!   "token_patterns": [
//!     { "id": "modal", "class": "Signalwort", "priority": 0,
//!       "matchers": [ { "attribute": "LOWER", "value": "kann" } ] }
//!   ],
//!   "phrase_patterns": [
//!     { "class": "Signalwort", "phrase": ["im", "Einvernehmen"] }
//!   ],
//!   "gazetteers": [
//!     { "class": "Hauptakteur", "words": ["Agentur für Arbeit"], "case_sensitive": false },
//!     { "class": "Handlungsgrundlage", "file": "gesetze.txt",
//!       "provenance": "derived-from-model-gazetteer" },
//!     { "class": "Mitwirkender", "filter": { "suffix_in": ["agentur"], "is_capitalized": true } }
//!   ]
//! }
//! ```
//!
//! Unknown keys are rejected at every level. Gazetteer `file` paths are
//! resolved relative to the ruleset file.

use std::fs;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;
use serde_json::Value;

use super::{
    compile_ruleset, parse_word_list, Attribute, CompiledRuleset, FilterPredicate, FilterSpec, GazetteerSource,
    GazetteerSpec, PhrasePattern, Provenance, Quantifier, RulesetError, TokenMatcher, TokenPattern,
};
use crate::class::EntityClass;
use crate::corpus::Document;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRuleset {
    #[serde(default)]
    token_patterns: Vec<RawTokenPattern>,
    #[serde(default)]
    phrase_patterns: Vec<RawPhrasePattern>,
    #[serde(default)]
    gazetteers: Vec<RawGazetteer>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTokenPattern {
    #[serde(default)]
    id: Option<String>,
    class: EntityClass,
    matchers: Vec<RawMatcher>,
    #[serde(default)]
    priority: i32,
    #[serde(default)]
    provenance: Provenance,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatcher {
    attribute: String,
    value: Value,
    #[serde(default)]
    quantifier: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhrasePattern {
    class: EntityClass,
    phrase: Vec<String>,
    #[serde(default)]
    priority: i32,
    #[serde(default = "yes")]
    case_sensitive: bool,
    #[serde(default)]
    provenance: Provenance,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGazetteer {
    class: EntityClass,
    #[serde(default)]
    words: Option<Vec<String>>,
    #[serde(default)]
    file: Option<String>,
    #[serde(default)]
    filter: Option<RawFilter>,
    #[serde(default = "yes")]
    case_sensitive: bool,
    #[serde(default)]
    priority: i32,
    #[serde(default)]
    provenance: Provenance,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    #[serde(default)]
    suffix_in: Option<Vec<String>>,
    #[serde(default)]
    prefix_in: Option<Vec<String>>,
    #[serde(default)]
    min_length: Option<usize>,
    #[serde(default)]
    is_capitalized: bool,
    #[serde(default)]
    regex: Option<String>,
}

fn yes() -> bool {
    true
}

/// A parsed ruleset file, not yet compiled.
#[derive(Debug, Clone, Default)]
pub struct RulesetSpec {
    pub token_patterns: Vec<TokenPattern>,
    pub phrase_patterns: Vec<PhrasePattern>,
    pub gazetteers: Vec<GazetteerSpec>,
}

impl RulesetSpec {
    pub fn compile(&self, corpus: &[Document]) -> Result<CompiledRuleset, RulesetError> {
        compile_ruleset(
            self.token_patterns.clone(),
            self.phrase_patterns.clone(),
            &self.gazetteers,
            corpus,
        )
    }

    /// Whether any gazetteer is built from corpus tokens.
    pub fn needs_corpus(&self) -> bool {
        self.gazetteers
            .iter()
            .any(|g| matches!(g.source, GazetteerSource::Filter(_)))
    }
}

pub fn load_ruleset_file(path: &Path) -> Result<RulesetSpec, RulesetError> {
    let text = fs::read_to_string(path).map_err(|source| RulesetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ruleset_json(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_ruleset_json(text: &str, base_dir: &Path) -> Result<RulesetSpec, RulesetError> {
    let raw: RawRuleset = serde_json::from_str(text)?;

    let token_patterns = raw
        .token_patterns
        .into_iter()
        .enumerate()
        .map(|(i, tp)| {
            let id = tp.id.unwrap_or_else(|| format!("token_patterns[{i}]"));
            let matchers = tp
                .matchers
                .into_iter()
                .map(|m| convert_matcher(&id, m))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TokenPattern {
                id,
                class: tp.class,
                matchers,
                priority: tp.priority,
                provenance: tp.provenance,
            })
        })
        .collect::<Result<Vec<_>, RulesetError>>()?;

    let phrase_patterns = raw
        .phrase_patterns
        .into_iter()
        .map(|p| PhrasePattern {
            class: p.class,
            phrase: p.phrase,
            priority: p.priority,
            case_sensitive: p.case_sensitive,
            provenance: p.provenance,
        })
        .collect();

    let gazetteers = raw
        .gazetteers
        .into_iter()
        .enumerate()
        .map(|(i, g)| convert_gazetteer(i, g, base_dir))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(RulesetSpec {
        token_patterns,
        phrase_patterns,
        gazetteers,
    })
}

fn convert_matcher(id: &str, m: RawMatcher) -> Result<TokenMatcher, RulesetError> {
    let bad = |message: String| RulesetError::BadValue {
        pattern_id: id.to_string(),
        message,
    };
    let string = |v: &Value| {
        v.as_str()
            .map(String::from)
            .ok_or_else(|| bad(format!("{} expects a string value", m.attribute)))
    };
    let boolean = |v: &Value| {
        v.as_bool()
            .ok_or_else(|| bad(format!("{} expects a boolean value", m.attribute)))
    };

    let attribute = match m.attribute.as_str() {
        "TEXT" => Attribute::Text(string(&m.value)?),
        "LOWER" => Attribute::Lower(string(&m.value)?),
        "REGEX" => {
            let pattern = string(&m.value)?;
            let re = Regex::new(&pattern).map_err(|e| RulesetError::BadRegex {
                pattern_id: id.to_string(),
                message: e.to_string(),
            })?;
            Attribute::Regex(re)
        }
        "IS_DIGIT" => Attribute::IsDigit(boolean(&m.value)?),
        "IS_TITLE" => Attribute::IsTitle(boolean(&m.value)?),
        "PREFIX" => Attribute::Prefix(string(&m.value)?),
        "SUFFIX" => Attribute::Suffix(string(&m.value)?),
        "IN_LIST" => {
            let list = m
                .value
                .as_array()
                .and_then(|a| {
                    a.iter()
                        .map(|v| v.as_str().map(String::from))
                        .collect::<Option<Vec<_>>>()
                })
                .ok_or_else(|| bad("IN_LIST expects an array of strings".into()))?;
            Attribute::InList(list)
        }
        other => return Err(bad(format!("unknown attribute `{other}`"))),
    };

    let quantifier = match m.quantifier.as_deref() {
        None | Some("ONE") => Quantifier::One,
        Some("OPTIONAL") => Quantifier::Optional,
        Some("ONE_OR_MORE") => Quantifier::OneOrMore,
        Some("ZERO_OR_MORE") => Quantifier::ZeroOrMore,
        Some(other) => return Err(bad(format!("unknown quantifier `{other}`"))),
    };
    Ok(TokenMatcher::new(attribute, quantifier))
}

fn convert_gazetteer(index: usize, g: RawGazetteer, base_dir: &Path) -> Result<GazetteerSpec, RulesetError> {
    let id = format!("gazetteers[{index}]");
    let source = match (g.words, g.file, g.filter) {
        (Some(words), None, None) => GazetteerSource::Words(words),
        (None, Some(file), None) => {
            let path = base_dir.join(file);
            let text = fs::read_to_string(&path).map_err(|source| RulesetError::Io { path, source })?;
            GazetteerSource::Words(parse_word_list(&text))
        }
        (None, None, Some(f)) => GazetteerSource::Filter(convert_filter(&id, f)?),
        _ => {
            return Err(RulesetError::BadValue {
                pattern_id: id,
                message: "exactly one of `words`, `file` or `filter` is required".into(),
            })
        }
    };
    Ok(GazetteerSpec {
        class: g.class,
        source,
        case_sensitive: g.case_sensitive,
        priority: g.priority,
        provenance: g.provenance,
    })
}

fn convert_filter(id: &str, f: RawFilter) -> Result<FilterSpec, RulesetError> {
    let mut predicates = Vec::new();
    if let Some(list) = f.suffix_in {
        predicates.push(FilterPredicate::SuffixIn(list));
    }
    if let Some(list) = f.prefix_in {
        predicates.push(FilterPredicate::PrefixIn(list));
    }
    if let Some(n) = f.min_length {
        predicates.push(FilterPredicate::MinLength(n));
    }
    if f.is_capitalized {
        predicates.push(FilterPredicate::IsCapitalized);
    }
    if let Some(pattern) = f.regex {
        let re = Regex::new(&pattern).map_err(|e| RulesetError::BadRegex {
            pattern_id: id.to_string(),
            message: e.to_string(),
        })?;
        predicates.push(FilterPredicate::Regex(re));
    }
    FilterSpec::new(predicates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample_sentence;
    use crate::rules::apply_ruleset;
    use crate::span::EntitySpan;

    const SAMPLE: &str = r#"{
        "token_patterns": [
            { "id": "modal", "class": "Signalwort",
              "matchers": [ { "attribute": "LOWER", "value": "KANN", "quantifier": "ONE" } ] }
        ],
        "phrase_patterns": [ { "class": "Signalwort", "phrase": ["im", "Einvernehmen"] } ],
        "gazetteers": [
            { "class": "Mitwirkender", "filter": { "suffix_in": ["agentur"], "is_capitalized": true },
              "provenance": "derived-from-dev" }
        ]
    }"#;

    #[test]
    fn parses_and_applies() {
        let spec = parse_ruleset_json(SAMPLE, Path::new(".")).unwrap();
        assert!(spec.needs_corpus());
        let doc = sample_sentence();
        let rs = spec.compile(std::slice::from_ref(&doc)).unwrap();
        assert_eq!(
            apply_ruleset(&rs, &doc),
            vec![
                EntitySpan::new(EntityClass::Signalwort, 7, 8),
                EntitySpan::new(EntityClass::Signalwort, 25, 27),
                EntitySpan::new(EntityClass::Mitwirkender, 29, 30),
            ]
        );
    }

    #[test]
    fn empty_object_is_an_empty_ruleset() {
        let spec = parse_ruleset_json("{}", Path::new(".")).unwrap();
        assert!(spec.compile(&[]).unwrap().is_empty());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            parse_ruleset_json(r#"{"patterns": []}"#, Path::new(".")),
            Err(RulesetError::Json(_))
        ));
        let nested = r#"{"phrase_patterns": [{"class": "Aktion", "phrase": ["a"], "weight": 2}]}"#;
        assert!(parse_ruleset_json(nested, Path::new(".")).is_err());
    }

    #[test]
    fn bad_regex_names_the_pattern() {
        let text = r#"{"token_patterns": [{"id": "broken", "class": "Frist",
            "matchers": [{"attribute": "REGEX", "value": "("}]}]}"#;
        match parse_ruleset_json(text, Path::new(".")) {
            Err(RulesetError::BadRegex { pattern_id, .. }) => assert_eq!(pattern_id, "broken"),
            other => panic!("expected BadRegex, got {other:?}"),
        }
    }

    #[test]
    fn bad_values() {
        let text = r#"{"token_patterns": [{"class": "Frist",
            "matchers": [{"attribute": "IS_DIGIT", "value": "yes"}]}]}"#;
        assert!(matches!(
            parse_ruleset_json(text, Path::new(".")),
            Err(RulesetError::BadValue { .. })
        ));
        let text = r#"{"gazetteers": [{"class": "Frist", "words": ["a"], "filter": {"min_length": 2}}]}"#;
        assert!(matches!(
            parse_ruleset_json(text, Path::new(".")),
            Err(RulesetError::BadValue { .. })
        ));
        let text = r#"{"gazetteers": [{"class": "Frist", "filter": {}}]}"#;
        assert!(matches!(
            parse_ruleset_json(text, Path::new(".")),
            Err(RulesetError::EmptyFilter)
        ));
    }
}
