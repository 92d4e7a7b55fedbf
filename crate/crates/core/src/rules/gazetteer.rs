//! Word-list gazetteers and corpus-derived (dynamic) gazetteers.

use std::collections::BTreeSet;

use regex::Regex;

use super::{PhrasePattern, Provenance, RulesetError};
use crate::class::EntityClass;
use crate::corpus::Document;

#[derive(Debug, Clone)]
pub enum FilterPredicate {
    SuffixIn(Vec<String>),
    PrefixIn(Vec<String>),
    /// Minimum length in characters.
    MinLength(usize),
    IsCapitalized,
    Regex(Regex),
}

impl FilterPredicate {
    pub fn accepts(&self, token: &str) -> bool {
        match self {
            FilterPredicate::SuffixIn(list) => list.iter().any(|s| token.ends_with(s.as_str())),
            FilterPredicate::PrefixIn(list) => list.iter().any(|p| token.starts_with(p.as_str())),
            FilterPredicate::MinLength(n) => token.chars().count() >= *n,
            FilterPredicate::IsCapitalized => token.chars().next().is_some_and(char::is_uppercase),
            FilterPredicate::Regex(re) => re.is_match(token),
        }
    }
}

/// A non-empty conjunction of token predicates.
#[derive(Debug, Clone)]
pub struct FilterSpec {
    predicates: Vec<FilterPredicate>,
}

impl FilterSpec {
    pub fn new(predicates: Vec<FilterPredicate>) -> Result<Self, RulesetError> {
        if predicates.is_empty() {
            return Err(RulesetError::EmptyFilter);
        }
        Ok(Self { predicates })
    }

    pub fn predicates(&self) -> &[FilterPredicate] {
        &self.predicates
    }

    pub fn accepts(&self, token: &str) -> bool {
        self.predicates.iter().all(|p| p.accepts(token))
    }
}

#[derive(Debug, Clone)]
pub enum GazetteerSource {
    /// Explicit phrases; each entry is split on whitespace into tokens.
    Words(Vec<String>),
    /// Built from corpus tokens at compile time.
    Filter(FilterSpec),
}

#[derive(Debug, Clone)]
pub struct GazetteerSpec {
    pub class: EntityClass,
    pub source: GazetteerSource,
    pub case_sensitive: bool,
    pub priority: i32,
    pub provenance: Provenance,
}

impl GazetteerSpec {
    pub fn words(class: EntityClass, words: Vec<String>) -> Self {
        Self {
            class,
            source: GazetteerSource::Words(words),
            case_sensitive: true,
            priority: 0,
            provenance: Provenance::Static,
        }
    }

    pub fn filter(class: EntityClass, filter: FilterSpec) -> Self {
        Self {
            source: GazetteerSource::Filter(filter),
            ..Self::words(class, Vec::new())
        }
    }

    /// Expands the gazetteer into phrase patterns. Entries are deduplicated,
    /// after lowercasing when the gazetteer is case-insensitive; the first
    /// spelling of each entry is kept.
    pub fn expand(&self, corpus: &[Document]) -> Result<Vec<PhrasePattern>, RulesetError> {
        let mut patterns = match &self.source {
            GazetteerSource::Words(words) => {
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for entry in words {
                    let phrase: Vec<String> = entry.split_whitespace().map(String::from).collect();
                    if phrase.is_empty() {
                        continue;
                    }
                    let key = if self.case_sensitive {
                        phrase.join(" ")
                    } else {
                        phrase.join(" ").to_lowercase()
                    };
                    if seen.insert(key) {
                        out.push(PhrasePattern::new(self.class, phrase));
                    }
                }
                if out.is_empty() {
                    return Err(RulesetError::EmptyGazetteer(self.class));
                }
                out
            }
            GazetteerSource::Filter(filter) => build_dynamic_gazetteer(corpus, filter, self.class),
        };
        for p in &mut patterns {
            p.case_sensitive = self.case_sensitive;
            p.priority = self.priority;
            p.provenance = self.provenance;
        }
        Ok(patterns)
    }
}

/// Every distinct corpus token passing all predicates of `filter`, as
/// single-token phrase patterns sorted lexicographically.
pub fn build_dynamic_gazetteer(corpus: &[Document], filter: &FilterSpec, class: EntityClass) -> Vec<PhrasePattern> {
    let words: BTreeSet<&str> = corpus
        .iter()
        .flat_map(|d| d.texts())
        .filter(|t| filter.accepts(t))
        .collect();
    words
        .into_iter()
        .map(|w| PhrasePattern::new(class, vec![w.to_string()]))
        .collect()
}

/// Parses a word-list file: one phrase per line, `#` comment lines and blank
/// lines ignored.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample_sentence;

    fn phrases(patterns: &[PhrasePattern]) -> Vec<String> {
        patterns.iter().map(|p| p.phrase.join(" ")).collect()
    }

    #[test]
    fn suffix_and_capitalization() {
        let corpus = vec![sample_sentence()];
        let filter = FilterSpec::new(vec![
            FilterPredicate::SuffixIn(vec!["agentur".into(), "amt".into()]),
            FilterPredicate::IsCapitalized,
        ])
        .unwrap();
        let out = build_dynamic_gazetteer(&corpus, &filter, EntityClass::Mitwirkender);
        assert_eq!(phrases(&out), vec!["Bundesamt", "Bundesnetzagentur"]);
        assert!(out.iter().all(|p| p.class == EntityClass::Mitwirkender));
    }

    #[test]
    fn amt_suffix_finds_only_bundesamt() {
        let corpus = vec![sample_sentence()];
        let filter = FilterSpec::new(vec![FilterPredicate::SuffixIn(vec!["amt".into()])]).unwrap();
        let out = build_dynamic_gazetteer(&corpus, &filter, EntityClass::Hauptakteur);
        assert_eq!(phrases(&out), vec!["Bundesamt"]);
    }

    #[test]
    fn nothing_is_that_long() {
        let corpus = vec![sample_sentence()];
        let filter = FilterSpec::new(vec![FilterPredicate::MinLength(50)]).unwrap();
        assert!(build_dynamic_gazetteer(&corpus, &filter, EntityClass::Dokument).is_empty());
    }

    #[test]
    fn sorted_and_distinct() {
        let corpus = vec![sample_sentence()];
        let filter = FilterSpec::new(vec![FilterPredicate::MinLength(3)]).unwrap();
        let out = phrases(&build_dynamic_gazetteer(&corpus, &filter, EntityClass::Dokument));
        let mut expected = out.clone();
        expected.sort();
        expected.dedup();
        assert_eq!(out, expected);
        assert_eq!(out.iter().filter(|w| *w == "der").count(), 1);
    }

    #[test]
    fn empty_filter_is_rejected() {
        assert!(matches!(FilterSpec::new(vec![]), Err(RulesetError::EmptyFilter)));
    }

    #[test]
    fn word_list_dedup_and_errors() {
        let mut spec = GazetteerSpec::words(
            EntityClass::Hauptakteur,
            vec!["Agentur für Arbeit".into(), "agentur FÜR arbeit".into()],
        );
        assert_eq!(spec.expand(&[]).unwrap().len(), 2);
        spec.case_sensitive = false;
        let out = spec.expand(&[]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].phrase, vec!["Agentur", "für", "Arbeit"]);
        assert!(!out[0].case_sensitive);

        let empty = GazetteerSpec::words(EntityClass::Frist, vec!["  ".into()]);
        assert!(matches!(
            empty.expand(&[]),
            Err(RulesetError::EmptyGazetteer(EntityClass::Frist))
        ));
    }

    #[test]
    fn word_list_file_format() {
        let text = "# Behörden\nAgentur für Arbeit\n\n  Bundesamt \n#Amt\n";
        assert_eq!(parse_word_list(text), vec!["Agentur für Arbeit", "Bundesamt"]);
    }
}
