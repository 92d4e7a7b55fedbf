//! Surface-attribute token matchers.

use regex::Regex;

/// How many consecutive tokens a matcher consumes.
///
/// Repetition is greedy and never backtracks: `ONE_OR_MORE` and
/// `ZERO_OR_MORE` take every consecutive token that matches, even if a later
/// matcher then fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantifier {
    #[default]
    One,
    Optional,
    OneOrMore,
    ZeroOrMore,
}

impl Quantifier {
    pub fn requires_token(self) -> bool {
        matches!(self, Quantifier::One | Quantifier::OneOrMore)
    }
}

#[derive(Debug, Clone)]
pub enum Attribute {
    /// Exact token text.
    Text(String),
    /// Lowercased token text; the value is lowercased on construction.
    Lower(String),
    /// Unanchored regex search over the token text.
    Regex(Regex),
    IsDigit(bool),
    IsTitle(bool),
    /// The token text starts with the value (case-sensitive).
    Prefix(String),
    /// The token text ends with the value (case-sensitive).
    Suffix(String),
    InList(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct TokenMatcher {
    pub attribute: Attribute,
    pub quantifier: Quantifier,
}

impl TokenMatcher {
    pub fn new(attribute: Attribute, quantifier: Quantifier) -> Self {
        let attribute = match attribute {
            Attribute::Lower(v) => Attribute::Lower(v.to_lowercase()),
            other => other,
        };
        Self { attribute, quantifier }
    }

    pub fn one(attribute: Attribute) -> Self {
        Self::new(attribute, Quantifier::One)
    }

    pub fn test(&self, token: &TokenView<'_>) -> bool {
        match &self.attribute {
            Attribute::Text(v) => token.text == v,
            Attribute::Lower(v) => token.lower == *v,
            Attribute::Regex(re) => re.is_match(token.text),
            Attribute::IsDigit(want) => is_digit(token.text) == *want,
            Attribute::IsTitle(want) => is_title(token.text) == *want,
            Attribute::Prefix(v) => token.text.starts_with(v.as_str()),
            Attribute::Suffix(v) => token.text.ends_with(v.as_str()),
            Attribute::InList(list) => list.iter().any(|w| w == token.text),
        }
    }
}

/// A token with its precomputed lowercase form.
#[derive(Debug, Clone)]
pub struct TokenView<'a> {
    pub text: &'a str,
    pub lower: String,
}

impl<'a> TokenView<'a> {
    pub fn new(text: &'a str) -> Self {
        Self {
            text,
            lower: text.to_lowercase(),
        }
    }
}

pub fn is_digit(text: &str) -> bool {
    !text.is_empty() && text.chars().all(char::is_numeric)
}

/// First cased character uppercase, every later cased character lowercase.
pub fn is_title(text: &str) -> bool {
    let mut cased = text.chars().filter(|c| c.is_uppercase() || c.is_lowercase());
    match cased.next() {
        Some(first) if first.is_uppercase() => cased.all(char::is_lowercase),
        _ => false,
    }
}

/// Runs a matcher sequence from `start`; returns the exclusive end of the
/// match, or `None` if it fails or consumes nothing.
pub fn match_sequence(matchers: &[TokenMatcher], tokens: &[TokenView<'_>], start: usize) -> Option<usize> {
    let mut pos = start;
    let hit = |m: &TokenMatcher, pos: usize| pos < tokens.len() && m.test(&tokens[pos]);
    for m in matchers {
        match m.quantifier {
            Quantifier::One => {
                if !hit(m, pos) {
                    return None;
                }
                pos += 1;
            }
            Quantifier::Optional => {
                if hit(m, pos) {
                    pos += 1;
                }
            }
            Quantifier::OneOrMore => {
                if !hit(m, pos) {
                    return None;
                }
                pos += 1;
                while hit(m, pos) {
                    pos += 1;
                }
            }
            Quantifier::ZeroOrMore => {
                while hit(m, pos) {
                    pos += 1;
                }
            }
        }
    }
    (pos > start).then_some(pos)
}
