//! Conversion between IOB tag sequences and entity spans.
//!
//! Decoding is lenient: an `I-C` tag with no open span of class `C` (at the
//! start of the sentence, after `O`, or after a span of another class) opens a
//! new span, as if it were `B-C`. Encoding is strict IOB2.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::class::{EntityClass, IobTag};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpanError {
    #[error("spans {first:?} and {second:?} overlap")]
    OverlappingSpans { first: EntitySpan, second: EntitySpan },
    #[error("span {span:?} does not fit a sentence of {len} tokens")]
    SpanOutOfRange { span: EntitySpan, len: usize },
}

/// A class over the half-open token range `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub class: EntityClass,
    pub start: usize,
    pub end: usize,
}

impl EntitySpan {
    pub fn new(class: EntityClass, start: usize, end: usize) -> Self {
        debug_assert!(start < end, "empty span {start}..{end}");
        Self { class, start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Token positions carrying one class within one document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenIndexSet {
    pub class: Option<EntityClass>,
    pub indices: BTreeSet<usize>,
}

impl TokenIndexSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn intersection_len(&self, other: &TokenIndexSet) -> usize {
        self.indices.intersection(&other.indices).count()
    }

    pub fn union_len(&self, other: &TokenIndexSet) -> usize {
        self.len() + other.len() - self.intersection_len(other)
    }
}

pub fn tags_to_spans(tags: &[IobTag]) -> Vec<EntitySpan> {
    let mut spans = Vec::new();
    let mut open: Option<(EntityClass, usize)> = None;

    for (i, tag) in tags.iter().enumerate() {
        match *tag {
            IobTag::Outside => {
                if let Some((class, start)) = open.take() {
                    spans.push(EntitySpan::new(class, start, i));
                }
            }
            IobTag::Begin(class) => {
                if let Some((prev, start)) = open.take() {
                    spans.push(EntitySpan::new(prev, start, i));
                }
                open = Some((class, i));
            }
            IobTag::Inside(class) => match open {
                Some((prev, _)) if prev == class => {}
                _ => {
                    if let Some((prev, start)) = open.take() {
                        spans.push(EntitySpan::new(prev, start, i));
                    }
                    open = Some((class, i));
                }
            },
        }
    }
    if let Some((class, start)) = open {
        spans.push(EntitySpan::new(class, start, tags.len()));
    }
    spans
}

/// Strict IOB2 encoding of a span list. Input order does not matter.
pub fn spans_to_tags(spans: &[EntitySpan], len: usize) -> Result<Vec<IobTag>, SpanError> {
    let mut sorted = spans.to_vec();
    sorted.sort_by_key(|s| (s.start, s.end));
    for span in &sorted {
        if span.start >= span.end || span.end > len {
            return Err(SpanError::SpanOutOfRange { span: *span, len });
        }
    }
    for pair in sorted.windows(2) {
        if pair[0].overlaps(&pair[1]) {
            return Err(SpanError::OverlappingSpans {
                first: pair[0],
                second: pair[1],
            });
        }
    }

    let mut tags = vec![IobTag::Outside; len];
    for span in &sorted {
        tags[span.start] = IobTag::Begin(span.class);
        for tag in &mut tags[span.start + 1..span.end] {
            *tag = IobTag::Inside(span.class);
        }
    }
    Ok(tags)
}

/// Strict IOB2 encoding of per-token class labels: every maximal run of one
/// class becomes a single span.
pub fn classes_to_tags(classes: &[Option<EntityClass>]) -> Vec<IobTag> {
    let mut prev = None;
    classes
        .iter()
        .map(|&class| {
            let tag = match class {
                None => IobTag::Outside,
                Some(c) if prev == Some(c) => IobTag::Inside(c),
                Some(c) => IobTag::Begin(c),
            };
            prev = class;
            tag
        })
        .collect()
}

/// Positions whose tag (B- or I-) carries `class`.
pub fn token_index_set(tags: &[IobTag], class: EntityClass) -> TokenIndexSet {
    TokenIndexSet {
        class: Some(class),
        indices: tags
            .iter()
            .enumerate()
            .filter(|(_, t)| t.class() == Some(class))
            .map(|(i, _)| i)
            .collect(),
    }
}
