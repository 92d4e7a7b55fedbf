//! Overlap resolution for raw pattern matches.

use std::cmp::Reverse;

use crate::span::EntitySpan;

/// A raw match before overlap resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub span: EntitySpan,
    /// Lower is stronger.
    pub priority: i32,
    /// Position of the producing pattern in the compiled ruleset.
    pub pattern_order: usize,
}

/// Greedy selection: longest span first, then lower priority value, then
/// leftmost start, then earlier pattern. A candidate is kept iff it overlaps
/// nothing kept before it. Output is sorted by start.
pub fn resolve_overlaps(matches: &[Candidate]) -> Vec<EntitySpan> {
    let mut order: Vec<&Candidate> = matches.iter().filter(|c| !c.span.is_empty()).collect();
    order.sort_by_key(|c| {
        (
            Reverse(c.span.len()),
            c.priority,
            c.span.start,
            c.pattern_order,
            c.span.class,
        )
    });

    let width = order.iter().map(|c| c.span.end).max().unwrap_or(0);
    let mut taken = vec![false; width];
    let mut kept = Vec::new();
    for c in order {
        let range = c.span.start..c.span.end;
        if taken[range.clone()].iter().any(|t| *t) {
            continue;
        }
        taken[range].iter_mut().for_each(|t| *t = true);
        kept.push(c.span);
    }
    kept.sort_by_key(|s| s.start);
    kept
}
