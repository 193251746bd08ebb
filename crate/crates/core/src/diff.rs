//! Gestalt pattern matching over arbitrary element sequences.
//!
//! The matcher repeatedly extracts the longest contiguous block common to both
//! sequences and recurses into the unmatched regions on either side of it.
//! Every element is significant: there is no junk or popularity filtering, so
//! results depend only on the inputs and the tie-break rule (lowest start in
//! `a`, then lowest start in `b`).

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::Range;

use serde::Serialize;

/// A run of `length` equal elements starting at `a_start` in the first
/// sequence and `b_start` in the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MatchingBlock {
    pub a_start: usize,
    pub b_start: usize,
    pub length: usize,
}

impl MatchingBlock {
    pub fn a_range(&self) -> Range<usize> {
        self.a_start..self.a_start + self.length
    }

    pub fn b_range(&self) -> Range<usize> {
        self.b_start..self.b_start + self.length
    }
}

/// `2·M / T` together with the integers it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimilarityRatio {
    pub value: f64,
    /// Total length of all matching blocks.
    pub matched_total: usize,
    /// `|a| + |b|`.
    pub combined_length: usize,
}

impl SimilarityRatio {
    fn from_counts(matched_total: usize, combined_length: usize) -> Self {
        let value = if combined_length == 0 {
            1.0
        } else {
            (2 * matched_total) as f64 / combined_length as f64
        };
        Self {
            value,
            matched_total,
            combined_length,
        }
    }
}

/// Precomputed position index of `b`, reusable across many
/// `find_longest_match` calls against the same second sequence.
pub struct Matcher<'a, T> {
    a: &'a [T],
    b: &'a [T],
    b_positions: HashMap<&'a T, Vec<usize>>,
}

impl<'a, T: Eq + Hash> Matcher<'a, T> {
    pub fn new(a: &'a [T], b: &'a [T]) -> Self {
        let mut b_positions: HashMap<&T, Vec<usize>> = HashMap::new();
        for (j, elt) in b.iter().enumerate() {
            b_positions.entry(elt).or_default().push(j);
        }
        Self { a, b, b_positions }
    }

    /// Longest block with `a_start` in `a_range` and `b_start` in `b_range`
    /// lying entirely inside both ranges.
    pub fn find_longest_match(
        &self,
        a_range: Range<usize>,
        b_range: Range<usize>,
    ) -> Option<MatchingBlock> {
        assert!(a_range.end <= self.a.len() && b_range.end <= self.b.len());
        let mut best = MatchingBlock {
            a_start: a_range.start,
            b_start: b_range.start,
            length: 0,
        };
        // run_len[j] = length of the common run ending at a[i-1], b[j-1].
        let mut run_len: HashMap<usize, usize> = HashMap::new();
        for i in a_range.clone() {
            let mut next_run: HashMap<usize, usize> = HashMap::new();
            if let Some(positions) = self.b_positions.get(&self.a[i]) {
                for &j in positions {
                    if j < b_range.start {
                        continue;
                    }
                    if j >= b_range.end {
                        break;
                    }
                    let k = run_len.get(&j).copied().unwrap_or(0) + 1;
                    next_run.insert(j + 1, k);
                    // Strict comparison keeps the earliest (i, j) among equal lengths.
                    if k > best.length {
                        best = MatchingBlock {
                            a_start: i + 1 - k,
                            b_start: j + 1 - k,
                            length: k,
                        };
                    }
                }
            }
            run_len = next_run;
        }
        (best.length > 0).then_some(best)
    }

    pub fn matching_blocks(&self) -> Vec<MatchingBlock> {
        let mut blocks = Vec::new();
        let mut pending = vec![(0..self.a.len(), 0..self.b.len())];
        while let Some((a_range, b_range)) = pending.pop() {
            if a_range.is_empty() || b_range.is_empty() {
                continue;
            }
            let Some(block) = self.find_longest_match(a_range.clone(), b_range.clone()) else {
                continue;
            };
            pending.push((a_range.start..block.a_start, b_range.start..block.b_start));
            pending.push((block.a_range().end..a_range.end, block.b_range().end..b_range.end));
            blocks.push(block);
        }
        blocks.sort_by_key(|b| (b.a_start, b.b_start));
        blocks
    }
}

pub fn find_longest_match<T: Eq + Hash>(
    a: &[T],
    b: &[T],
    a_range: Range<usize>,
    b_range: Range<usize>,
) -> Option<MatchingBlock> {
    Matcher::new(a, b).find_longest_match(a_range, b_range)
}

/// All matching blocks of `a` against `b`, ordered by position.
pub fn matching_blocks<T: Eq + Hash>(a: &[T], b: &[T]) -> Vec<MatchingBlock> {
    Matcher::new(a, b).matching_blocks()
}

pub fn similarity_ratio<T: Eq + Hash>(a: &[T], b: &[T]) -> SimilarityRatio {
    let matched: usize = matching_blocks(a, b).iter().map(|m| m.length).sum();
    SimilarityRatio::from_counts(matched, a.len() + b.len())
}

/// Share of the pair that is not covered by matching blocks, `1 - ratio`.
pub fn edit_fraction<T: Eq + Hash>(a: &[T], b: &[T]) -> f64 {
    1.0 - similarity_ratio(a, b).value
}

/// Splits text into comparison lines: trailing whitespace trimmed, leading
/// indentation kept.
pub fn comparison_lines(text: &str) -> Vec<&str> {
    text.lines().map(str::trim_end).collect()
}
