//! Star ratings and the distribution of pre-labeled comments.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::event::FeedbackPayload;
use crate::ratio::{as_percent, Ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// One or two stars.
    Negative,
    /// Four or five stars.
    Positive,
}

impl Polarity {
    pub fn of_stars(stars: u8) -> Option<Self> {
        match stars {
            1 | 2 => Some(Polarity::Negative),
            4 | 5 => Some(Polarity::Positive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarSummary {
    pub total: u64,
    /// Index 0 holds one-star ratings.
    pub histogram: [u64; 5],
    #[serde(serialize_with = "as_percent")]
    pub satisfied_share: Ratio,
    #[serde(serialize_with = "as_percent")]
    pub neutral_share: Ratio,
    #[serde(serialize_with = "as_percent")]
    pub dissatisfied_share: Ratio,
}

pub fn summarize_stars<'a, I>(events: I) -> StarSummary
where
    I: IntoIterator<Item = &'a FeedbackPayload>,
{
    let mut histogram = [0u64; 5];
    for ev in events {
        histogram[usize::from(ev.stars.clamp(1, 5)) - 1] += 1;
    }
    let total = histogram.iter().sum();
    StarSummary {
        total,
        histogram,
        satisfied_share: Ratio::new(histogram[3] + histogram[4], total),
        neutral_share: Ratio::new(histogram[2], total),
        dissatisfied_share: Ratio::new(histogram[0] + histogram[1], total),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelShare {
    pub label: String,
    pub count: u64,
    #[serde(serialize_with = "as_percent")]
    pub share: Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelDistribution {
    pub polarity: Polarity,
    pub labeled: u64,
    /// Comments of this polarity that carry no label.
    pub unlabeled: u64,
    /// Largest share first, ties by label.
    pub shares: Vec<LabelShare>,
}

fn label_of(ev: &FeedbackPayload) -> Option<&str> {
    ev.sentiment_label
        .as_deref()
        .map(str::trim)
        .filter(|l| !l.is_empty())
}

/// Shares of each label among labeled comments of one polarity. Three-star
/// feedback belongs to neither polarity; feedback with neither a comment nor
/// a label is not a comment and is skipped.
pub fn label_distribution<'a, I>(events: I, polarity: Polarity) -> LabelDistribution
where
    I: IntoIterator<Item = &'a FeedbackPayload>,
{
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut unlabeled = 0;
    for ev in events {
        if Polarity::of_stars(ev.stars) != Some(polarity) {
            continue;
        }
        match label_of(ev) {
            Some(label) => *counts.entry(label).or_insert(0) += 1,
            None if !ev.comment.trim().is_empty() => unlabeled += 1,
            None => {}
        }
    }
    let labeled = counts.values().sum();
    let mut shares: Vec<LabelShare> = counts
        .into_iter()
        .map(|(label, count)| LabelShare {
            label: label.to_owned(),
            count,
            share: Ratio::new(count, labeled),
        })
        .collect();
    shares.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    LabelDistribution {
        polarity,
        labeled,
        unlabeled,
        shares,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackSummary {
    pub stars: StarSummary,
    pub negative: LabelDistribution,
    pub positive: LabelDistribution,
}

pub fn summarize_feedback(events: &[&FeedbackPayload]) -> FeedbackSummary {
    FeedbackSummary {
        stars: summarize_stars(events.iter().copied()),
        negative: label_distribution(events.iter().copied(), Polarity::Negative),
        positive: label_distribution(events.iter().copied(), Polarity::Positive),
    }
}
