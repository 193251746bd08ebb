//! Acceptance rates, returning users, N-day retention and daily usage.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate, TimeDelta, Weekday};
use serde::Serialize;
use thiserror::Error;

use crate::edits::{Category, SuggestionOutcome};
use crate::event::{local_date, EventKind, RawEvent, UserTimeline};
use crate::ratio::{as_percent, as_value, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("strong acceptance numerator is negative: counts are inconsistent")]
    NegativeNumerator,
    #[error("no user has a first active day on or before {0}")]
    EmptyWindow(NaiveDate),
}

/// Counts over shown suggestions. Accepted suggestions split into fully
/// accepted, minor edits with the module kept, minor edits with the module
/// changed, major edits, deletions and unresolved ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceSummary {
    pub total_suggestions: u64,
    pub initially_accepted: u64,
    pub fully_accepted: u64,
    pub minor_edits: u64,
    pub major_edits: u64,
    pub deleted_after_accept: u64,
    pub module_changed_minor: u64,
    pub unresolved: u64,
    pub rejected: u64,
    pub ignored: u64,
    pub total_lines: u64,
    pub total_tokens: u64,
    #[serde(serialize_with = "as_value")]
    pub avg_lines_per_suggestion: Ratio,
    #[serde(serialize_with = "as_value")]
    pub avg_tokens_per_suggestion: Ratio,
    #[serde(serialize_with = "as_percent")]
    pub initial_rate: Ratio,
    #[serde(serialize_with = "as_percent")]
    pub strong_rate: Ratio,
}

impl AcceptanceSummary {
    /// `(name, count)` for each slice of the accepted suggestions.
    pub fn accepted_breakdown(&self) -> [(&'static str, u64); 6] {
        [
            ("fully_accepted", self.fully_accepted),
            ("minor_edit", self.minor_edits),
            ("module_changed_minor", self.module_changed_minor),
            ("major_edit", self.major_edits),
            ("deleted_after_accept", self.deleted_after_accept),
            ("unresolved", self.unresolved),
        ]
    }
}

pub fn acceptance_summary(outcomes: &[SuggestionOutcome]) -> AcceptanceSummary {
    let mut s = AcceptanceSummary {
        total_suggestions: outcomes.len() as u64,
        initially_accepted: 0,
        fully_accepted: 0,
        minor_edits: 0,
        major_edits: 0,
        deleted_after_accept: 0,
        module_changed_minor: 0,
        unresolved: 0,
        rejected: 0,
        ignored: 0,
        total_lines: 0,
        total_tokens: 0,
        avg_lines_per_suggestion: Ratio::default(),
        avg_tokens_per_suggestion: Ratio::default(),
        initial_rate: Ratio::default(),
        strong_rate: Ratio::default(),
    };
    for o in outcomes {
        s.total_lines += u64::from(o.line_count);
        s.total_tokens += u64::from(o.token_count);
        let slot = match o.category {
            Category::FullyAccepted => &mut s.fully_accepted,
            Category::MinorEdit if o.module_changed => &mut s.module_changed_minor,
            Category::MinorEdit => &mut s.minor_edits,
            Category::MajorEdit => &mut s.major_edits,
            Category::DeletedAfterAccept => &mut s.deleted_after_accept,
            Category::Unresolved => &mut s.unresolved,
            Category::Rejected => &mut s.rejected,
            Category::Ignored => &mut s.ignored,
        };
        *slot += 1;
    }
    s.initially_accepted = s.accepted_breakdown().iter().map(|(_, n)| n).sum();
    s.avg_lines_per_suggestion = Ratio::new(s.total_lines, s.total_suggestions);
    s.avg_tokens_per_suggestion = Ratio::new(s.total_tokens, s.total_suggestions);
    s.initial_rate = Ratio::new(s.initially_accepted, s.total_suggestions);
    s.strong_rate =
        strong_acceptance_rate(&s).expect("disjoint category counts never exceed acceptances");
    s
}

/// Accepted suggestions that were kept, edited by less than the threshold and
/// kept their module, over all shown suggestions.
pub fn strong_acceptance_rate(s: &AcceptanceSummary) -> Result<Ratio, MetricsError> {
    let num = s
        .initially_accepted
        .checked_sub(s.deleted_after_accept)
        .and_then(|n| n.checked_sub(s.major_edits))
        .and_then(|n| n.checked_sub(s.module_changed_minor))
        .ok_or(MetricsError::NegativeNumerator)?;
    Ok(Ratio::new(num, s.total_suggestions))
}

/// Users active on at least two distinct local dates.
pub fn returning_user_cohort(timelines: &[UserTimeline]) -> BTreeSet<&str> {
    timelines
        .iter()
        .filter(|t| t.active_days().len() >= 2)
        .map(UserTimeline::user_id)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetentionDay {
    pub day: u32,
    /// Users whose first day is at least `day` days before the window end.
    pub eligible: u64,
    /// Eligible users active exactly `day` calendar days after their first day.
    pub returned: u64,
    #[serde(serialize_with = "as_percent")]
    pub percentage: Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetentionCurve {
    pub window_end: NaiveDate,
    pub horizon: u32,
    pub days: Vec<RetentionDay>,
}

pub fn retention_curve(
    timelines: &[UserTimeline],
    horizon: u32,
    window_end: NaiveDate,
) -> Result<RetentionCurve, MetricsError> {
    if !timelines.iter().any(|t| t.first_day() <= window_end) {
        return Err(MetricsError::EmptyWindow(window_end));
    }
    let days = (0..=horizon)
        .map(|n| {
            let offset = TimeDelta::days(i64::from(n));
            let mut eligible = 0;
            let mut returned = 0;
            for t in timelines {
                let first = t.first_day();
                if first + offset > window_end {
                    continue;
                }
                eligible += 1;
                if t.active_days().contains(&(first + offset)) {
                    returned += 1;
                }
            }
            RetentionDay {
                day: n,
                eligible,
                returned,
                percentage: Ratio::new(returned, eligible),
            }
        })
        .collect();
    Ok(RetentionCurve {
        window_end,
        horizon,
        days,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DailyCount {
    pub date: NaiveDate,
    pub completions: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeekdayMean {
    pub weekday: String,
    /// Dates with this weekday inside the window.
    pub dates: u64,
    pub total: u64,
    #[serde(serialize_with = "as_value")]
    pub mean: Ratio,
}

/// Completion requests per user-local date and their mean per weekday.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalProfile {
    pub window_start: Option<NaiveDate>,
    pub window_end: Option<NaiveDate>,
    /// Every date of the window, zero counts included.
    pub daily: Vec<DailyCount>,
    /// Monday first.
    pub weekday_means: Vec<WeekdayMean>,
}

const WEEK: [Weekday; 7] = [
    Weekday::Mon,
    Weekday::Tue,
    Weekday::Wed,
    Weekday::Thu,
    Weekday::Fri,
    Weekday::Sat,
    Weekday::Sun,
];

/// Profiles completion events inside `window` (inclusive dates). Without a
/// window, the span of the completion events is used.
pub fn temporal_profile<'a, I>(events: I, window: Option<(NaiveDate, NaiveDate)>) -> TemporalProfile
where
    I: IntoIterator<Item = &'a RawEvent>,
{
    let mut counts: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for ev in events {
        if ev.kind() == EventKind::Completion {
            *counts.entry(local_date(ev)).or_insert(0) += 1;
        }
    }
    let window = window.or_else(|| {
        let first = *counts.keys().next()?;
        let last = *counts.keys().next_back()?;
        Some((first, last))
    });
    let Some((start, end)) = window else {
        return TemporalProfile {
            window_start: None,
            window_end: None,
            daily: Vec::new(),
            weekday_means: WEEK
                .iter()
                .map(|w| WeekdayMean {
                    weekday: w.to_string(),
                    dates: 0,
                    total: 0,
                    mean: Ratio::default(),
                })
                .collect(),
        };
    };

    let daily: Vec<DailyCount> = start
        .iter_days()
        .take_while(|d| *d <= end)
        .map(|date| DailyCount {
            date,
            completions: counts.get(&date).copied().unwrap_or(0),
        })
        .collect();
    let weekday_means = WEEK
        .iter()
        .map(|&w| {
            let on_day = daily.iter().filter(|d| d.date.weekday() == w);
            let (dates, total) = on_day.fold((0, 0), |(n, t), d| (n + 1, t + d.completions));
            WeekdayMean {
                weekday: w.to_string(),
                dates,
                total,
                mean: Ratio::new(total, dates),
            }
        })
        .collect();
    TemporalProfile {
        window_start: Some(start),
        window_end: Some(end),
        daily,
        weekday_means,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{build_timelines, CompletionPayload, Decision, Payload};
    use chrono::DateTime;
    use std::collections::BTreeSet;

    fn outcome(category: Category, module_changed: bool) -> SuggestionOutcome {
        SuggestionOutcome {
            suggestion_id: String::new(),
            user_id: String::new(),
            decision: match category {
                Category::Rejected => Decision::Rejected,
                Category::Ignored => Decision::Ignored,
                _ => Decision::Accepted,
            },
            category,
            shown_task: None,
            committed_task: None,
            edit_fraction: None,
            module_changed,
            minor_subcategory: None,
            module_edit_tags: BTreeSet::new(),
            line_count: 6,
            token_count: 20,
        }
    }

    fn summary(counts: &[(Category, bool, usize)]) -> AcceptanceSummary {
        let outcomes: Vec<_> = counts
            .iter()
            .flat_map(|&(c, m, n)| std::iter::repeat_n(outcome(c, m), n))
            .collect();
        acceptance_summary(&outcomes)
    }

    fn ev(user: &str, ts: &str) -> RawEvent {
        RawEvent {
            event_id: format!("{user}-{ts}"),
            user_id: user.into(),
            timestamp: DateTime::parse_from_rfc3339(ts).unwrap(),
            payload: Payload::Completion(CompletionPayload {
                suggestion_id: ts.into(),
                prompt: String::new(),
                context: String::new(),
            }),
        }
    }

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn table_one_rates() {
        let s = AcceptanceSummary {
            total_suggestions: 62_099,
            initially_accepted: 40_938,
            fully_accepted: 24_811,
            minor_edits: 5_672,
            major_edits: 2_713,
            deleted_after_accept: 7_436,
            module_changed_minor: 306,
            unresolved: 0,
            rejected: 21_161,
            ignored: 0,
            total_lines: 0,
            total_tokens: 0,
            avg_lines_per_suggestion: Ratio::default(),
            avg_tokens_per_suggestion: Ratio::default(),
            initial_rate: Ratio::new(40_938, 62_099),
            strong_rate: Ratio::default(),
        };
        assert!((s.initial_rate.percent() - 65.92).abs() < 0.01);
        assert!((Ratio::new(24_811, 40_938).percent() - 60.60).abs() < 0.01);
        let strong = strong_acceptance_rate(&s).unwrap();
        assert_eq!(strong, Ratio::new(30_483, 62_099));
        assert!((49.08..=49.10).contains(&strong.percent()));
    }

    #[test]
    fn nothing_accepted() {
        let s = summary(&[(Category::Rejected, false, 3)]);
        assert_eq!(s.initial_rate.value(), 0.0);
        assert_eq!(s.strong_rate.value(), 0.0);
        let empty = acceptance_summary(&[]);
        assert_eq!((empty.initial_rate.value(), empty.strong_rate.value()), (0.0, 0.0));
    }

    #[test]
    fn strong_equals_initial_without_penalised_edits() {
        let s = summary(&[
            (Category::FullyAccepted, false, 3),
            (Category::MinorEdit, false, 2),
            (Category::Rejected, false, 5),
        ]);
        assert_eq!(s.strong_rate, s.initial_rate);
        assert_eq!(s.minor_edits, 2);
    }

    #[test]
    fn all_deleted_gives_zero_strong_rate() {
        let s = summary(&[(Category::DeletedAfterAccept, false, 4)]);
        assert_eq!(s.initial_rate.value(), 1.0);
        assert_eq!(s.strong_rate.value(), 0.0);
    }

    #[test]
    fn module_changed_minor_is_its_own_slice() {
        let s = summary(&[
            (Category::MinorEdit, true, 1),
            (Category::MinorEdit, false, 2),
            (Category::MajorEdit, true, 1),
        ]);
        assert_eq!((s.module_changed_minor, s.minor_edits, s.major_edits), (1, 2, 1));
        assert_eq!(s.initially_accepted, 4);
        assert_eq!(s.strong_rate, Ratio::new(2, 4));
    }

    #[test]
    fn inconsistent_counts() {
        let mut s = summary(&[(Category::FullyAccepted, false, 1)]);
        s.deleted_after_accept = 5;
        assert_eq!(strong_acceptance_rate(&s), Err(MetricsError::NegativeNumerator));
    }

    #[test]
    fn returning_users() {
        let tls = build_timelines(vec![
            ev("once", "2023-06-01T09:00:00Z"),
            ev("same-day", "2023-06-01T09:00:00Z"),
            ev("same-day", "2023-06-01T18:00:00Z"),
            ev("back", "2023-06-01T09:00:00Z"),
            ev("back", "2023-06-05T09:00:00Z"),
        ]);
        assert_eq!(returning_user_cohort(&tls), BTreeSet::from(["back"]));
    }

    #[test]
    fn retention_day0_and_day1() {
        let tls = build_timelines(vec![
            ev("u", "2023-06-01T09:00:00Z"),
            ev("u", "2023-06-02T09:00:00Z"),
        ]);
        let curve = retention_curve(&tls, 2, date("2023-06-10")).unwrap();
        let pct: Vec<f64> = curve.days.iter().map(|d| d.percentage.percent()).collect();
        assert_eq!(pct, [100.0, 100.0, 0.0]);
    }

    #[test]
    fn retention_eligibility() {
        let tls = build_timelines(vec![ev("late", "2023-06-20T09:00:00Z")]);
        let curve = retention_curve(&tls, 30, date("2023-06-30")).unwrap();
        assert_eq!(curve.days[10].eligible, 1);
        assert_eq!(curve.days[11].eligible, 0);
        assert_eq!(curve.days[30].eligible, 0);
        assert_eq!(curve.days[30].percentage.value(), 0.0);
    }

    #[test]
    fn retention_empty_window() {
        let tls = build_timelines(vec![ev("u", "2023-06-20T09:00:00Z")]);
        assert_eq!(
            retention_curve(&tls, 3, date("2023-06-01")),
            Err(MetricsError::EmptyWindow(date("2023-06-01")))
        );
    }

    #[test]
    fn one_completion_per_weekday() {
        // 2023-06-05 is a Monday.
        let evs: Vec<_> = (5..=11)
            .map(|d| ev("u", &format!("2023-06-{d:02}T12:00:00Z")))
            .collect();
        let p = temporal_profile(&evs, None);
        assert_eq!(p.daily.len(), 7);
        assert!(p.weekday_means.iter().all(|w| w.mean == Ratio::new(1, 1)));
        assert_eq!(p.weekday_means[0].weekday, "Mon");
    }

    #[test]
    fn saturday_only() {
        let evs = vec![
            ev("u", "2023-06-10T12:00:00Z"),
            ev("v", "2023-06-10T13:00:00Z"),
            ev("u", "2023-06-17T12:00:00Z"),
        ];
        let p = temporal_profile(&evs, Some((date("2023-06-05"), date("2023-06-18"))));
        for w in &p.weekday_means {
            let expected = if w.weekday == "Sat" { 1.5 } else { 0.0 };
            assert_eq!(w.mean.value(), expected, "{}", w.weekday);
            assert_eq!(w.dates, 2);
        }
    }

    #[test]
    fn planted_daily_counts() {
        // Two weeks from Monday 2023-06-05; day i carries i+1 completions.
        let mut evs = Vec::new();
        for i in 0..14u32 {
            let day = date("2023-06-05") + TimeDelta::days(i64::from(i));
            for k in 0..=i {
                evs.push(ev("u", &format!("{day}T10:{k:02}:00+05:30")));
            }
        }
        let p = temporal_profile(&evs, None);
        for (idx, w) in p.weekday_means.iter().enumerate() {
            let (a, b) = (idx as u64 + 1, idx as u64 + 8);
            assert_eq!(w.total, a + b);
            assert_eq!(w.mean, Ratio::new(a + b, 2));
        }
    }

    #[test]
    fn no_completions_no_window() {
        let p = temporal_profile(&[], None);
        assert!(p.daily.is_empty());
        assert_eq!(p.weekday_means.len(), 7);
    }
}
