//! Ingest → window → dedup → timelines → outcomes → report.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, TimeDelta};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{Cohort, Config};
use crate::edits::{
    classify_outcome, pair_outcomes, Category, MinorSubcategory, ModuleEditTag, SuggestionOutcome,
};
use crate::event::{build_timelines, deduplicate, local_date, EventKind, Ingested, Payload, RawEvent};
use crate::feedback::summarize_feedback;
use crate::metrics::{
    acceptance_summary, retention_curve, returning_user_cohort, temporal_profile, MetricsError,
};
use crate::ratio::Ratio;
use crate::report::{
    AnalysisReport, DataQuality, EditDistribution, ModuleEdits, Settings, Share, Temporal,
    UserSummary,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no parseable events in the input ({lines} non-blank lines read)")]
    ZeroEvents { lines: usize },
    #[error("none of the {parsed} parsed events falls inside the analysis window")]
    EmptyWindow { parsed: usize },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Inclusive bounds on user-local dates; open when `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Window {
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
}

impl Window {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start.is_none_or(|s| s <= date) && self.end.is_none_or(|e| date <= e)
    }
}

pub fn ingest_paths<P: AsRef<Path>>(paths: &[P]) -> Result<Ingested, PipelineError> {
    let mut ingested = Ingested::default();
    for path in paths {
        let path = path.as_ref();
        let io = |source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = File::open(path).map_err(io)?;
        ingested
            .read_from(&path.display().to_string(), BufReader::new(file))
            .map_err(io)?;
    }
    Ok(ingested)
}

/// Validation and dedup statistics without the analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestSummary {
    pub lines_read: u64,
    pub events_parsed: u64,
    pub malformed_by_reason: BTreeMap<String, u64>,
    pub duplicates_removed: u64,
    pub events_kept: u64,
    pub users: u64,
    pub events_by_kind: BTreeMap<String, u64>,
}

pub fn ingest_summary(ingested: Ingested, config: &Config) -> IngestSummary {
    let parsed = ingested.events.len() as u64;
    let malformed_by_reason = malformed(&ingested);
    let kept = deduplicate(ingested.events, dedup_window(config));
    let mut users: Vec<&str> = kept.iter().map(|e| e.user_id.as_str()).collect();
    users.dedup();
    IngestSummary {
        lines_read: ingested.lines_read as u64,
        events_parsed: parsed,
        malformed_by_reason,
        duplicates_removed: parsed - kept.len() as u64,
        events_kept: kept.len() as u64,
        users: users.len() as u64,
        events_by_kind: by_kind(&kept),
    }
}

fn dedup_window(config: &Config) -> TimeDelta {
    TimeDelta::seconds(i64::try_from(config.dedup_window_secs).unwrap_or(i64::MAX / 1000))
}

fn malformed(ingested: &Ingested) -> BTreeMap<String, u64> {
    ingested
        .rejected_by_reason()
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v as u64))
        .collect()
}

fn by_kind(events: &[RawEvent]) -> BTreeMap<String, u64> {
    let mut out: BTreeMap<String, u64> = EventKind::ALL
        .iter()
        .map(|k| (k.as_str().to_owned(), 0))
        .collect();
    for ev in events {
        *out.entry(ev.kind().as_str().to_owned()).or_default() += 1;
    }
    out
}

pub fn run_pipeline(
    paths: &[PathBuf],
    config: &Config,
    window: Window,
) -> Result<AnalysisReport, PipelineError> {
    analyze(ingest_paths(paths)?, config, window)
}

/// Runs the analysis over already-ingested events.
pub fn analyze(
    ingested: Ingested,
    config: &Config,
    window: Window,
) -> Result<AnalysisReport, PipelineError> {
    if ingested.events.is_empty() {
        return Err(PipelineError::ZeroEvents {
            lines: ingested.lines_read,
        });
    }
    let mut quality = DataQuality {
        lines_read: ingested.lines_read as u64,
        events_parsed: ingested.events.len() as u64,
        malformed_lines: ingested.rejected.len() as u64,
        malformed_by_reason: malformed(&ingested),
        ..DataQuality::default()
    };

    let parsed = ingested.events.len();
    let events: Vec<RawEvent> = ingested
        .events
        .into_iter()
        .filter(|e| window.contains(local_date(e)))
        .collect();
    if events.is_empty() {
        return Err(PipelineError::EmptyWindow { parsed });
    }
    quality.outside_window = (parsed - events.len()) as u64;

    let first = events.iter().map(local_date).min().expect("non-empty");
    let last = events.iter().map(local_date).max().expect("non-empty");
    let span = (window.start.unwrap_or(first), window.end.unwrap_or(last));
    let raw_profile = temporal_profile(&events, Some(span));

    let before = events.len();
    let events = deduplicate(events, dedup_window(config));
    quality.duplicates_removed = (before - events.len()) as u64;
    quality.events_by_kind = by_kind(&events);
    let dedup_profile = temporal_profile(&events, Some(span));

    let feedback_payloads: Vec<_> = events
        .iter()
        .filter_map(|e| match &e.payload {
            Payload::Feedback(f) => Some(f.clone()),
            _ => None,
        })
        .collect();
    let feedback = summarize_feedback(&feedback_payloads.iter().collect::<Vec<_>>());

    let timelines = build_timelines(events);
    let returning = returning_user_cohort(&timelines);
    let analysed: Vec<_> = timelines
        .iter()
        .filter(|t| config.cohort == Cohort::All || returning.contains(t.user_id()))
        .collect();

    let parser = config.task_parser();
    let per_user: Vec<(Vec<SuggestionOutcome>, [usize; 3])> = analysed
        .par_iter()
        .map(|t| {
            let pairing = pair_outcomes(t, &parser);
            let outcomes = pairing
                .suggestions
                .iter()
                .map(|p| classify_outcome(p, config))
                .collect();
            (
                outcomes,
                [
                    pairing.orphan_actions,
                    pairing.unparseable_suggestions,
                    pairing.unparseable_documents,
                ],
            )
        })
        .collect();
    let mut outcomes = Vec::new();
    for (user_outcomes, [orphans, bad_suggestions, bad_documents]) in per_user {
        outcomes.extend(user_outcomes);
        quality.orphan_actions += orphans as u64;
        quality.unparseable_suggestions += bad_suggestions as u64;
        quality.unparseable_documents += bad_documents as u64;
    }

    let acceptance = acceptance_summary(&outcomes);
    quality.unresolved_outcomes = acceptance.unresolved;
    let accepted = acceptance
        .accepted_breakdown()
        .iter()
        .map(|&(name, n)| Share::new(name, n, acceptance.initially_accepted))
        .collect();
    let mut minor_counts: BTreeMap<MinorSubcategory, u64> = BTreeMap::new();
    let mut tag_counts: BTreeMap<ModuleEditTag, u64> = BTreeMap::new();
    let mut module_edited = 0;
    for o in &outcomes {
        if let Some(sub) = o.minor_subcategory {
            *minor_counts.entry(sub).or_default() += 1;
        }
        if o.decision == crate::event::Decision::Accepted && o.is_module_edit() {
            module_edited += 1;
            for tag in &o.module_edit_tags {
                *tag_counts.entry(*tag).or_default() += 1;
            }
        }
    }
    let minor_total: u64 = minor_counts.values().sum();
    let edit_distribution = EditDistribution {
        accepted,
        minor_subcategories: MinorSubcategory::ALL
            .iter()
            .map(|s| Share::new(s.as_str(), minor_counts.get(s).copied().unwrap_or(0), minor_total))
            .collect(),
    };
    let module_edits = ModuleEdits {
        module_edited,
        module_changed_minor: outcomes
            .iter()
            .filter(|o| o.category == Category::MinorEdit && o.module_changed)
            .count() as u64,
        tags: ModuleEditTag::ALL
            .iter()
            .map(|t| Share::new(t.as_str(), tag_counts.get(t).copied().unwrap_or(0), module_edited))
            .collect(),
    };

    let retention = retention_curve(&timelines, config.retention_horizon, span.1)?;
    let users = UserSummary {
        total_users: timelines.len() as u64,
        returning_users: returning.len() as u64,
        returning_share: Ratio::new(returning.len() as u64, timelines.len() as u64),
        analysed_users: analysed.len() as u64,
    };

    Ok(AnalysisReport {
        settings: Settings {
            window_start: window.start,
            window_end: window.end,
            dedup_window_secs: config.dedup_window_secs,
            edit_threshold: config.edit_threshold,
            rename_match_floor: config.rename_match_floor,
            retention_horizon: config.retention_horizon,
            cohort: config.cohort,
            retention_eligibility: "first_day + N <= window_end",
        },
        data_quality: quality,
        users,
        acceptance,
        edit_distribution,
        module_edits,
        retention,
        temporal: Temporal {
            raw: raw_profile,
            deduplicated: dedup_profile,
        },
        feedback,
    })
}
