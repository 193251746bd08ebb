//! The assembled analysis report and its json / csv / table renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::config::Cohort;
use crate::feedback::{FeedbackSummary, LabelDistribution};
use crate::metrics::{AcceptanceSummary, RetentionCurve, TemporalProfile};
use crate::ratio::{as_percent, Ratio};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub settings: Settings,
    pub data_quality: DataQuality,
    pub users: UserSummary,
    pub acceptance: AcceptanceSummary,
    pub edit_distribution: EditDistribution,
    pub module_edits: ModuleEdits,
    pub retention: RetentionCurve,
    pub temporal: Temporal,
    pub feedback: FeedbackSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub window_start: Option<NaiveDate>,
    pub window_end: Option<NaiveDate>,
    pub dedup_window_secs: u64,
    pub edit_threshold: f64,
    pub rename_match_floor: f64,
    pub retention_horizon: u32,
    pub cohort: Cohort,
    /// Retention denominators only count users whose first day is at least
    /// N days before the window end.
    pub retention_eligibility: &'static str,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DataQuality {
    pub lines_read: u64,
    pub events_parsed: u64,
    pub malformed_lines: u64,
    pub malformed_by_reason: BTreeMap<String, u64>,
    pub outside_window: u64,
    pub duplicates_removed: u64,
    pub events_by_kind: BTreeMap<String, u64>,
    pub orphan_actions: u64,
    pub unresolved_outcomes: u64,
    pub unparseable_suggestions: u64,
    pub unparseable_documents: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserSummary {
    pub total_users: u64,
    pub returning_users: u64,
    #[serde(serialize_with = "as_percent")]
    pub returning_share: Ratio,
    /// Users whose suggestions feed the acceptance and edit sections.
    pub analysed_users: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Share {
    pub name: String,
    pub count: u64,
    #[serde(serialize_with = "as_percent")]
    pub share: Ratio,
}

impl Share {
    pub fn new(name: impl Into<String>, count: u64, total: u64) -> Self {
        Share {
            name: name.into(),
            count,
            share: Ratio::new(count, total),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditDistribution {
    /// Slices of the accepted suggestions.
    pub accepted: Vec<Share>,
    /// Minor edits that kept their module, split by what changed.
    pub minor_subcategories: Vec<Share>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleEdits {
    /// Accepted suggestions whose module was renamed or shortened.
    pub module_edited: u64,
    /// Minor edits whose short module name changed.
    pub module_changed_minor: u64,
    /// A suggestion may carry several tags, so shares need not sum to 100.
    pub tags: Vec<Share>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Temporal {
    pub raw: TemporalProfile,
    pub deduplicated: TemporalProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("unknown report format `{0}` (expected json, csv or table)")]
    UnknownFormat(String),
}

impl FromStr for ReportFormat {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            other => Err(RenderError::UnknownFormat(other.to_owned())),
        }
    }
}

/// One output file. Json and table produce a single file, csv one per section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub fn render_report(report: &AnalysisReport, format: &str) -> Result<Vec<RenderedFile>, RenderError> {
    Ok(match format.parse()? {
        ReportFormat::Json => vec![RenderedFile {
            name: "report.json".into(),
            bytes: to_json(report).into_bytes(),
        }],
        ReportFormat::Csv => to_csv(report),
        ReportFormat::Table => vec![RenderedFile {
            name: "report.txt".into(),
            bytes: to_table(report).into_bytes(),
        }],
    })
}

/// Pretty-printed JSON with struct field order and a trailing newline.
pub fn to_json(report: &AnalysisReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

fn csv_file(name: &str, header: &[&str], rows: Vec<Vec<String>>) -> RenderedFile {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv write");
    for row in rows {
        w.write_record(&row).expect("in-memory csv write");
    }
    RenderedFile {
        name: name.into(),
        bytes: w.into_inner().expect("in-memory csv flush"),
    }
}

fn share_rows<'a>(group: &str, shares: &'a [Share]) -> impl Iterator<Item = Vec<String>> + 'a {
    let group = group.to_owned();
    shares.iter().map(move |s| {
        vec![
            group.clone(),
            s.name.clone(),
            s.count.to_string(),
            s.share.percent_2dp(),
        ]
    })
}

fn acceptance_rows(a: &AcceptanceSummary) -> Vec<(&'static str, String)> {
    vec![
        ("total_suggestions", a.total_suggestions.to_string()),
        ("initially_accepted", a.initially_accepted.to_string()),
        ("fully_accepted", a.fully_accepted.to_string()),
        ("minor_edits", a.minor_edits.to_string()),
        ("module_changed_minor", a.module_changed_minor.to_string()),
        ("major_edits", a.major_edits.to_string()),
        ("deleted_after_accept", a.deleted_after_accept.to_string()),
        ("unresolved", a.unresolved.to_string()),
        ("rejected", a.rejected.to_string()),
        ("ignored", a.ignored.to_string()),
        ("total_lines", a.total_lines.to_string()),
        ("total_tokens", a.total_tokens.to_string()),
        ("avg_lines_per_suggestion", a.avg_lines_per_suggestion.value_2dp()),
        ("avg_tokens_per_suggestion", a.avg_tokens_per_suggestion.value_2dp()),
        ("initial_rate", a.initial_rate.percent_2dp()),
        ("strong_rate", a.strong_rate.percent_2dp()),
    ]
}

fn label_rows(d: &LabelDistribution) -> impl Iterator<Item = Vec<String>> + '_ {
    let polarity = match d.polarity {
        crate::feedback::Polarity::Negative => "negative",
        crate::feedback::Polarity::Positive => "positive",
    };
    d.shares.iter().map(move |s| {
        vec![
            polarity.to_owned(),
            s.label.clone(),
            s.count.to_string(),
            s.share.percent_2dp(),
        ]
    })
}

fn to_csv(r: &AnalysisReport) -> Vec<RenderedFile> {
    let dq = &r.data_quality;
    let mut quality = vec![
        vec!["lines_read".into(), dq.lines_read.to_string()],
        vec!["events_parsed".into(), dq.events_parsed.to_string()],
        vec!["malformed_lines".into(), dq.malformed_lines.to_string()],
        vec!["outside_window".into(), dq.outside_window.to_string()],
        vec!["duplicates_removed".into(), dq.duplicates_removed.to_string()],
        vec!["orphan_actions".into(), dq.orphan_actions.to_string()],
        vec!["unresolved_outcomes".into(), dq.unresolved_outcomes.to_string()],
        vec!["unparseable_suggestions".into(), dq.unparseable_suggestions.to_string()],
        vec!["unparseable_documents".into(), dq.unparseable_documents.to_string()],
    ];
    quality.extend(
        dq.malformed_by_reason
            .iter()
            .map(|(k, v)| vec![format!("malformed.{k}"), v.to_string()]),
    );
    quality.extend(
        dq.events_by_kind
            .iter()
            .map(|(k, v)| vec![format!("events.{k}"), v.to_string()]),
    );

    let u = &r.users;
    let users = vec![
        vec!["total_users".into(), u.total_users.to_string()],
        vec!["returning_users".into(), u.returning_users.to_string()],
        vec!["returning_share".into(), u.returning_share.percent_2dp()],
        vec!["analysed_users".into(), u.analysed_users.to_string()],
    ];

    let acceptance = acceptance_rows(&r.acceptance)
        .into_iter()
        .map(|(k, v)| vec![k.to_owned(), v])
        .collect();

    let edits = share_rows("accepted", &r.edit_distribution.accepted)
        .chain(share_rows("minor_subcategory", &r.edit_distribution.minor_subcategories))
        .collect();

    let me = &r.module_edits;
    let mut module = vec![
        vec!["total".into(), "module_edited".into(), me.module_edited.to_string(), "100.00".into()],
        vec![
            "total".into(),
            "module_changed_minor".into(),
            me.module_changed_minor.to_string(),
            Ratio::new(me.module_changed_minor, me.module_edited).percent_2dp(),
        ],
    ];
    module.extend(share_rows("tag", &me.tags));

    let retention = r
        .retention
        .days
        .iter()
        .map(|d| {
            vec![
                d.day.to_string(),
                d.eligible.to_string(),
                d.returned.to_string(),
                d.percentage.percent_2dp(),
            ]
        })
        .collect();

    let mut daily = Vec::new();
    let mut weekday = Vec::new();
    for (series, p) in [("raw", &r.temporal.raw), ("deduplicated", &r.temporal.deduplicated)] {
        daily.extend(
            p.daily
                .iter()
                .map(|d| vec![series.to_owned(), d.date.to_string(), d.completions.to_string()]),
        );
        weekday.extend(p.weekday_means.iter().map(|w| {
            vec![
                series.to_owned(),
                w.weekday.clone(),
                w.dates.to_string(),
                w.total.to_string(),
                w.mean.value_2dp(),
            ]
        }));
    }

    let s = &r.feedback.stars;
    let mut stars: Vec<Vec<String>> = s
        .histogram
        .iter()
        .enumerate()
        .map(|(i, n)| vec![format!("stars_{}", i + 1), n.to_string(), Ratio::new(*n, s.total).percent_2dp()])
        .collect();
    stars.extend([
        vec!["satisfied".into(), (s.histogram[3] + s.histogram[4]).to_string(), s.satisfied_share.percent_2dp()],
        vec!["neutral".into(), s.histogram[2].to_string(), s.neutral_share.percent_2dp()],
        vec!["dissatisfied".into(), (s.histogram[0] + s.histogram[1]).to_string(), s.dissatisfied_share.percent_2dp()],
    ]);
    let labels = label_rows(&r.feedback.negative)
        .chain(label_rows(&r.feedback.positive))
        .collect();

    vec![
        csv_file("data_quality.csv", &["metric", "value"], quality),
        csv_file("users.csv", &["metric", "value"], users),
        csv_file("acceptance.csv", &["metric", "value"], acceptance),
        csv_file("edit_distribution.csv", &["group", "name", "count", "percent"], edits),
        csv_file("module_edits.csv", &["group", "name", "count", "percent"], module),
        csv_file("retention.csv", &["day", "eligible", "returned", "percent"], retention),
        csv_file("temporal_daily.csv", &["series", "date", "completions"], daily),
        csv_file("temporal_weekday.csv", &["series", "weekday", "dates", "total", "mean"], weekday),
        csv_file("feedback_stars.csv", &["bucket", "count", "percent"], stars),
        csv_file("feedback_labels.csv", &["polarity", "label", "count", "percent"], labels),
    ]
}

/// Left-aligned first column, right-aligned numbers.
fn table(out: &mut String, title: &str, header: &[&str], rows: &[Vec<String>]) {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |out: &mut String, cells: &[String]| {
        let mut text = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            if i == 0 {
                let _ = write!(text, "{cell:<w$}", w = widths[0]);
            } else {
                let _ = write!(text, "  {cell:>w$}", w = widths[i]);
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    out.push_str(title);
    out.push('\n');
    line(out, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    let rule: usize = widths.iter().sum::<usize>() + 2 * (cols - 1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for row in rows {
        line(out, row);
    }
    out.push('\n');
}

fn share_table_rows(shares: &[Share]) -> Vec<Vec<String>> {
    shares
        .iter()
        .map(|s| vec![s.name.clone(), s.count.to_string(), format!("{}%", s.share.percent_2dp())])
        .collect()
}

fn to_table(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let a = &r.acceptance;
    let rows: Vec<Vec<String>> = acceptance_rows(a)
        .into_iter()
        .map(|(k, v)| {
            let v = if k.ends_with("_rate") { format!("{v}%") } else { v };
            vec![k.to_owned(), v]
        })
        .collect();
    table(&mut out, "Acceptance", &["metric", "value"], &rows);
    table(
        &mut out,
        "Accepted suggestions",
        &["category", "count", "share"],
        &share_table_rows(&r.edit_distribution.accepted),
    );
    table(
        &mut out,
        "Minor edits",
        &["change", "count", "share"],
        &share_table_rows(&r.edit_distribution.minor_subcategories),
    );
    let mut rows = share_table_rows(&r.module_edits.tags);
    rows.push(vec![
        "module_edited".into(),
        r.module_edits.module_edited.to_string(),
        String::new(),
    ]);
    table(&mut out, "Module edits", &["tag", "count", "share"], &rows);

    let u = &r.users;
    table(
        &mut out,
        "Users",
        &["metric", "value"],
        &[
            vec!["total_users".into(), u.total_users.to_string()],
            vec!["returning_users".into(), u.returning_users.to_string()],
            vec!["returning_share".into(), format!("{}%", u.returning_share.percent_2dp())],
            vec!["analysed_users".into(), u.analysed_users.to_string()],
        ],
    );
    let rows: Vec<Vec<String>> = r
        .retention
        .days
        .iter()
        .map(|d| {
            vec![
                format!("day {}", d.day),
                d.eligible.to_string(),
                d.returned.to_string(),
                format!("{}%", d.percentage.percent_2dp()),
            ]
        })
        .collect();
    table(&mut out, "Retention", &["day", "eligible", "returned", "share"], &rows);

    let rows: Vec<Vec<String>> = r
        .temporal
        .raw
        .weekday_means
        .iter()
        .zip(&r.temporal.deduplicated.weekday_means)
        .map(|(raw, dedup)| vec![raw.weekday.clone(), raw.mean.value_2dp(), dedup.mean.value_2dp()])
        .collect();
    table(&mut out, "Completions per weekday", &["weekday", "raw", "deduplicated"], &rows);

    let s = &r.feedback.stars;
    table(
        &mut out,
        "Feedback",
        &["bucket", "count", "share"],
        &[
            vec!["satisfied (4-5)".into(), (s.histogram[3] + s.histogram[4]).to_string(), format!("{}%", s.satisfied_share.percent_2dp())],
            vec!["neutral (3)".into(), s.histogram[2].to_string(), format!("{}%", s.neutral_share.percent_2dp())],
            vec!["dissatisfied (1-2)".into(), (s.histogram[0] + s.histogram[1]).to_string(), format!("{}%", s.dissatisfied_share.percent_2dp())],
        ],
    );
    for (title, d) in [("Negative comments", &r.feedback.negative), ("Positive comments", &r.feedback.positive)] {
        let rows: Vec<Vec<String>> = d
            .shares
            .iter()
            .map(|s| vec![s.label.clone(), s.count.to_string(), format!("{}%", s.share.percent_2dp())])
            .collect();
        table(&mut out, title, &["label", "count", "share"], &rows);
    }

    let dq = &r.data_quality;
    let mut rows = vec![
        vec!["lines_read".into(), dq.lines_read.to_string()],
        vec!["malformed_lines".into(), dq.malformed_lines.to_string()],
        vec!["outside_window".into(), dq.outside_window.to_string()],
        vec!["duplicates_removed".into(), dq.duplicates_removed.to_string()],
        vec!["orphan_actions".into(), dq.orphan_actions.to_string()],
        vec!["unresolved_outcomes".into(), dq.unresolved_outcomes.to_string()],
        vec!["unparseable_suggestions".into(), dq.unparseable_suggestions.to_string()],
        vec!["unparseable_documents".into(), dq.unparseable_documents.to_string()],
    ];
    rows.extend(
        dq.malformed_by_reason
            .iter()
            .map(|(k, v)| vec![format!("  {k}"), v.to_string()]),
    );
    table(&mut out, "Data quality", &["metric", "value"], &rows);
    out.truncate(out.trim_end().len());
    out.push('\n');
    out
}
