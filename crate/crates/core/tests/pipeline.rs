mod common;

use std::path::PathBuf;

use completion_analytics::config::{Cohort, Config};
use completion_analytics::pipeline::{ingest_paths, ingest_summary, run_pipeline, PipelineError, Window};
use completion_analytics::report::{render_report, to_json, RenderError};
use completion_analytics::synth;

#[test]
fn table_one_fixture_reproduces_every_count() {
    let report = common::analyse(&synth::usage_log(&synth::UsagePlan::table_one()), &Config::default()).unwrap();
    let a = &report.acceptance;
    assert_eq!(a.total_suggestions, 62_099);
    assert_eq!(a.initially_accepted, 40_938);
    assert_eq!(a.fully_accepted, 24_811);
    assert_eq!(a.minor_edits, 5_672);
    assert_eq!(a.major_edits, 2_713);
    assert_eq!(a.deleted_after_accept, 7_436);
    assert_eq!(a.module_changed_minor, 306);
    assert_eq!(a.avg_lines_per_suggestion.value_2dp(), "6.13");
    assert_eq!(a.avg_tokens_per_suggestion.value_2dp(), "20.10");
    assert_eq!(a.initial_rate.percent_2dp(), "65.92");
    assert_eq!(a.strong_rate.percent_2dp(), "49.09");
    assert_eq!(report.users.total_users, 10_696);
    assert_eq!(report.users.returning_share.percent_2dp(), "36.56");
    assert_eq!(report.data_quality.duplicates_removed, 6_210);
    assert_eq!(report.data_quality.unresolved_outcomes, 0);
    let json = to_json(&report);
    assert!(json.contains("\"initial_rate\": 65.92"));
    assert!(json.contains("\"strong_rate\": 49.09"));

    let minor: u64 = report.edit_distribution.minor_subcategories.iter().map(|s| s.count).sum();
    assert_eq!(minor, 5_672);
}

#[test]
fn all_users_cohort_adds_single_day_rejections() {
    let plan = synth::UsagePlan::scaled(3_000);
    let events = synth::usage_log(&plan);
    let returning = common::analyse(&events, &Config::default()).unwrap();
    let all = common::analyse(&events, &Config { cohort: Cohort::All, ..Config::default() }).unwrap();
    assert_eq!(
        all.acceptance.total_suggestions,
        returning.acceptance.total_suggestions + plan.single_day_users as u64
    );
    assert_eq!(all.acceptance.rejected, returning.acceptance.rejected + plan.single_day_users as u64);
}

#[test]
fn same_input_gives_identical_bytes() {
    let events = synth::scale_log(5_000);
    let dir = tempfile::tempdir().unwrap();
    let path = common::write_log(&dir, "e.jsonl", &events, 101);
    let run = || {
        let r = run_pipeline(std::slice::from_ref(&path), &Config::default(), Window::default()).unwrap();
        ["json", "csv", "table"]
            .iter()
            .flat_map(|f| render_report(&r, f).unwrap())
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn input_split_across_files_gives_the_same_report() {
    let events = synth::scale_log(3_000);
    let dir = tempfile::tempdir().unwrap();
    let one = common::write_log(&dir, "all.jsonl", &events, 0);
    let (a, b) = events.split_at(events.len() / 3);
    let parts = [common::write_log(&dir, "a.jsonl", b, 0), common::write_log(&dir, "b.jsonl", a, 0)];
    let whole = run_pipeline(&[one], &Config::default(), Window::default()).unwrap();
    let split = run_pipeline(&parts, &Config::default(), Window::default()).unwrap();
    assert_eq!(to_json(&whole), to_json(&split));
}

#[test]
fn empty_log_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.jsonl");
    std::fs::write(&path, "\n{not json}\n").unwrap();
    let err = run_pipeline(&[path], &Config::default(), Window::default()).unwrap_err();
    assert!(matches!(err, PipelineError::ZeroEvents { lines: 1 }));
}

#[test]
fn missing_file_is_an_io_error() {
    let err = run_pipeline(&[PathBuf::from("/no/such/file.jsonl")], &Config::default(), Window::default()).unwrap_err();
    assert!(matches!(err, PipelineError::Io { .. }));
}

#[test]
fn window_filters_and_counts() {
    let events = synth::cohort_log(100, 40);
    let start = synth::epoch() + chrono::TimeDelta::days(3);
    let window = Window { start: Some(start), end: Some(start + chrono::TimeDelta::days(6)) };
    let dir = tempfile::tempdir().unwrap();
    let path = common::write_log(&dir, "c.jsonl", &events, 0);
    let report = run_pipeline(std::slice::from_ref(&path), &Config::default(), window).unwrap();
    let inside = events
        .iter()
        .filter(|e| window.contains(completion_analytics::event::local_date(e)))
        .count() as u64;
    assert_eq!(report.data_quality.outside_window, events.len() as u64 - inside);
    assert_eq!(report.temporal.raw.daily.len(), 7);
    assert_eq!(report.retention.window_end, start + chrono::TimeDelta::days(6));

    let far = Window { start: Some(synth::epoch() + chrono::TimeDelta::days(400)), end: None };
    assert!(matches!(
        run_pipeline(&[path], &Config::default(), far),
        Err(PipelineError::EmptyWindow { .. })
    ));
}

#[test]
fn renderings() {
    let report = common::analyse(&synth::scale_log(4_000), &Config::default()).unwrap();
    assert_eq!(render_report(&report, "xml"), Err(RenderError::UnknownFormat("xml".into())));

    let csv = render_report(&report, "csv").unwrap();
    let names: Vec<_> = csv.iter().map(|f| f.name.as_str()).collect();
    assert!(names.contains(&"acceptance.csv") && names.contains(&"retention.csv"));
    let acceptance = String::from_utf8(csv.iter().find(|f| f.name == "acceptance.csv").unwrap().bytes.clone()).unwrap();
    assert!(acceptance.starts_with("metric,value\n"));
    assert!(acceptance.contains(&format!("initial_rate,{}", report.acceptance.initial_rate.percent_2dp())));

    let table = String::from_utf8(render_report(&report, "table").unwrap().remove(0).bytes).unwrap();
    for share in &report.edit_distribution.accepted {
        let row = table.lines().find(|l| l.starts_with(&share.name) && l.ends_with('%')).unwrap();
        assert!(row.ends_with(&format!("{}%", share.share.percent_2dp())), "{row}");
    }
}

#[test]
fn ingest_summary_reports_duplicates_and_bad_lines() {
    let events = synth::scale_log(2_000);
    let dir = tempfile::tempdir().unwrap();
    let path = common::write_log(&dir, "e.jsonl", &events, 50);
    let summary = ingest_summary(ingest_paths(&[path]).unwrap(), &Config::default());
    assert_eq!(summary.events_parsed, events.len() as u64);
    assert!(summary.duplicates_removed > 0);
    assert_eq!(summary.events_kept + summary.duplicates_removed, summary.events_parsed);
    assert!(summary.malformed_by_reason.values().sum::<u64>() > 0);
}
