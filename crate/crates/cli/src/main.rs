use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use completion_analytics::pipeline::{analyze, ingest_paths, ingest_summary};
use completion_analytics::report::to_json;
use completion_analytics::synth;
use completion_analytics::{load_config, render_report, Config, RenderError, Window};

/// Batch analytics over code-completion telemetry logs (JSONL).
#[derive(Debug, Parser)]
#[command(name = "completion-analytics", version)]
struct Cli {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate event logs and print parse and duplicate statistics.
    Ingest(Inputs),
    /// Run the full analysis and write the JSON report.
    Analyze {
        #[command(flatten)]
        inputs: Inputs,
        /// Output directory; stdout when omitted.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run the analysis and render it as json, csv (one file per section) or table.
    Report {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "table")]
        format: String,
        /// Output directory; stdout when omitted.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Write a synthetic event log with planted counts.
    Generate {
        #[arg(long, value_enum)]
        fixture: Fixture,
        /// Approximate event count for the scale fixture.
        #[arg(long, default_value_t = 100_000)]
        size: usize,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Inputs {
    /// One or more JSONL event files.
    #[arg(long, required = true, num_args = 1.., value_name = "PATH")]
    events: Vec<PathBuf>,
    /// First local date to include (YYYY-MM-DD).
    #[arg(long, value_name = "DATE")]
    window_start: Option<NaiveDate>,
    /// Last local date to include (YYYY-MM-DD).
    #[arg(long, value_name = "DATE")]
    window_end: Option<NaiveDate>,
}

impl Inputs {
    fn window(&self) -> Window {
        Window {
            start: self.window_start,
            end: self.window_end,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fixture {
    TableOne,
    ModuleEdits,
    Feedback,
    Retention,
    Cohort,
    Scale,
}

enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn data<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Data(e.into())
}

fn write_output(out: Option<&Path>, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))
                .map_err(data)?;
            let path = dir.join(name);
            fs::write(&path, bytes)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(data)
        }
        None => io::stdout().write_all(bytes).context("writing stdout").map_err(data),
    }
}

fn check_window(inputs: &Inputs) -> Result<(), Failure> {
    if let (Some(s), Some(e)) = (inputs.window_start, inputs.window_end) {
        if s > e {
            return Err(usage(anyhow::anyhow!("--window-start {s} is after --window-end {e}")));
        }
    }
    Ok(())
}

fn analysis(inputs: &Inputs, config: &Config) -> Result<completion_analytics::AnalysisReport, Failure> {
    check_window(inputs)?;
    let ingested = ingest_paths(&inputs.events).map_err(data)?;
    for rejected in ingested.rejected.iter().take(5) {
        eprintln!("skipped {rejected}");
    }
    if ingested.rejected.len() > 5 {
        eprintln!("skipped {} more malformed lines", ingested.rejected.len() - 5);
    }
    analyze(ingested, config, inputs.window()).map_err(data)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = load_config(cli.config.as_deref()).map_err(usage)?;
    match cli.command {
        Command::Ingest(inputs) => {
            check_window(&inputs)?;
            let mut ingested = ingest_paths(&inputs.events).map_err(data)?;
            let window = inputs.window();
            ingested
                .events
                .retain(|e| window.contains(completion_analytics::event::local_date(e)));
            let summary = ingest_summary(ingested, &config);
            let mut text = serde_json::to_string_pretty(&summary).map_err(data)?;
            text.push('\n');
            write_output(None, "", text.as_bytes())?;
            if summary.events_parsed == 0 {
                return Err(data(anyhow::anyhow!("no parseable events")));
            }
            Ok(())
        }
        Command::Analyze { inputs, out } => {
            let report = analysis(&inputs, &config)?;
            write_output(out.as_deref(), "report.json", to_json(&report).as_bytes())
        }
        Command::Report {
            inputs,
            format,
            out,
        } => {
            // Reject a bad format before doing any work.
            let _: completion_analytics::report::ReportFormat = format.parse().map_err(usage)?;
            let report = analysis(&inputs, &config)?;
            let files = render_report(&report, &format).map_err(|e: RenderError| usage(e))?;
            let multi = files.len() > 1 && out.is_none();
            for file in files {
                if multi {
                    write_output(None, "", format!("# {}\n", file.name).as_bytes())?;
                }
                write_output(out.as_deref(), &file.name, &file.bytes)?;
            }
            Ok(())
        }
        Command::Generate { fixture, size, out } => {
            let events = match fixture {
                Fixture::TableOne => synth::usage_log(&synth::UsagePlan::table_one()),
                Fixture::ModuleEdits => synth::module_edit_log(400),
                Fixture::Feedback => synth::feedback_log(),
                Fixture::Retention => synth::retention_log(10_000, 4_479, 30),
                Fixture::Cohort => synth::cohort_log(10_696, 3_910),
                Fixture::Scale => synth::scale_log(size),
            };
            let result = match &out {
                Some(path) => fs::File::create(path)
                    .map(io::BufWriter::new)
                    .and_then(|mut w| synth::write_jsonl(&events, 0, &mut w).and_then(|_| w.flush()))
                    .with_context(|| format!("writing {}", path.display())),
                None => synth::write_jsonl(&events, 0, io::stdout().lock()).context("writing stdout"),
            };
            result.map_err(data)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
