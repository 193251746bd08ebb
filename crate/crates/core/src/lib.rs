//! Batch analytics over code-completion telemetry: event ingestion, gestalt
//! line diffing of accepted suggestions, Ansible task parsing, acceptance and
//! retention metrics, and feedback aggregation.

pub mod diff;
pub mod event;
pub mod task;
pub mod config;
pub mod edits;
pub mod feedback;
pub mod metrics;
pub mod ratio;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use config::{load_config, Cohort, Config, ConfigError};
pub use diff::{matching_blocks, similarity_ratio, MatchingBlock, SimilarityRatio};
pub use edits::{Category, MinorSubcategory, ModuleEditTag, SuggestionOutcome};
pub use event::{EventKind, RawEvent, UserTimeline};
pub use pipeline::{run_pipeline, PipelineError, Window};
pub use ratio::Ratio;
pub use report::{render_report, AnalysisReport, RenderError, RenderedFile};
pub use task::{parse_tasks, AnsibleTask, ModuleName, TaskError};
