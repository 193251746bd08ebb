//! Joins suggestion, action and content events into outcomes and classifies
//! what happened to each accepted suggestion after it landed in the document.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::config::Config;
use crate::diff::{comparison_lines, similarity_ratio};
use crate::event::{Decision, Payload, UserTimeline};
use crate::task::{flatten_tasks, AnsibleTask, TaskParser};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    FullyAccepted,
    MinorEdit,
    MajorEdit,
    DeletedAfterAccept,
    /// Accepted, but no later content snapshot was seen.
    Unresolved,
    Rejected,
    Ignored,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::FullyAccepted => "fully_accepted",
            Category::MinorEdit => "minor_edit",
            Category::MajorEdit => "major_edit",
            Category::DeletedAfterAccept => "deleted_after_accept",
            Category::Unresolved => "unresolved",
            Category::Rejected => "rejected",
            Category::Ignored => "ignored",
        }
    }
}

/// What changed in the module options of a minor edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinorSubcategory {
    ValueOnly,
    KeyOnly,
    KeyAndValue,
    OptionAdded,
    OptionRemoved,
    Mixed,
    /// Options identical; the edit touched directives, the module spelling
    /// or formatting.
    OptionsUnchanged,
}

impl MinorSubcategory {
    pub const ALL: [MinorSubcategory; 7] = [
        MinorSubcategory::ValueOnly,
        MinorSubcategory::KeyOnly,
        MinorSubcategory::KeyAndValue,
        MinorSubcategory::OptionAdded,
        MinorSubcategory::OptionRemoved,
        MinorSubcategory::Mixed,
        MinorSubcategory::OptionsUnchanged,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MinorSubcategory::ValueOnly => "value_only",
            MinorSubcategory::KeyOnly => "key_only",
            MinorSubcategory::KeyAndValue => "key_and_value",
            MinorSubcategory::OptionAdded => "option_added",
            MinorSubcategory::OptionRemoved => "option_removed",
            MinorSubcategory::Mixed => "mixed",
            MinorSubcategory::OptionsUnchanged => "options_unchanged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleEditTag {
    FqcnShortened,
    Reorganization,
    CommandShell,
    SimilarModule,
    Other,
}

impl ModuleEditTag {
    pub const ALL: [ModuleEditTag; 5] = [
        ModuleEditTag::FqcnShortened,
        ModuleEditTag::Reorganization,
        ModuleEditTag::CommandShell,
        ModuleEditTag::SimilarModule,
        ModuleEditTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModuleEditTag::FqcnShortened => "fqcn_shortened",
            ModuleEditTag::Reorganization => "reorganization",
            ModuleEditTag::CommandShell => "command_shell",
            ModuleEditTag::SimilarModule => "similar_module",
            ModuleEditTag::Other => "other",
        }
    }
}

/// Directive keys whose appearance in the committed task counts as
/// restructuring the suggestion.
pub const REORGANIZATION_KEYS: &[&str] = &["block", "tags", "tag", "register", "loop", "become"];

const COMMAND_LIKE: &[&str] = &["command", "shell"];

/// One shown suggestion joined with the user's decision and, for accepted
/// ones, the tasks of the next document snapshot.
#[derive(Debug, Clone)]
pub struct PairedSuggestion {
    pub suggestion_id: String,
    pub user_id: String,
    pub decision: Decision,
    /// `None` when the suggestion text is not a parseable task.
    pub shown_task: Option<AnsibleTask>,
    /// Lines compared against the committed task (name line excluded).
    pub shown_lines: Vec<String>,
    pub line_count: u32,
    pub token_count: u32,
    /// Tasks of the first parseable content snapshot after acceptance.
    pub committed_document: Option<Arc<Vec<AnsibleTask>>>,
}

#[derive(Debug, Clone, Default)]
pub struct Pairing {
    pub suggestions: Vec<PairedSuggestion>,
    /// Actions referring to no suggestion in the user's timeline.
    pub orphan_actions: usize,
    pub unparseable_suggestions: usize,
    /// Content snapshots skipped because they did not parse as tasks.
    pub unparseable_documents: usize,
}

/// Strips `- name:` framing from a completion prompt.
fn prompt_name(prompt: &str) -> Option<String> {
    let p = prompt.trim();
    let p = p.strip_prefix('-').map_or(p, str::trim_start);
    let p = p.strip_prefix("name:").map_or(p, str::trim);
    let p = p
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .or_else(|| p.strip_prefix('\'').and_then(|s| s.strip_suffix('\'')))
        .unwrap_or(p);
    (!p.is_empty()).then(|| p.to_owned())
}

fn dedent(text: &str) -> Vec<String> {
    let lines = comparison_lines(text);
    let indent = lines
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    lines
        .iter()
        .map(|l| l.get(indent..).unwrap_or("").to_owned())
        .collect()
}

/// Joins each suggestion in `timeline` with its action (by id) and, when
/// accepted, with the nearest later content snapshot that parses.
pub fn pair_outcomes(timeline: &UserTimeline, parser: &TaskParser) -> Pairing {
    let events = timeline.events();
    let mut prompts: HashMap<&str, &str> = HashMap::new();
    let mut actions: HashMap<&str, (usize, Decision)> = HashMap::new();
    let mut suggestion_ids: BTreeSet<&str> = BTreeSet::new();
    let mut content_positions = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        match &ev.payload {
            Payload::Completion(c) => {
                prompts.entry(&c.suggestion_id).or_insert(&c.prompt);
            }
            Payload::Suggestion(s) => {
                suggestion_ids.insert(&s.suggestion_id);
            }
            Payload::Action(a) => {
                actions.entry(&a.suggestion_id).or_insert((i, a.action));
            }
            Payload::Content(_) => content_positions.push(i),
            Payload::Feedback(_) => {}
        }
    }

    let mut pairing = Pairing {
        orphan_actions: events
            .iter()
            .filter(|ev| matches!(&ev.payload, Payload::Action(a) if !suggestion_ids.contains(a.suggestion_id.as_str())))
            .count(),
        ..Pairing::default()
    };

    let mut parsed_docs: HashMap<usize, Option<Arc<Vec<AnsibleTask>>>> = HashMap::new();
    let mut seen = BTreeSet::new();
    for ev in events {
        let Payload::Suggestion(s) = &ev.payload else {
            continue;
        };
        if !seen.insert(s.suggestion_id.as_str()) {
            continue;
        }
        let (shown_task, shown_lines) = match parser.parse_tasks(&s.suggestion_text) {
            Ok(mut tasks) if !tasks.is_empty() => {
                let mut task = tasks.swap_remove(0);
                if task.name.is_none() {
                    task.name = prompts
                        .get(s.suggestion_id.as_str())
                        .and_then(|p| prompt_name(p));
                }
                let lines = task.body_lines.clone();
                (Some(task), lines)
            }
            _ => {
                pairing.unparseable_suggestions += 1;
                (None, dedent(&s.suggestion_text))
            }
        };

        let (decision, committed_document) = match actions.get(s.suggestion_id.as_str()) {
            None => (Decision::Ignored, None),
            Some(&(at, Decision::Accepted)) => {
                let mut doc = None;
                for &pos in content_positions.iter().filter(|&&p| p > at) {
                    let parsed = parsed_docs.entry(pos).or_insert_with(|| {
                        let Payload::Content(c) = &events[pos].payload else {
                            unreachable!("content position holds a content event")
                        };
                        parser.parse_tasks(&c.document_text).ok().map(Arc::new)
                    });
                    if let Some(tasks) = parsed {
                        doc = Some(Arc::clone(tasks));
                        break;
                    }
                }
                (Decision::Accepted, doc)
            }
            Some(&(_, other)) => (other, None),
        };

        pairing.suggestions.push(PairedSuggestion {
            suggestion_id: s.suggestion_id.clone(),
            user_id: ev.user_id.clone(),
            decision,
            shown_task,
            shown_lines,
            line_count: s.line_count,
            token_count: s.token_count,
            committed_document,
        });
    }
    pairing.unparseable_documents = parsed_docs.values().filter(|d| d.is_none()).count();
    pairing
}

/// Finds the committed form of a shown suggestion: a task with the same
/// name (best body match among several), otherwise the most similar task if
/// its similarity reaches `floor`. Block containers are never candidates.
pub fn match_committed_task<'a>(
    shown_name: Option<&str>,
    shown_lines: &[String],
    document: &'a [AnsibleTask],
    floor: f64,
) -> Option<&'a AnsibleTask> {
    let candidates: Vec<&AnsibleTask> = flatten_tasks(document)
        .into_iter()
        .filter(|t| t.module.is_some())
        .collect();
    let best = |pool: &mut dyn Iterator<Item = &'a AnsibleTask>| {
        let mut best: Option<(&AnsibleTask, f64)> = None;
        for t in pool {
            let r = similarity_ratio(shown_lines, &t.body_lines).value;
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((t, r));
            }
        }
        best
    };
    if let Some(name) = shown_name {
        let mut named = candidates
            .iter()
            .copied()
            .filter(|t| t.name.as_deref() == Some(name));
        if let Some((t, _)) = best(&mut named) {
            return Some(t);
        }
    }
    best(&mut candidates.iter().copied())
        .filter(|&(_, r)| r >= floor)
        .map(|(t, _)| t)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuggestionOutcome {
    pub suggestion_id: String,
    pub user_id: String,
    pub decision: Decision,
    pub category: Category,
    #[serde(skip)]
    pub shown_task: Option<AnsibleTask>,
    #[serde(skip)]
    pub committed_task: Option<AnsibleTask>,
    pub edit_fraction: Option<f64>,
    /// Short module names differ between shown and committed task.
    pub module_changed: bool,
    pub minor_subcategory: Option<MinorSubcategory>,
    pub module_edit_tags: BTreeSet<ModuleEditTag>,
    pub line_count: u32,
    pub token_count: u32,
}

impl SuggestionOutcome {
    /// Module renamed (short name changed) or shortened from its FQCN.
    pub fn is_module_edit(&self) -> bool {
        self.module_changed || self.module_edit_tags.contains(&ModuleEditTag::FqcnShortened)
    }
}

pub fn classify_outcome(paired: &PairedSuggestion, config: &Config) -> SuggestionOutcome {
    let mut outcome = SuggestionOutcome {
        suggestion_id: paired.suggestion_id.clone(),
        user_id: paired.user_id.clone(),
        decision: paired.decision,
        category: match paired.decision {
            Decision::Rejected => Category::Rejected,
            Decision::Ignored => Category::Ignored,
            Decision::Accepted => Category::Unresolved,
        },
        shown_task: paired.shown_task.clone(),
        committed_task: None,
        edit_fraction: None,
        module_changed: false,
        minor_subcategory: None,
        module_edit_tags: BTreeSet::new(),
        line_count: paired.line_count,
        token_count: paired.token_count,
    };
    if paired.decision != Decision::Accepted {
        return outcome;
    }
    let Some(document) = &paired.committed_document else {
        return outcome;
    };
    let shown_name = paired.shown_task.as_ref().and_then(|t| t.name.as_deref());
    let Some(committed) = match_committed_task(
        shown_name,
        &paired.shown_lines,
        document,
        config.rename_match_floor,
    ) else {
        outcome.category = Category::DeletedAfterAccept;
        return outcome;
    };

    let ratio = similarity_ratio(&paired.shown_lines, &committed.body_lines);
    let fraction = 1.0 - ratio.value;
    outcome.edit_fraction = Some(fraction);
    outcome.category = if 2 * ratio.matched_total == ratio.combined_length {
        Category::FullyAccepted
    } else if fraction < config.edit_threshold {
        Category::MinorEdit
    } else {
        Category::MajorEdit
    };

    if let Some(shown) = &paired.shown_task {
        outcome.module_changed = match (&shown.module, &committed.module) {
            (Some(a), Some(b)) => a.short_name() != b.short_name(),
            _ => false,
        };
        outcome.module_edit_tags = module_edit_tags(shown, committed, config);
        if outcome.category == Category::MinorEdit && !outcome.module_changed {
            outcome.minor_subcategory = Some(minor_subcategory(shown, committed));
        }
    }
    outcome.committed_task = Some(committed.clone());
    outcome
}

/// Compares module options of two tasks with the same module.
pub fn minor_subcategory(shown: &AnsibleTask, committed: &AnsibleTask) -> MinorSubcategory {
    let (before, after) = (&shown.options, &committed.options);
    let removed: Vec<&String> = before.keys().filter(|k| !after.contains_key(*k)).collect();
    let added: Vec<&String> = after.keys().filter(|k| !before.contains_key(*k)).collect();
    let common_unchanged = before
        .iter()
        .filter(|(k, _)| after.contains_key(*k))
        .all(|(k, v)| after[k.as_str()] == *v);

    match (removed.is_empty(), added.is_empty()) {
        (true, true) if common_unchanged => MinorSubcategory::OptionsUnchanged,
        (true, true) => MinorSubcategory::ValueOnly,
        (true, false) if common_unchanged => MinorSubcategory::OptionAdded,
        (false, true) if common_unchanged => MinorSubcategory::OptionRemoved,
        (false, false) if removed.len() == added.len() => {
            let values = |keys: &[&String], map: &indexmap::IndexMap<String, serde_json::Value>| {
                let mut v: Vec<String> = keys.iter().map(|k| map[k.as_str()].to_string()).collect();
                v.sort();
                v
            };
            if common_unchanged && values(&removed, before) == values(&added, after) {
                MinorSubcategory::KeyOnly
            } else {
                MinorSubcategory::KeyAndValue
            }
        }
        _ => MinorSubcategory::Mixed,
    }
}

/// Tags explaining a module-level edit. Empty unless the short module name
/// changed or an FQCN was shortened.
pub fn module_edit_tags(
    shown: &AnsibleTask,
    committed: &AnsibleTask,
    config: &Config,
) -> BTreeSet<ModuleEditTag> {
    let mut tags = BTreeSet::new();
    let (Some(before), Some(after)) = (&shown.module, &committed.module) else {
        return tags;
    };
    let (a, b) = (before.short_name(), after.short_name());
    let changed = a != b;
    let shortened = before.is_fqcn() && !after.is_fqcn() && a == b;
    if !changed && !shortened {
        return tags;
    }
    if shortened {
        tags.insert(ModuleEditTag::FqcnShortened);
    }
    let added_structure = REORGANIZATION_KEYS
        .iter()
        .any(|k| committed.directives.contains_key(*k) && !shown.directives.contains_key(*k))
        || (committed.in_block && !shown.in_block);
    if added_structure {
        tags.insert(ModuleEditTag::Reorganization);
    }
    if changed {
        if COMMAND_LIKE.contains(&a) || COMMAND_LIKE.contains(&b) {
            tags.insert(ModuleEditTag::CommandShell);
        } else if config.are_similar_modules(a, b) {
            tags.insert(ModuleEditTag::SimilarModule);
        }
        if tags.is_empty() {
            tags.insert(ModuleEditTag::Other);
        }
    }
    tags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{
        ActionPayload, CompletionPayload, ContentPayload, RawEvent, SuggestionPayload,
    };
    use crate::task::parse_tasks;
    use chrono::{DateTime, TimeDelta};

    const SHOWN: &str = "\
ansible.builtin.copy:
  src: files/app.conf
  dest: /etc/app.conf
  owner: root
  group: root
  mode: '0644'";

    struct Log {
        events: Vec<RawEvent>,
        clock: i64,
    }

    impl Log {
        fn new() -> Self {
            Log {
                events: Vec::new(),
                clock: 0,
            }
        }

        fn push(&mut self, payload: Payload) {
            self.clock += 30;
            let ts = DateTime::parse_from_rfc3339("2023-06-01T09:00:00+00:00").unwrap()
                + TimeDelta::seconds(self.clock);
            self.events.push(RawEvent {
                event_id: format!("e{:04}", self.events.len()),
                user_id: "u".into(),
                timestamp: ts,
                payload,
            });
        }

        fn suggest(&mut self, id: &str, name: &str, text: &str) {
            self.push(Payload::Completion(CompletionPayload {
                suggestion_id: id.into(),
                prompt: format!("- name: {name}"),
                context: String::new(),
            }));
            self.push(Payload::Suggestion(SuggestionPayload {
                suggestion_id: id.into(),
                suggestion_text: text.into(),
                line_count: text.lines().count() as u32,
                token_count: 10,
            }));
        }

        fn act(&mut self, id: &str, action: Decision) {
            self.push(Payload::Action(ActionPayload {
                suggestion_id: id.into(),
                action,
            }));
        }

        fn content(&mut self, doc: &str) {
            self.push(Payload::Content(ContentPayload {
                suggestion_id: None,
                document_text: doc.into(),
            }));
        }

        fn outcomes(self) -> (Pairing, Vec<SuggestionOutcome>) {
            let tl = UserTimeline::new(self.events).unwrap();
            let cfg = Config::default();
            let pairing = pair_outcomes(&tl, &cfg.task_parser());
            let out = pairing
                .suggestions
                .iter()
                .map(|p| classify_outcome(p, &cfg))
                .collect();
            (pairing, out)
        }
    }

    fn committed(name: &str, body: &str) -> String {
        let mut doc = format!("- name: {name}\n");
        for l in body.lines() {
            doc.push_str("  ");
            doc.push_str(l);
            doc.push('\n');
        }
        doc
    }

    fn task(text: &str) -> AnsibleTask {
        parse_tasks(text).unwrap().remove(0)
    }

    #[test]
    fn accepted_then_committed_unchanged() {
        let mut log = Log::new();
        log.suggest("s1", "Deploy config", SHOWN);
        log.act("s1", Decision::Accepted);
        log.content(&committed("Deploy config", SHOWN));
        let (pairing, out) = log.outcomes();
        assert!(pairing.suggestions[0].committed_document.is_some());
        assert_eq!(out[0].category, Category::FullyAccepted);
        assert_eq!(out[0].edit_fraction, Some(0.0));
        assert!(out[0].module_edit_tags.is_empty());
    }

    #[test]
    fn rejected_has_no_diff() {
        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Rejected);
        log.content(&committed("x", SHOWN));
        let (_, out) = log.outcomes();
        assert_eq!(out[0].category, Category::Rejected);
        assert_eq!(out[0].edit_fraction, None);
    }

    #[test]
    fn missing_action_means_ignored_and_stray_action_is_orphan() {
        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("ghost", Decision::Accepted);
        let (pairing, out) = log.outcomes();
        assert_eq!(out[0].category, Category::Ignored);
        assert_eq!(pairing.orphan_actions, 1);
    }

    #[test]
    fn accepted_without_later_content_is_unresolved() {
        let mut log = Log::new();
        log.content(&committed("x", SHOWN));
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Accepted);
        let (_, out) = log.outcomes();
        assert_eq!(out[0].category, Category::Unresolved);
    }

    #[test]
    fn unparseable_snapshot_is_skipped_for_the_next_one() {
        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Accepted);
        log.content("- name: x\n  copy: [\n");
        log.content(&committed("x", SHOWN));
        let (pairing, out) = log.outcomes();
        assert_eq!(pairing.unparseable_documents, 1);
        assert_eq!(out[0].category, Category::FullyAccepted);
    }

    #[test]
    fn task_missing_from_snapshot_is_deleted() {
        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Accepted);
        log.content("- name: other\n  ansible.builtin.ping:\n");
        let (_, out) = log.outcomes();
        assert_eq!(out[0].category, Category::DeletedAfterAccept);

        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Accepted);
        log.content("");
        let (_, out) = log.outcomes();
        assert_eq!(out[0].category, Category::DeletedAfterAccept);
    }

    #[test]
    fn one_value_line_of_six_is_minor() {
        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Accepted);
        log.content(&committed("x", &SHOWN.replace("/etc/app.conf", "/opt/app.conf")));
        let (_, out) = log.outcomes();
        assert_eq!(out[0].category, Category::MinorEdit);
        assert!((out[0].edit_fraction.unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(out[0].minor_subcategory, Some(MinorSubcategory::ValueOnly));
        assert!(!out[0].module_changed);
    }

    #[test]
    fn fully_rewritten_body_with_same_name_is_major() {
        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Accepted);
        log.content(&committed("x", "ansible.builtin.debug:\n  msg: nothing in common"));
        let (_, out) = log.outcomes();
        assert_eq!(out[0].category, Category::MajorEdit);
        assert_eq!(out[0].edit_fraction, Some(1.0));
        assert!(out[0].module_changed);
        assert_eq!(out[0].minor_subcategory, None);
    }

    #[test]
    fn matching_prefers_name_then_similarity() {
        let body: Vec<String> = SHOWN.lines().map(str::to_owned).collect();
        let doc = parse_tasks(&format!(
            "{}{}",
            committed("unrelated", "ansible.builtin.ping:"),
            committed("Deploy config", SHOWN)
        ))
        .unwrap();
        let hit = match_committed_task(Some("Deploy config"), &body, &doc, 0.3).unwrap();
        assert_eq!(hit.name.as_deref(), Some("Deploy config"));

        let renamed = parse_tasks(&format!(
            "{}{}",
            committed("unrelated", "ansible.builtin.ping:"),
            committed("Renamed", &SHOWN.replace("owner: root", "owner: app"))
        ))
        .unwrap();
        let hit = match_committed_task(Some("Deploy config"), &body, &renamed, 0.3).unwrap();
        assert_eq!(hit.name.as_deref(), Some("Renamed"));

        let absent = parse_tasks(&committed("unrelated", "ansible.builtin.ping:")).unwrap();
        assert!(match_committed_task(Some("Deploy config"), &body, &absent, 0.3).is_none());
    }

    #[test]
    fn task_wrapped_in_block_is_found() {
        let doc = parse_tasks(
            "- name: wrapper\n  block:\n    - name: Deploy config\n      ansible.builtin.copy:\n        src: files/app.conf\n",
        )
        .unwrap();
        let body = vec!["ansible.builtin.copy:".to_owned(), "  src: files/app.conf".to_owned()];
        let hit = match_committed_task(Some("Deploy config"), &body, &doc, 0.3).unwrap();
        assert!(hit.in_block);
    }

    #[test]
    fn subcategories() {
        let sub = |a: &str, b: &str| minor_subcategory(&task(a), &task(b));
        assert_eq!(sub("debug: {msg: a}", "debug: {msg: b}"), MinorSubcategory::ValueOnly);
        assert_eq!(
            sub("copy: {src: x}", "copy: {src: x, mode: '0644'}"),
            MinorSubcategory::OptionAdded
        );
        assert_eq!(
            sub("copy: {src: x, mode: '0644'}", "copy: {src: x}"),
            MinorSubcategory::OptionRemoved
        );
        assert_eq!(sub("file: {path: x}", "file: {dest: x}"), MinorSubcategory::KeyOnly);
        assert_eq!(sub("file: {path: x}", "file: {dest: y}"), MinorSubcategory::KeyAndValue);
        assert_eq!(
            sub("file: {path: x, mode: a}", "file: {path: y, owner: z, group: g}"),
            MinorSubcategory::Mixed
        );
        assert_eq!(
            sub("copy: {src: x}", "copy: {src: y, mode: '0644'}"),
            MinorSubcategory::Mixed
        );
        assert_eq!(
            sub("debug: {msg: a}", "- debug: {msg: a}\n  register: r"),
            MinorSubcategory::OptionsUnchanged
        );
        assert_eq!(sub("debug: {msg: yes}", "debug: {msg: true}"), MinorSubcategory::OptionsUnchanged);
    }

    fn tags(a: &str, b: &str, cfg: &Config) -> Vec<ModuleEditTag> {
        module_edit_tags(&task(a), &task(b), cfg).into_iter().collect()
    }

    #[test]
    fn module_edit_tag_rules() {
        let cfg = Config::default();
        assert_eq!(
            tags("ansible.builtin.debug: {msg: hi}", "debug: {msg: hi}", &cfg),
            [ModuleEditTag::FqcnShortened]
        );
        assert_eq!(
            tags("ansible.builtin.command: ls", "ansible.builtin.shell: ls", &cfg),
            [ModuleEditTag::CommandShell]
        );
        let yum_class = Config::from_toml_str("similar_modules = [[\"yum\", \"dnf\", \"package\"]]").unwrap();
        assert_eq!(
            tags("ansible.builtin.yum: {name: x}", "ansible.builtin.dnf: {name: x}", &yum_class),
            [ModuleEditTag::SimilarModule]
        );
        assert_eq!(
            tags("ansible.builtin.copy: {}", "ansible.builtin.debug: {}", &cfg),
            [ModuleEditTag::Other]
        );
        assert_eq!(
            tags("ansible.builtin.debug: {msg: a}", "- debug: {msg: a}\n  register: r", &cfg),
            [ModuleEditTag::FqcnShortened, ModuleEditTag::Reorganization]
        );
        assert_eq!(
            tags("ansible.builtin.copy: {}", "- ansible.builtin.debug: {}\n  loop: [1]", &cfg),
            [ModuleEditTag::Reorganization]
        );
        // Neither renamed nor shortened: no tags even if restructured.
        assert!(tags("debug: {}", "- ansible.builtin.debug: {}\n  become: true", &cfg).is_empty());
        assert!(tags("ansible.builtin.debug: {}", "- ansible.builtin.debug: {}\n  tags: [x]", &cfg).is_empty());
    }

    #[test]
    fn fqcn_shortening_alone_is_a_minor_edit_without_module_change() {
        let mut log = Log::new();
        log.suggest("s1", "x", SHOWN);
        log.act("s1", Decision::Accepted);
        log.content(&committed("x", &SHOWN.replace("ansible.builtin.copy", "copy")));
        let (_, out) = log.outcomes();
        let o = &out[0];
        assert!(o.edit_fraction.unwrap() > 0.0);
        assert!(!o.module_changed);
        assert_eq!(o.category, Category::MinorEdit);
        assert!(o.is_module_edit());
        assert_eq!(o.minor_subcategory, Some(MinorSubcategory::OptionsUnchanged));
    }

    #[test]
    fn prompt_name_forms() {
        assert_eq!(prompt_name("- name: Install nginx").as_deref(), Some("Install nginx"));
        assert_eq!(prompt_name("  - name: \"quoted\"").as_deref(), Some("quoted"));
        assert_eq!(prompt_name("plain prompt").as_deref(), Some("plain prompt"));
        assert_eq!(prompt_name("- name:"), None);
    }
}
