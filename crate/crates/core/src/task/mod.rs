//! Ansible task model: module name, module options, task-level directives and
//! the source lines each task came from.

mod yaml;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde_json::Value;
use thiserror::Error;

use yaml::{Node, NodeKind};

/// Task keywords recognised as directives out of the box.
pub const DEFAULT_DIRECTIVES: &[&str] = &[
    "action",
    "always",
    "any_errors_fatal",
    "args",
    "async",
    "become",
    "become_exe",
    "become_flags",
    "become_method",
    "become_user",
    "block",
    "changed_when",
    "check_mode",
    "collections",
    "connection",
    "debugger",
    "delay",
    "delegate_facts",
    "delegate_to",
    "diff",
    "environment",
    "failed_when",
    "ignore_errors",
    "ignore_unreachable",
    "local_action",
    "loop",
    "loop_control",
    "module_defaults",
    "name",
    "no_log",
    "notify",
    "poll",
    "register",
    "rescue",
    "retries",
    "run_once",
    "tag",
    "tags",
    "throttle",
    "timeout",
    "until",
    "vars",
    "when",
];

const PLAY_KEYS: &[&str] = &[
    "hosts",
    "tasks",
    "pre_tasks",
    "post_tasks",
    "handlers",
    "roles",
    "import_playbook",
];

const TASK_SECTIONS: &[&str] = &["pre_tasks", "tasks", "post_tasks", "handlers"];

const BLOCK_SECTIONS: &[&str] = &["block", "rescue", "always"];

/// Option key holding a free-form module argument such as `shell: ls -l`.
pub const RAW_PARAMS: &str = "_raw_params";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("YAML syntax error at line {line}: {message}")]
    YamlSyntax { line: usize, message: String },
    #[error("valid YAML but not a task list: {0}")]
    NotATaskShape(String),
    #[error("`{0}` is neither a short module name nor a fully qualified one")]
    BadModuleKey(String),
}

/// A module reference: one segment (`debug`) or three
/// (`ansible.builtin.debug`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleName {
    segments: Vec<String>,
}

impl ModuleName {
    pub fn parse(key: &str) -> Result<Self, TaskError> {
        let segments: Vec<String> = key.split('.').map(str::to_owned).collect();
        if !matches!(segments.len(), 1 | 3) || segments.iter().any(|s| s.trim().is_empty()) {
            return Err(TaskError::BadModuleKey(key.to_owned()));
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn is_fqcn(&self) -> bool {
        self.segments.len() == 3
    }

    pub fn short_name(&self) -> &str {
        self.segments.last().expect("at least one segment")
    }
}

impl fmt::Display for ModuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

pub fn parse_module_name(key: &str) -> Result<ModuleName, TaskError> {
    ModuleName::parse(key)
}

pub fn short_name(module: &ModuleName) -> &str {
    module.short_name()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsibleTask {
    pub name: Option<String>,
    pub module: Option<ModuleName>,
    /// Body of the module key, in source order. Free-form arguments are
    /// stored under [`RAW_PARAMS`].
    pub options: IndexMap<String, Value>,
    /// Sibling keys of the module key other than `name`.
    pub directives: IndexMap<String, Value>,
    /// Source lines, dedented, trailing whitespace trimmed.
    pub raw_lines: Vec<String>,
    /// `raw_lines` minus the lines that belong to `name`.
    pub body_lines: Vec<String>,
    /// Tasks under `block`, `rescue` and `always`.
    pub children: Vec<AnsibleTask>,
    /// Set on tasks nested in a block.
    pub in_block: bool,
}

impl AnsibleTask {
    pub fn is_block(&self) -> bool {
        self.directives.contains_key("block")
    }

    /// Renders the structured model back to YAML. Values are written in flow
    /// style, so source formatting is not preserved.
    pub fn to_yaml(&self) -> String {
        let mut out = String::new();
        let mut first = true;
        let mut line = |out: &mut String, text: String| {
            out.push_str(if first { "- " } else { "  " });
            first = false;
            out.push_str(&text);
            out.push('\n');
        };
        if let Some(name) = &self.name {
            line(&mut out, format!("name: {}", Value::String(name.clone())));
        }
        if let Some(module) = &self.module {
            match self.options.get(RAW_PARAMS) {
                Some(raw) if self.options.len() == 1 => line(&mut out, format!("{module}: {raw}")),
                _ if self.options.is_empty() => line(&mut out, format!("{module}: {{}}")),
                _ => {
                    line(&mut out, format!("{module}:"));
                    for (k, v) in &self.options {
                        out.push_str(&format!("    {}: {v}\n", Value::String(k.clone())));
                    }
                }
            }
        }
        for (k, v) in &self.directives {
            line(&mut out, format!("{}: {v}", Value::String(k.clone())));
        }
        if first {
            out.push_str("- {}\n");
        }
        out
    }

    /// This task and every task nested under it, depth first.
    pub fn flatten(&self) -> Vec<&AnsibleTask> {
        let mut out = vec![self];
        for child in &self.children {
            out.extend(child.flatten());
        }
        out
    }
}

/// Flattened view of a task used by edit classification.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskParts<'a> {
    pub module: Option<&'a ModuleName>,
    pub option_keys: Vec<&'a str>,
    pub option_values: Vec<&'a Value>,
    pub directive_keys: Vec<&'a str>,
}

pub fn task_parts(task: &AnsibleTask) -> TaskParts<'_> {
    TaskParts {
        module: task.module.as_ref(),
        option_keys: task.options.keys().map(String::as_str).collect(),
        option_values: task.options.values().collect(),
        directive_keys: task.directives.keys().map(String::as_str).collect(),
    }
}

/// Every task in `tasks`, nested ones included, in document order.
pub fn flatten_tasks(tasks: &[AnsibleTask]) -> Vec<&AnsibleTask> {
    tasks.iter().flat_map(AnsibleTask::flatten).collect()
}

#[derive(Debug, Clone)]
pub struct TaskParser {
    directives: BTreeSet<String>,
}

impl Default for TaskParser {
    fn default() -> Self {
        Self::new(DEFAULT_DIRECTIVES.iter().copied())
    }
}

impl TaskParser {
    pub fn new<I, S>(directives: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut directives: BTreeSet<String> = directives.into_iter().map(Into::into).collect();
        directives.insert("name".into());
        for section in BLOCK_SECTIONS {
            directives.insert((*section).into());
        }
        Self { directives }
    }

    fn is_directive(&self, key: &str) -> bool {
        self.directives.contains(key) || key.starts_with("with_")
    }

    /// Tasks from a task list, the task sections of one or more plays, or a
    /// single bare task mapping.
    pub fn parse_tasks(&self, yaml_text: &str) -> Result<Vec<AnsibleTask>, TaskError> {
        let docs = yaml::load(yaml_text).map_err(|e| TaskError::YamlSyntax {
            line: e.marker().line(),
            message: e.to_string(),
        })?;
        let source = Source::new(yaml_text);
        let mut tasks = Vec::new();
        for doc in &docs {
            self.collect_document(doc, &source, &mut tasks)?;
        }
        Ok(tasks)
    }

    fn collect_document(
        &self,
        doc: &Node,
        src: &Source,
        out: &mut Vec<AnsibleTask>,
    ) -> Result<(), TaskError> {
        match &doc.kind {
            _ if doc.is_null() => Ok(()),
            NodeKind::Map(entries) if is_play(entries) => self.collect_play(entries, src, out),
            NodeKind::Map(_) => {
                out.extend(self.parse_task(doc, src, src.document_span(doc), false)?);
                Ok(())
            }
            NodeKind::Seq(items) => {
                let plays = items
                    .iter()
                    .filter(|i| i.as_map().is_some_and(is_play))
                    .count();
                if plays == 0 {
                    out.extend(self.parse_task_list(doc, src, false)?);
                    Ok(())
                } else if plays == items.len() {
                    for item in items {
                        self.collect_play(item.as_map().unwrap_or_default(), src, out)?;
                    }
                    Ok(())
                } else {
                    Err(TaskError::NotATaskShape(
                        "sequence mixes plays and tasks".into(),
                    ))
                }
            }
            NodeKind::Scalar { .. } => Err(TaskError::NotATaskShape(format!(
                "document at line {} is a scalar",
                doc.line
            ))),
        }
    }

    fn collect_play(
        &self,
        entries: &[(Node, Node)],
        src: &Source,
        out: &mut Vec<AnsibleTask>,
    ) -> Result<(), TaskError> {
        for (key, value) in entries {
            if TASK_SECTIONS.contains(&key.key_text().as_str()) && !value.is_null() {
                out.extend(self.parse_task_list(value, src, false)?);
            }
        }
        Ok(())
    }

    fn parse_task_list(
        &self,
        list: &Node,
        src: &Source,
        in_block: bool,
    ) -> Result<Vec<AnsibleTask>, TaskError> {
        let items = list.as_seq().ok_or_else(|| {
            TaskError::NotATaskShape(format!("expected a task list at line {}", list.line))
        })?;
        let mut tasks = Vec::new();
        for item in items {
            if item.as_map().is_none() {
                return Err(TaskError::NotATaskShape(format!(
                    "list item at line {} is not a mapping",
                    item.line
                )));
            }
            let span = src.item_span(item);
            tasks.extend(self.parse_task(item, src, span, in_block)?);
        }
        Ok(tasks)
    }

    /// `Ok(None)` for a mapping with neither a module nor a block (for
    /// example a `- name:` line still being typed).
    fn parse_task(
        &self,
        node: &Node,
        src: &Source,
        span: Span,
        in_block: bool,
    ) -> Result<Option<AnsibleTask>, TaskError> {
        let entries = node.as_map().unwrap_or_default();
        let mut name = None;
        let mut module = None;
        let mut options = IndexMap::new();
        let mut directives = IndexMap::new();
        let mut children = Vec::new();

        for (key_node, value) in entries {
            let key = key_node.key_text();
            if key == "name" {
                name = Some(match value.to_value() {
                    Value::String(s) => s,
                    Value::Null => String::new(),
                    other => other.to_string(),
                });
            } else if module.is_none() && !self.is_directive(&key) {
                module = Some(ModuleName::parse(&key)?);
                options = module_options(value);
            } else {
                if BLOCK_SECTIONS.contains(&key.as_str()) && !value.is_null() {
                    children.extend(self.parse_task_list(value, src, true)?);
                }
                directives.insert(key, value.to_value());
            }
        }
        if module.is_none() && !directives.contains_key("block") {
            return Ok(None);
        }

        let key_lines: Vec<(bool, usize)> = entries
            .iter()
            .map(|(k, _)| (k.key_text() == "name", k.line))
            .collect();
        let (raw_lines, body_lines) = src.task_lines(span, &key_lines);
        Ok(Some(AnsibleTask {
            name,
            module,
            options,
            directives,
            raw_lines,
            body_lines,
            children,
            in_block,
        }))
    }
}

fn is_play(entries: &[(Node, Node)]) -> bool {
    entries
        .iter()
        .any(|(k, _)| PLAY_KEYS.contains(&k.key_text().as_str()))
}

fn module_options(value: &Node) -> IndexMap<String, Value> {
    match &value.kind {
        NodeKind::Map(entries) => entries
            .iter()
            .map(|(k, v)| (k.key_text(), v.to_value()))
            .collect(),
        _ if value.is_null() => IndexMap::new(),
        _ => IndexMap::from([(RAW_PARAMS.to_owned(), value.to_value())]),
    }
}

/// Half-open range of 1-based source lines.
#[derive(Debug, Clone, Copy)]
struct Span {
    start: usize,
    end: usize,
}

struct Source<'a> {
    lines: Vec<&'a str>,
}

fn indent_of(line: &str) -> usize {
    line.len() - line.trim_start().len()
}

fn is_filler(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

impl<'a> Source<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().collect(),
        }
    }

    fn line(&self, n: usize) -> &'a str {
        self.lines.get(n - 1).copied().unwrap_or("")
    }

    /// A sequence item runs until the next content line indented no deeper
    /// than the item's own first line.
    fn item_span(&self, item: &Node) -> Span {
        let start = item.line;
        let indent = indent_of(self.line(start));
        let end = (start + 1..=self.lines.len())
            .find(|&n| {
                let l = self.line(n);
                !is_filler(l) && indent_of(l) <= indent
            })
            .unwrap_or(self.lines.len() + 1);
        Span { start, end }
    }

    /// A root mapping runs to the next document marker.
    fn document_span(&self, doc: &Node) -> Span {
        let start = doc.line;
        let end = (start + 1..=self.lines.len())
            .find(|&n| {
                let l = self.line(n);
                l.starts_with("---") || l.starts_with("...")
            })
            .unwrap_or(self.lines.len() + 1);
        Span { start, end }
    }

    fn trim_end(&self, mut span: Span) -> Span {
        while span.end > span.start + 1 && is_filler(self.line(span.end - 1)) {
            span.end -= 1;
        }
        span
    }

    /// Dedented task lines and the subset outside the `name` key.
    fn task_lines(&self, span: Span, keys: &[(bool, usize)]) -> (Vec<String>, Vec<String>) {
        let span = self.trim_end(span);
        let mut lines: Vec<String> = (span.start..span.end)
            .map(|n| self.line(n).trim_end().to_owned())
            .collect();
        if let Some(first) = lines.first_mut() {
            let indent = indent_of(first);
            if first[indent..].starts_with("- ") || &first[indent..] == "-" {
                first.replace_range(indent..indent + 1, " ");
            }
        }
        let common = lines
            .iter()
            .filter(|l| !l.trim().is_empty())
            .map(|l| indent_of(l))
            .min()
            .unwrap_or(0);
        let lines: Vec<String> = lines
            .into_iter()
            .map(|l| l.get(common..).unwrap_or("").to_owned())
            .collect();

        let mut in_body = vec![false; lines.len()];
        for (i, &(is_name, key_line)) in keys.iter().enumerate() {
            if is_name {
                continue;
            }
            let from = key_line.max(span.start);
            let to = keys
                .get(i + 1)
                .map_or(span.end, |&(_, next)| next.max(from + 1))
                .min(span.end);
            for n in from..to {
                in_body[n - span.start] = true;
            }
        }
        let body = lines
            .iter()
            .zip(&in_body)
            .filter(|(_, keep)| **keep)
            .map(|(l, _)| l.clone())
            .collect();
        (lines, body)
    }
}

/// Parses with the default directive list.
pub fn parse_tasks(yaml_text: &str) -> Result<Vec<AnsibleTask>, TaskError> {
    TaskParser::default().parse_tasks(yaml_text)
}
