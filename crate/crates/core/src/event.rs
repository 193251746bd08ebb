//! Telemetry events: JSONL decoding, duplicate filtering and per-user timelines.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::io::BufRead;

use chrono::{DateTime, FixedOffset, NaiveDate, TimeDelta};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Completion,
    Suggestion,
    Action,
    Content,
    Feedback,
}

impl EventKind {
    pub const ALL: [EventKind; 5] = [
        EventKind::Completion,
        EventKind::Suggestion,
        EventKind::Action,
        EventKind::Content,
        EventKind::Feedback,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Completion => "completion",
            EventKind::Suggestion => "suggestion",
            EventKind::Action => "action",
            EventKind::Content => "content",
            EventKind::Feedback => "feedback",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accepted,
    Rejected,
    Ignored,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accepted => "accepted",
            Decision::Rejected => "rejected",
            Decision::Ignored => "ignored",
        }
    }
}

/// A completion request. `prompt` is the task name line the user typed and
/// `context` the file content up to the cursor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompletionPayload {
    pub suggestion_id: String,
    pub prompt: String,
    pub context: String,
}

/// The task body shown to the user.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuggestionPayload {
    pub suggestion_id: String,
    pub suggestion_text: String,
    pub line_count: u32,
    pub token_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionPayload {
    pub suggestion_id: String,
    pub action: Decision,
}

/// Full document snapshot once the editor settles. An empty document is a
/// valid snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContentPayload {
    pub suggestion_id: Option<String>,
    pub document_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeedbackPayload {
    pub stars: u8,
    pub comment: String,
    pub sentiment_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload {
    Completion(CompletionPayload),
    Suggestion(SuggestionPayload),
    Action(ActionPayload),
    Content(ContentPayload),
    Feedback(FeedbackPayload),
}

impl Payload {
    pub fn kind(&self) -> EventKind {
        match self {
            Payload::Completion(_) => EventKind::Completion,
            Payload::Suggestion(_) => EventKind::Suggestion,
            Payload::Action(_) => EventKind::Action,
            Payload::Content(_) => EventKind::Content,
            Payload::Feedback(_) => EventKind::Feedback,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEvent {
    pub event_id: String,
    pub user_id: String,
    /// Kept in the offset it was logged with; see [`local_date`].
    pub timestamp: DateTime<FixedOffset>,
    pub payload: Payload,
}

impl RawEvent {
    pub fn kind(&self) -> EventKind {
        self.payload.kind()
    }

    /// Serializes to one JSONL line in the ingest schema.
    pub fn to_json_line(&self) -> String {
        let mut obj = Map::new();
        obj.insert("event_id".into(), self.event_id.clone().into());
        obj.insert("user_id".into(), self.user_id.clone().into());
        obj.insert("ts".into(), self.timestamp.to_rfc3339().into());
        obj.insert("type".into(), self.kind().as_str().into());
        match &self.payload {
            Payload::Completion(p) => {
                obj.insert("suggestion_id".into(), p.suggestion_id.clone().into());
                obj.insert("prompt".into(), p.prompt.clone().into());
                obj.insert("context".into(), p.context.clone().into());
            }
            Payload::Suggestion(p) => {
                obj.insert("suggestion_id".into(), p.suggestion_id.clone().into());
                obj.insert("text".into(), p.suggestion_text.clone().into());
                obj.insert("lines".into(), p.line_count.into());
                obj.insert("tokens".into(), p.token_count.into());
            }
            Payload::Action(p) => {
                obj.insert("suggestion_id".into(), p.suggestion_id.clone().into());
                obj.insert("action".into(), p.action.as_str().into());
            }
            Payload::Content(p) => {
                if let Some(id) = &p.suggestion_id {
                    obj.insert("suggestion_id".into(), id.clone().into());
                }
                obj.insert("document".into(), p.document_text.clone().into());
            }
            Payload::Feedback(p) => {
                obj.insert("stars".into(), p.stars.into());
                obj.insert("comment".into(), p.comment.clone().into());
                if let Some(label) = &p.sentiment_label {
                    obj.insert("label".into(), label.clone().into());
                }
            }
        }
        Value::Object(obj).to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("invalid field `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("bad timestamp `{0}`")]
    BadTimestamp(String),
    #[error("unknown event type `{0}`")]
    UnknownKind(String),
}

impl EventError {
    /// Stable short name used when tallying rejected lines.
    pub fn reason(&self) -> &'static str {
        match self {
            EventError::MalformedJson(_) => "malformed_json",
            EventError::MissingField(_) => "missing_field",
            EventError::InvalidField { .. } => "invalid_field",
            EventError::BadTimestamp(_) => "bad_timestamp",
            EventError::UnknownKind(_) => "unknown_kind",
        }
    }
}

struct Fields<'a>(&'a Map<String, Value>);

impl<'a> Fields<'a> {
    fn opt_str(&self, name: &'static str) -> Result<Option<&'a str>, EventError> {
        match self.0.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(EventError::InvalidField {
                field: name,
                reason: "expected a string".into(),
            }),
        }
    }

    fn str(&self, name: &'static str) -> Result<&'a str, EventError> {
        self.opt_str(name)?.ok_or(EventError::MissingField(name))
    }

    fn id(&self, name: &'static str) -> Result<String, EventError> {
        let s = self.str(name)?;
        if s.is_empty() {
            return Err(EventError::InvalidField {
                field: name,
                reason: "must not be empty".into(),
            });
        }
        Ok(s.to_owned())
    }

    fn int(&self, name: &'static str, min: u64, max: u64) -> Result<u64, EventError> {
        let v = self.0.get(name).ok_or(EventError::MissingField(name))?;
        match v.as_u64() {
            Some(n) if (min..=max).contains(&n) => Ok(n),
            _ => Err(EventError::InvalidField {
                field: name,
                reason: format!("expected an integer in {min}..={max}, got {v}"),
            }),
        }
    }
}

/// Decodes and validates one JSONL line. Unknown fields are ignored.
pub fn parse_event_line(line: &str) -> Result<RawEvent, EventError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| EventError::MalformedJson(e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err(EventError::MalformedJson("expected a JSON object".into()));
    };
    let f = Fields(&obj);

    let event_id = f.id("event_id")?;
    let user_id = f.id("user_id")?;
    let ts = f.str("ts")?;
    let timestamp =
        DateTime::parse_from_rfc3339(ts).map_err(|_| EventError::BadTimestamp(ts.to_owned()))?;
    let kind_str = f.str("type")?;
    let kind = EventKind::parse(kind_str).ok_or_else(|| EventError::UnknownKind(kind_str.into()))?;

    let payload = match kind {
        EventKind::Completion => Payload::Completion(CompletionPayload {
            suggestion_id: f.id("suggestion_id")?,
            prompt: f.str("prompt")?.to_owned(),
            context: f.str("context")?.to_owned(),
        }),
        EventKind::Suggestion => {
            let text = f.str("text")?.to_owned();
            let line_count = f.int("lines", 1, u32::MAX as u64)? as u32;
            let actual = text.lines().count();
            if actual != line_count as usize {
                return Err(EventError::InvalidField {
                    field: "lines",
                    reason: format!("declared {line_count} but text has {actual}"),
                });
            }
            Payload::Suggestion(SuggestionPayload {
                suggestion_id: f.id("suggestion_id")?,
                suggestion_text: text,
                line_count,
                token_count: f.int("tokens", 1, u32::MAX as u64)? as u32,
            })
        }
        EventKind::Action => {
            let action = match f.str("action")? {
                "accepted" => Decision::Accepted,
                "rejected" => Decision::Rejected,
                "ignored" => Decision::Ignored,
                other => {
                    return Err(EventError::InvalidField {
                        field: "action",
                        reason: format!("unknown action `{other}`"),
                    })
                }
            };
            Payload::Action(ActionPayload {
                suggestion_id: f.id("suggestion_id")?,
                action,
            })
        }
        EventKind::Content => Payload::Content(ContentPayload {
            suggestion_id: f.opt_str("suggestion_id")?.map(str::to_owned),
            document_text: f.str("document")?.to_owned(),
        }),
        EventKind::Feedback => Payload::Feedback(FeedbackPayload {
            stars: f.int("stars", 1, 5)? as u8,
            comment: f.str("comment")?.to_owned(),
            sentiment_label: f.opt_str("label")?.map(str::to_owned),
        }),
    };

    Ok(RawEvent {
        event_id,
        user_id,
        timestamp,
        payload,
    })
}

/// A rejected input line, kept for the data-quality report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub source: String,
    pub line: usize,
    pub error: EventError,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source, self.line, self.error)
    }
}

/// Result of reading one or more logs: good events plus skipped lines.
#[derive(Debug, Default)]
pub struct Ingested {
    pub events: Vec<RawEvent>,
    pub rejected: Vec<LineError>,
    pub lines_read: usize,
}

impl Ingested {
    /// Reads a JSONL stream. Blank lines are ignored; bad lines are recorded
    /// and skipped.
    pub fn read_from<R: BufRead>(&mut self, source: &str, reader: R) -> std::io::Result<()> {
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            self.lines_read += 1;
            match parse_event_line(&line) {
                Ok(ev) => self.events.push(ev),
                Err(error) => self.rejected.push(LineError {
                    source: source.to_owned(),
                    line: idx + 1,
                    error,
                }),
            }
        }
        Ok(())
    }

    pub fn rejected_by_reason(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rejected {
            *out.entry(r.error.reason()).or_insert(0) += 1;
        }
        out
    }
}

/// Drops repeats of the same `(user, kind, payload)` logged within `window`
/// of the last retained copy. Output is sorted by `(user_id, timestamp,
/// event_id)`.
pub fn deduplicate(mut events: Vec<RawEvent>, window: TimeDelta) -> Vec<RawEvent> {
    events.sort_by(|x, y| {
        (&x.user_id, x.timestamp, &x.event_id).cmp(&(&y.user_id, y.timestamp, &y.event_id))
    });
    // Kept events of the current user that are still within `window`.
    let mut recent: VecDeque<usize> = VecDeque::new();
    let mut keep = Vec::with_capacity(events.len());
    for (i, ev) in events.iter().enumerate() {
        if recent.front().is_some_and(|&k| events[k].user_id != ev.user_id) {
            recent.clear();
        }
        while recent
            .front()
            .is_some_and(|&k| ev.timestamp - events[k].timestamp > window)
        {
            recent.pop_front();
        }
        let dup = recent.iter().any(|&k| events[k].payload == ev.payload);
        if !dup {
            recent.push_back(i);
        }
        keep.push(!dup);
    }
    let mut flags = keep.into_iter();
    events.retain(|_| flags.next().unwrap_or(false));
    events
}

/// Calendar date on the wall clock the event was stamped with.
pub fn local_date(ev: &RawEvent) -> NaiveDate {
    ev.timestamp.date_naive()
}

/// Deduplicated, time-ordered events of a single user. Never empty.
#[derive(Debug, Clone)]
pub struct UserTimeline {
    user_id: String,
    events: Vec<RawEvent>,
    active_days: BTreeSet<NaiveDate>,
}

impl UserTimeline {
    /// Returns `None` for an empty event list or mixed users.
    pub fn new(mut events: Vec<RawEvent>) -> Option<Self> {
        let user_id = events.first()?.user_id.clone();
        if events.iter().any(|e| e.user_id != user_id) {
            return None;
        }
        events.sort_by(|x, y| (x.timestamp, &x.event_id).cmp(&(y.timestamp, &y.event_id)));
        let active_days = events.iter().map(local_date).collect();
        Some(Self {
            user_id,
            events,
            active_days,
        })
    }

    pub fn user_id(&self) -> &str {
        &self.user_id
    }

    pub fn events(&self) -> &[RawEvent] {
        &self.events
    }

    pub fn active_days(&self) -> &BTreeSet<NaiveDate> {
        &self.active_days
    }

    pub fn first_day(&self) -> NaiveDate {
        *self
            .active_days
            .first()
            .expect("timeline holds at least one event")
    }
}

pub fn active_days(timeline: &UserTimeline) -> &BTreeSet<NaiveDate> {
    timeline.active_days()
}

/// Partitions events by user, ordered by user id.
pub fn build_timelines(events: Vec<RawEvent>) -> Vec<UserTimeline> {
    let mut by_user: BTreeMap<String, Vec<RawEvent>> = BTreeMap::new();
    for ev in events {
        by_user.entry(ev.user_id.clone()).or_default().push(ev);
    }
    by_user
        .into_values()
        .filter_map(UserTimeline::new)
        .collect()
}
