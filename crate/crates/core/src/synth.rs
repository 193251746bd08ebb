//! Deterministic synthetic telemetry with planted counts. No randomness: every
//! choice is a function of indices, so fixtures are identical across runs.

use std::io::{self, Write};

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveTime, TimeDelta, TimeZone};

use crate::event::{
    ActionPayload, CompletionPayload, ContentPayload, Decision, FeedbackPayload, Payload,
    RawEvent, SuggestionPayload,
};

const OFFSETS_SECS: [i32; 4] = [0, 2 * 3600, -5 * 3600, 5 * 3600 + 1800];

/// Base date of generated logs, a Monday.
pub fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2023, 6, 5).expect("valid date")
}

fn offset_for(user: usize) -> FixedOffset {
    FixedOffset::east_opt(OFFSETS_SECS[user % OFFSETS_SECS.len()]).expect("valid offset")
}

/// Local wall-clock instant `secs` seconds after 08:00 on `date`.
fn at(offset: FixedOffset, date: NaiveDate, secs: i64) -> DateTime<FixedOffset> {
    let local = date.and_time(NaiveTime::from_hms_opt(8, 0, 0).expect("valid time"))
        + TimeDelta::seconds(secs);
    offset
        .from_local_datetime(&local)
        .single()
        .expect("fixed offsets are unambiguous")
}

/// splitmix64 finaliser, used to spread indices without an RNG.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Appends events for one user, numbering ids sequentially.
struct UserLog<'a> {
    out: &'a mut Vec<RawEvent>,
    user: String,
    offset: FixedOffset,
    seq: usize,
}

impl<'a> UserLog<'a> {
    fn new(out: &'a mut Vec<RawEvent>, user: String, index: usize) -> Self {
        UserLog {
            out,
            user,
            offset: offset_for(index),
            seq: 0,
        }
    }

    fn push(&mut self, date: NaiveDate, secs: i64, payload: Payload) {
        self.seq += 1;
        self.out.push(RawEvent {
            event_id: format!("{}-{:05}", self.user, self.seq),
            user_id: self.user.clone(),
            timestamp: at(self.offset, date, secs),
            payload,
        });
    }

    fn completion(&mut self, date: NaiveDate, secs: i64, id: &str, name: &str) {
        self.push(
            date,
            secs,
            Payload::Completion(CompletionPayload {
                suggestion_id: id.to_owned(),
                prompt: format!("- name: {name}"),
                context: "---\n- hosts: all\n  tasks:\n".to_owned(),
            }),
        );
    }

    /// Completion, suggestion, optional action and optional content snapshot.
    #[allow(clippy::too_many_arguments)]
    fn lifecycle(
        &mut self,
        date: NaiveDate,
        secs: i64,
        id: &str,
        name: &str,
        shown: &[String],
        tokens: u32,
        action: Option<Decision>,
        committed: Option<String>,
        duplicate_completion: bool,
    ) {
        self.completion(date, secs, id, name);
        if duplicate_completion {
            self.completion(date, secs + 2, id, name);
        }
        self.push(
            date,
            secs + 1,
            Payload::Suggestion(SuggestionPayload {
                suggestion_id: id.to_owned(),
                suggestion_text: shown.join("\n"),
                line_count: shown.len() as u32,
                token_count: tokens,
            }),
        );
        if let Some(action) = action {
            self.push(
                date,
                secs + 5,
                Payload::Action(ActionPayload {
                    suggestion_id: id.to_owned(),
                    action,
                }),
            );
        }
        if let Some(document) = committed {
            self.push(
                date,
                secs + 20,
                Payload::Content(ContentPayload {
                    suggestion_id: Some(id.to_owned()),
                    document_text: document,
                }),
            );
        }
    }
}

/// Renders `- name:` plus an indented body as a one-task document.
pub fn committed_document(name: &str, body: &[String]) -> String {
    let mut doc = format!("---\n- name: {name}\n");
    for line in body {
        doc.push_str("  ");
        doc.push_str(line);
        doc.push('\n');
    }
    doc
}

const TEMPLATES: [(&str, [&str; 6]); 4] = [
    (
        "ansible.builtin.copy",
        ["src: files/{i}.conf", "dest: /etc/app/{i}.conf", "owner: root", "group: wheel", "mode: '0644'", "backup: true"],
    ),
    (
        "ansible.builtin.file",
        ["path: /srv/data/{i}", "state: directory", "owner: app", "group: app", "mode: '0755'", "recurse: false"],
    ),
    (
        "ansible.builtin.lineinfile",
        ["path: /etc/hosts.d/{i}", "line: 10.0.0.{i} node", "create: true", "owner: root", "mode: '0600'", "insertafter: EOF"],
    ),
    (
        "ansible.builtin.get_url",
        ["url: https://example.com/pkg-{i}.tgz", "dest: /tmp/pkg-{i}.tgz", "checksum: sha256:{i}", "timeout: 30", "mode: '0440'", "force: false"],
    ),
];

/// A module line followed by `options` two-space-indented option lines.
fn task_body(i: usize, options: usize) -> Vec<String> {
    let (module, opts) = &TEMPLATES[i % TEMPLATES.len()];
    let mut lines = vec![format!("{module}:")];
    lines.extend(opts[..options].iter().map(|o| format!("  {}", o.replace("{i}", &i.to_string()))));
    lines
}

/// Outcome planted for one suggestion of the usage log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Planted {
    FullyAccepted,
    MinorEdit,
    ModuleChangedMinor,
    MajorEdit,
    Deleted,
    Rejected,
    Ignored,
}

/// Committed body for a planted outcome, or `None` when nothing is committed.
fn committed_body(shown: &[String], planted: Planted, i: usize) -> Option<Vec<String>> {
    let mut body = shown.to_vec();
    match planted {
        Planted::FullyAccepted => {}
        Planted::MinorEdit => match i % 3 {
            // value edit
            0 => {
                let last = body.len() - 1;
                body[last] = body[last].replacen(": ", ": changed-", 1);
            }
            // renamed key, same value
            1 => body[3] = body[3].replacen(':', "_name:", 1),
            // option added
            _ => body.push("  validate: /usr/bin/check %s".to_owned()),
        },
        Planted::ModuleChangedMinor => {
            body[0] = "ansible.builtin.template:".to_owned();
        }
        Planted::MajorEdit => {
            for line in &mut body[1..5] {
                *line = format!("{}_{i}_rewritten", line.trim_end());
            }
        }
        Planted::Deleted | Planted::Rejected | Planted::Ignored => return None,
    }
    Some(body)
}

fn decision(planted: Planted) -> Option<Decision> {
    match planted {
        Planted::Rejected => Some(Decision::Rejected),
        Planted::Ignored => None,
        _ => Some(Decision::Accepted),
    }
}

/// Planted counts for [`usage_log`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsagePlan {
    pub returning_users: usize,
    pub single_day_users: usize,
    pub fully_accepted: usize,
    pub minor_edits: usize,
    pub module_changed_minor: usize,
    pub major_edits: usize,
    pub deleted: usize,
    pub rejected: usize,
    pub ignored: usize,
    /// Suggestions with a seven-line body; the rest have six.
    pub seven_line: usize,
    /// Suggestions costing 21 tokens; the rest cost 20.
    pub extra_token: usize,
    /// Every n-th suggestion logs its completion request twice.
    pub duplicate_every: usize,
    pub feedback_per_user: bool,
}

impl UsagePlan {
    /// The acceptance breakdown of the published deployment study.
    pub fn table_one() -> Self {
        UsagePlan {
            returning_users: 3_910,
            single_day_users: 6_786,
            fully_accepted: 24_811,
            minor_edits: 5_672,
            module_changed_minor: 306,
            major_edits: 2_713,
            deleted: 7_436,
            rejected: 15_000,
            ignored: 6_161,
            seven_line: 8_000,
            extra_token: 6_210,
            duplicate_every: 10,
            feedback_per_user: false,
        }
    }

    pub fn suggestions(&self) -> usize {
        self.accepted() + self.rejected + self.ignored
    }

    pub fn accepted(&self) -> usize {
        self.fully_accepted
            + self.minor_edits
            + self.module_changed_minor
            + self.major_edits
            + self.deleted
    }

    /// Roughly `events` events spread over a proportionate user base.
    pub fn scaled(events: usize) -> Self {
        // About 3.7 events per returning-user suggestion.
        let suggestions = (events * 10 / 37).max(20);
        let users = (suggestions / 12).max(2);
        let n = |share: usize| suggestions * share / 1000;
        let fully = n(400);
        let minor = n(90);
        let mcm = n(5);
        let major = n(44);
        let deleted = n(120);
        let rejected = n(241);
        UsagePlan {
            returning_users: users,
            single_day_users: users / 2,
            fully_accepted: fully,
            minor_edits: minor,
            module_changed_minor: mcm,
            major_edits: major,
            deleted,
            rejected,
            ignored: suggestions - fully - minor - mcm - major - deleted - rejected,
            seven_line: suggestions / 8,
            extra_token: suggestions / 10,
            duplicate_every: 10,
            feedback_per_user: true,
        }
    }

    /// Planted outcome of the `rank`-th slot before interleaving.
    fn slot(&self, rank: usize) -> Planted {
        let order = [
            (Planted::FullyAccepted, self.fully_accepted),
            (Planted::MinorEdit, self.minor_edits),
            (Planted::ModuleChangedMinor, self.module_changed_minor),
            (Planted::MajorEdit, self.major_edits),
            (Planted::Deleted, self.deleted),
            (Planted::Rejected, self.rejected),
            (Planted::Ignored, self.ignored),
        ];
        let mut r = rank;
        for (p, n) in order {
            if r < n {
                return p;
            }
            r -= n;
        }
        unreachable!("rank below total suggestions")
    }
}

fn coprime_stride(n: usize) -> usize {
    let mut stride = (n as f64 * 0.618_034) as usize | 1;
    while gcd(stride, n) != 1 {
        stride += 2;
    }
    stride
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Completion / suggestion / action / content log realising `plan` exactly
/// for the returning users. Single-day users each see one rejected
/// suggestion, so they only show up when the analysis includes every user.
pub fn usage_log(plan: &UsagePlan) -> Vec<RawEvent> {
    let total = plan.suggestions();
    let stride = coprime_stride(total.max(1));
    let users = plan.returning_users.max(1);
    let mut out = Vec::with_capacity(total * 4 + plan.single_day_users * 3);

    // Suggestion i belongs to user i % users and is its k-th, k = i / users.
    let mut per_user: Vec<Vec<usize>> = vec![Vec::new(); users];
    for i in 0..total {
        per_user[i % users].push(i);
    }
    for (u, indices) in per_user.iter().enumerate() {
        let mut log = UserLog::new(&mut out, format!("user{u:05}"), u);
        let first = epoch() + TimeDelta::days((u % 21) as i64);
        let second = first + TimeDelta::days(1 + (u % 6) as i64);
        for (k, &i) in indices.iter().enumerate() {
            let planted = plan.slot((i * stride) % total);
            let date = if k % 2 == 0 { first } else { second };
            let secs = (k as i64 / 2) * 120;
            let options = if i < plan.seven_line { 6 } else { 5 };
            let shown = task_body(i, options);
            let tokens = if (i * 7) % total < plan.extra_token { 21 } else { 20 };
            let name = format!("Configure item {i}");
            let committed = match planted {
                Planted::Deleted => Some(
                    "---\n- name: Report completion\n  ansible.builtin.debug:\n    msg: finished\n"
                        .to_owned(),
                ),
                _ => committed_body(&shown, planted, i).map(|b| committed_document(&name, &b)),
            };
            log.lifecycle(
                date,
                secs,
                &format!("s{i:07}"),
                &name,
                &shown,
                tokens,
                decision(planted),
                committed,
                plan.duplicate_every > 0 && i % plan.duplicate_every == 0,
            );
        }
        if plan.feedback_per_user {
            let stars = [5, 4, 5, 3, 1, 4, 2][u % 7];
            log.push(
                second,
                3_600,
                Payload::Feedback(FeedbackPayload {
                    stars,
                    comment: format!("comment from user {u}"),
                    sentiment_label: None,
                }),
            );
        }
    }
    for s in 0..plan.single_day_users {
        let u = users + s;
        let mut log = UserLog::new(&mut out, format!("user{u:05}"), u);
        let date = epoch() + TimeDelta::days((s % 28) as i64);
        let shown = task_body(s, 5);
        log.lifecycle(
            date,
            0,
            &format!("o{s:07}"),
            &format!("Try item {s}"),
            &shown,
            20,
            Some(Decision::Rejected),
            None,
            false,
        );
    }
    out
}

/// The planted mix behind [`module_edit_log`].
pub const MODULE_EDIT_PLAN: [(ModuleEdit, usize); 6] = [
    (ModuleEdit::FqcnOnly, 225),
    (ModuleEdit::FqcnAndRegister, 121),
    (ModuleEdit::RegisterAndUnarchive, 90),
    (ModuleEdit::CommandToShell, 352),
    (ModuleEdit::YumToDnf, 336),
    (ModuleEdit::CopyToUnarchive, 586),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleEdit {
    FqcnOnly,
    FqcnAndRegister,
    RegisterAndUnarchive,
    CommandToShell,
    YumToDnf,
    CopyToUnarchive,
    /// Kept as shown; not a module edit.
    Untouched,
}

fn module_edit_pair(edit: ModuleEdit, i: usize) -> (Vec<String>, Vec<String>) {
    let lines = |v: &[&str]| v.iter().map(|l| l.replace("{i}", &i.to_string())).collect::<Vec<_>>();
    let copy = lines(&[
        "ansible.builtin.copy:",
        "  src: files/bundle-{i}.tar.gz",
        "  dest: /opt/app-{i}",
        "  owner: app",
        "  group: app",
        "  mode: '0644'",
    ]);
    match edit {
        ModuleEdit::FqcnOnly => {
            let mut c = copy.clone();
            c[0] = "copy:".into();
            (copy, c)
        }
        ModuleEdit::FqcnAndRegister => {
            let mut c = copy.clone();
            c[0] = "copy:".into();
            c.push(format!("register: copied_{i}"));
            (copy, c)
        }
        ModuleEdit::RegisterAndUnarchive => {
            let mut c = copy.clone();
            c[0] = "ansible.builtin.unarchive:".into();
            c.push(format!("register: unpacked_{i}"));
            (copy, c)
        }
        ModuleEdit::CommandToShell => {
            let shown = lines(&[
                "ansible.builtin.command:",
                "  cmd: /usr/local/bin/rotate --keep {i}",
                "  chdir: /var/log/app",
                "  creates: /var/log/app/rotated-{i}",
                "  removes: /var/log/app/current",
                "  stdin_add_newline: true",
            ]);
            let mut c = shown.clone();
            c[0] = "ansible.builtin.shell:".into();
            (shown, c)
        }
        ModuleEdit::YumToDnf => {
            let shown = lines(&[
                "ansible.builtin.yum:",
                "  name: pkg-{i}",
                "  state: present",
                "  update_cache: true",
                "  disable_gpg_check: false",
                "  install_weak_deps: false",
            ]);
            let mut c = shown.clone();
            c[0] = "ansible.builtin.dnf:".into();
            (shown, c)
        }
        ModuleEdit::CopyToUnarchive => {
            let mut c = copy.clone();
            c[0] = "ansible.builtin.unarchive:".into();
            (copy, c)
        }
        ModuleEdit::Untouched => (copy.clone(), copy),
    }
}

/// Accepted suggestions whose committed form plants [`MODULE_EDIT_PLAN`],
/// plus `untouched` fully accepted ones, over users active on two days.
pub fn module_edit_log(untouched: usize) -> Vec<RawEvent> {
    let mut plan: Vec<ModuleEdit> = MODULE_EDIT_PLAN
        .iter()
        .flat_map(|&(e, n)| std::iter::repeat_n(e, n))
        .collect();
    plan.extend(std::iter::repeat_n(ModuleEdit::Untouched, untouched));
    let total = plan.len();
    let stride = coprime_stride(total);
    let users = 40;
    let mut out = Vec::new();
    let mut per_user: Vec<Vec<usize>> = vec![Vec::new(); users];
    for i in 0..total {
        per_user[i % users].push(i);
    }
    for (u, indices) in per_user.iter().enumerate() {
        let mut log = UserLog::new(&mut out, format!("editor{u:03}"), u);
        for (k, &i) in indices.iter().enumerate() {
            let edit = plan[(i * stride) % total];
            let (shown, committed) = module_edit_pair(edit, i);
            let name = format!("Deploy bundle {i}");
            let date = epoch() + TimeDelta::days((k % 2) as i64);
            log.lifecycle(
                date,
                (k as i64 / 2) * 120,
                &format!("m{i:06}"),
                &name,
                &shown,
                24,
                Some(Decision::Accepted),
                Some(committed_document(&name, &committed)),
                false,
            );
        }
    }
    out
}

pub const NEGATIVE_LABELS: [(&str, usize); 4] = [
    ("cannot_get_it_working", 127),
    ("poor_suggestions", 30),
    ("overall_experience", 11),
    ("not_informative", 23),
];

pub const POSITIVE_LABELS: [(&str, usize); 4] = [
    ("productivity", 76),
    ("accuracy", 60),
    ("ease_of_use", 35),
    ("general_experience", 7),
];

/// 1,000 feedback events: 570 at four or five stars, 158 at three and 272 at
/// one or two, with labeled comments planted per [`NEGATIVE_LABELS`] and
/// [`POSITIVE_LABELS`].
pub fn feedback_log() -> Vec<RawEvent> {
    let mut specs: Vec<(u8, Option<&str>, bool)> = Vec::new();
    let mut plant = |stars: &[u8], labels: &[(&'static str, usize)], total: usize| {
        let mut n = 0;
        for &(label, count) in labels {
            for _ in 0..count {
                specs.push((stars[n % stars.len()], Some(label), true));
                n += 1;
            }
        }
        while n < total {
            // Every third unlabeled rating comes without any comment.
            specs.push((stars[n % stars.len()], None, n % 3 != 0));
            n += 1;
        }
    };
    plant(&[5, 4], &POSITIVE_LABELS, 570);
    plant(&[3], &[("mixed", 20)], 158);
    plant(&[1, 2, 1], &NEGATIVE_LABELS, 272);

    let mut out = Vec::with_capacity(specs.len());
    for (n, (stars, label, has_comment)) in specs.into_iter().enumerate() {
        let mut log = UserLog::new(&mut out, format!("rater{n:04}"), n);
        log.push(
            epoch() + TimeDelta::days((n % 30) as i64),
            (n as i64 % 600) * 60,
            Payload::Feedback(FeedbackPayload {
                stars,
                comment: if has_comment {
                    format!("feedback text {n}")
                } else {
                    String::new()
                },
                sentiment_label: label.map(str::to_owned),
            }),
        );
    }
    out
}

/// `users` users with one completion on each of their active days. The
/// `day_one` users chosen by an index permutation also return the next day;
/// later days are sparse and index-derived.
pub fn retention_log(users: usize, day_one: usize, horizon: u32) -> Vec<RawEvent> {
    let stride = coprime_stride(users.max(1));
    let mut out = Vec::new();
    for u in 0..users {
        let mut log = UserLog::new(&mut out, format!("member{u:06}"), u);
        let first = epoch() + TimeDelta::days((u % 20) as i64);
        let mut day = |n: u32| {
            log.completion(
                first + TimeDelta::days(i64::from(n)),
                (u % 300) as i64 * 30,
                &format!("r{u}-{n}"),
                "Ping hosts",
            )
        };
        day(0);
        if (u * stride) % users < day_one {
            day(1);
        }
        for n in 2..=horizon {
            if mix((u as u64) << 8 | u64::from(n)).is_multiple_of(u64::from(3 * n)) {
                day(n);
            }
        }
    }
    out
}

/// `users` users of whom the first `returning` are active on two dates and
/// the rest only on one (some of them several times that day).
pub fn cohort_log(users: usize, returning: usize) -> Vec<RawEvent> {
    let mut out = Vec::new();
    for u in 0..users {
        let mut log = UserLog::new(&mut out, format!("person{u:06}"), u);
        let first = epoch() + TimeDelta::days((u % 14) as i64);
        log.completion(first, 0, &format!("c{u}-a"), "Gather facts");
        if u < returning {
            log.completion(first + TimeDelta::days(3), 0, &format!("c{u}-b"), "Gather facts");
        } else if u % 2 == 0 {
            log.completion(first, 9 * 3600, &format!("c{u}-b"), "Gather facts");
        }
    }
    out
}

/// Roughly `events` events of every kind, including duplicate completions.
pub fn scale_log(events: usize) -> Vec<RawEvent> {
    usage_log(&UsagePlan::scaled(events))
}

/// JSONL rendering; every `malformed_every`-th line (if non-zero) is followed
/// by a broken line.
pub fn write_jsonl<W: Write>(
    events: &[RawEvent],
    malformed_every: usize,
    mut w: W,
) -> io::Result<()> {
    for (n, ev) in events.iter().enumerate() {
        writeln!(w, "{}", ev.to_json_line())?;
        if malformed_every > 0 && n % malformed_every == malformed_every - 1 {
            match (n / malformed_every) % 3 {
                0 => writeln!(w, "{{\"event_id\": \"broken-{n}\"")?,
                1 => writeln!(w, "{{\"event_id\":\"x{n}\",\"user_id\":\"u\",\"ts\":\"yesterday\",\"type\":\"completion\",\"suggestion_id\":\"s\",\"prompt\":\"p\"}}")?,
                _ => writeln!(w, "{{\"event_id\":\"x{n}\",\"user_id\":\"u\",\"ts\":\"2023-06-05T10:00:00Z\",\"type\":\"telemetry\"}}")?,
            }
        }
    }
    Ok(())
}

pub fn to_jsonl(events: &[RawEvent]) -> String {
    let mut buf = Vec::new();
    write_jsonl(events, 0, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}
