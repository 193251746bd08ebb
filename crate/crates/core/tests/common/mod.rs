//! Shared helpers for the integration tests: a brute-force gestalt oracle and
//! a temp-file pipeline runner.
#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;

use completion_analytics::config::Config;
use completion_analytics::event::RawEvent;
use completion_analytics::pipeline::{run_pipeline, PipelineError, Window};
use completion_analytics::report::AnalysisReport;
use completion_analytics::synth::write_jsonl;

/// (a_start, b_start, length)
pub type Block = (usize, usize, usize);

/// Tries every start pair and keeps the longest run; among equal lengths the
/// lowest `a` start, then the lowest `b` start wins.
pub fn oracle_longest<T: PartialEq>(a: &[T], b: &[T], alo: usize, ahi: usize, blo: usize, bhi: usize) -> Block {
    let mut best = (alo, blo, 0);
    for i in alo..ahi {
        for j in blo..bhi {
            let mut k = 0;
            while i + k < ahi && j + k < bhi && a[i + k] == b[j + k] {
                k += 1;
            }
            if k > best.2 {
                best = (i, j, k);
            }
        }
    }
    best
}

fn oracle_recurse<T: PartialEq>(a: &[T], b: &[T], alo: usize, ahi: usize, blo: usize, bhi: usize, out: &mut Vec<Block>) {
    if alo >= ahi || blo >= bhi {
        return;
    }
    let (i, j, k) = oracle_longest(a, b, alo, ahi, blo, bhi);
    if k == 0 {
        return;
    }
    oracle_recurse(a, b, alo, i, blo, j, out);
    out.push((i, j, k));
    oracle_recurse(a, b, i + k, ahi, j + k, bhi, out);
}

/// Matching blocks in left-to-right order.
pub fn oracle_blocks<T: PartialEq>(a: &[T], b: &[T]) -> Vec<Block> {
    let mut out = Vec::new();
    oracle_recurse(a, b, 0, a.len(), 0, b.len(), &mut out);
    out
}

/// `(2M, T)`; the ratio is 1 for two empty sequences.
pub fn oracle_ratio<T: PartialEq>(a: &[T], b: &[T]) -> (usize, usize) {
    let m: usize = oracle_blocks(a, b).iter().map(|b| b.2).sum();
    (2 * m, a.len() + b.len())
}

pub fn oracle_ratio_value<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    match oracle_ratio(a, b) {
        (_, 0) => 1.0,
        (m2, t) => m2 as f64 / t as f64,
    }
}

/// Writes `events` (plus a broken line every `malformed_every` lines when
/// non-zero) to a JSONL file in `dir`.
pub fn write_log(dir: &tempfile::TempDir, name: &str, events: &[RawEvent], malformed_every: usize) -> PathBuf {
    let path = dir.path().join(name);
    let mut file = std::io::BufWriter::new(std::fs::File::create(&path).unwrap());
    write_jsonl(events, malformed_every, &mut file).unwrap();
    file.flush().unwrap();
    path
}

pub fn analyse(events: &[RawEvent], config: &Config) -> Result<AnalysisReport, PipelineError> {
    let dir = tempfile::tempdir().unwrap();
    let path = write_log(&dir, "events.jsonl", events, 0);
    run_pipeline(&[path], config, Window::default())
}
