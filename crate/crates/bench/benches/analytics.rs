use std::hint::black_box;

use completion_analytics::event::Ingested;
use completion_analytics::pipeline::analyze;
use completion_analytics::synth;
use completion_analytics::{matching_blocks, parse_tasks, similarity_ratio, Config, Window};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn lines(n: usize, variant: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i % 7 == variant % 7 {
                format!("  changed_{i}: {variant}")
            } else {
                format!("  option_{}: value_{}", i % 11, i % 5)
            }
        })
        .collect()
}

fn gestalt(c: &mut Criterion) {
    let mut group = c.benchmark_group("matching_blocks");
    for n in [8usize, 32, 128, 512] {
        let (a, b) = (lines(n, 1), lines(n, 3));
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| matching_blocks(black_box(&a), black_box(&b)))
        });
    }
    group.finish();
    let (a, b) = (lines(6, 1), lines(6, 2));
    c.bench_function("similarity_ratio/6_lines", |bench| {
        bench.iter(|| similarity_ratio(black_box(&a), black_box(&b)))
    });
}

fn tasks(c: &mut Criterion) {
    let doc: String = (0..50)
        .map(|i| {
            format!(
                "- name: Task {i}\n  ansible.builtin.copy:\n    src: files/{i}.conf\n    dest: /etc/app/{i}.conf\n    mode: '0644'\n  register: out_{i}\n  when: enabled\n"
            )
        })
        .collect();
    c.bench_function("parse_tasks/50_tasks", |bench| {
        bench.iter(|| parse_tasks(black_box(&doc)).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let text = synth::to_jsonl(&synth::scale_log(20_000));
    let config = Config::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.throughput(Throughput::Elements(text.lines().count() as u64));
    group.bench_function("scale_20k_events", |bench| {
        bench.iter(|| {
            let mut ingested = Ingested::default();
            ingested.read_from("bench", text.as_bytes()).unwrap();
            analyze(ingested, &config, Window::default()).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, gestalt, tasks, pipeline);
criterion_main!(benches);
