//! Criterion benchmarks for the analytics crate live in `benches/`.
