//! Criterion benchmarks for `privplan`; see `benches/planning.rs`.
//!
//! Run with `cargo bench -p privplan-bench`.
