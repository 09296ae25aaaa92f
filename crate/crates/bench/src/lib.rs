//! Criterion benchmarks for `writhe-core`; see `benches/kernels.rs`.
