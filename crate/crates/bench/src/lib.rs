//! Criterion benchmarks for the heavy kernels; see `benches/`.
