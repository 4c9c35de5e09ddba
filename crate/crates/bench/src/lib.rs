//! Criterion benchmarks for the taulab kernels; see `benches/`.
