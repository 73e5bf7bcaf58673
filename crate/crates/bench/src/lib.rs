//! Criterion benchmarks for the numerical kernels and fitters; see `benches/`.
