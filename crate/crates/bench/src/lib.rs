//! Criterion benchmarks for the medvec kernels live in `benches/`.
