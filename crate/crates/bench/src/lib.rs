//! Benchmarks for the epsense kernels live in `benches/kernels.rs`.
