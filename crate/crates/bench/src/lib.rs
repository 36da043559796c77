//! Criterion benchmarks live in `benches/kernels.rs`; run them with `cargo bench -p legendre-bench`.
