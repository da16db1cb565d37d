//! Criterion benchmarks for the simulator and optimizers live in `benches/`.
