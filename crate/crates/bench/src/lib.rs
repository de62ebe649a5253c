//! Benchmark-only crate; see `benches/suite.rs`.
//!
//! Run with `cargo bench -p mswap-bench`. The package intentionally has
//! no library API of its own.
