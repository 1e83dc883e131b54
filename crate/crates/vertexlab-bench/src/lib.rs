//! Benchmark host crate. The measurements live in `benches/hot_paths.rs`;
//! this library target is intentionally empty.
