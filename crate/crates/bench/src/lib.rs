//! Benchmark crate; see benches/suite.rs.
