//! Harness around the protocol library: scenario simulation, benchmarks,
//! and size accounting, shared between the `ringveil` binary and the test
//! suites.

pub mod bench;
pub mod config;
pub mod keyupdate;
pub mod scenario;
pub mod stats;
