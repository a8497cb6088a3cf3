//! File formats, command implementations and the benchmark harness behind
//! the `ppats` binary.

pub mod bench;
pub mod commands;
pub mod dlog_cache;
pub mod exec;
pub mod formats;
pub mod json;
pub mod params;
pub mod rng;

pub use commands::{run, Cli};
