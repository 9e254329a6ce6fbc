//! Benchmark harness for the `wirecut` library: standard instances, result
//! tables and the logic behind each `wirecut` subcommand.

pub mod commands;
pub mod error;
pub mod instances;
pub mod table;

pub use error::{BenchError, Result};
pub use table::{Format, ResultRow, ResultTable};
