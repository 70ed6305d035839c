//! Library side of the `chanwit` command-line tool: report envelopes,
//! observable-class detection, geometry export and the four commands.

pub mod commands;
pub mod detect;
pub mod error;
pub mod geometry;
pub mod report;

pub use commands::{analyze_state, classify_channel, geometry_report, witness_report, FlipFactors, Options};
pub use error::{CliError, CliResult};
pub use report::Report;
