//! File formats, reports, the reference-table verifier and the `pglab`
//! command line on top of [`pglab_core`].

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod netlist_text;
pub mod params;
pub mod report;
pub mod verify;

pub use crate::cli::run;
pub use crate::error::CliError;
pub use crate::netlist_text::{parse_netlist, write_netlist, ParseError};
pub use crate::params::{parse_params, write_params};
pub use crate::report::{emit_report, AnalysisReport, Format};
pub use crate::verify::{verify_paper_tables, PaperDataset};
