use std::path::PathBuf;

use crate::netlist_text::ParseError;
use crate::report::InconsistentReport;

/// Everything a command can fail with.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {err}", path.display())]
    Parse { path: PathBuf, err: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] pglab_core::Error),
    #[error("internal: report field {} is {:e}, recomputed {:e}", .0.field, .0.got, .0.want)]
    Report(InconsistentReport),
}

impl CliError {
    /// 1 when the inputs are fine but no design satisfies them, 2 when the
    /// inputs themselves are wrong.
    pub fn exit_code(&self) -> i32 {
        use pglab_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Model(e) => match e {
                E::InvalidParam { .. } | E::NoOutputs | E::MissingCell(_) | E::UnknownGate(_) | E::Netlist(_) => 2,
                E::NonFinite { .. }
                | E::ThresholdAboveSupply { .. }
                | E::Starved { .. }
                | E::DegenerateSizing { .. }
                | E::Infeasible(_) => 1,
            },
            CliError::Report(_) => 1,
        }
    }
}
