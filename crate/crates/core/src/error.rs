use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the analysis models.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("domain error: {term} is not finite")]
    NonFinite { term: &'static str },
    #[error("threshold {vth} V is not below the supply {vdd} V")]
    ThresholdAboveSupply { vth: f64, vdd: f64 },
    #[error("cluster starved: v_ST {vst} V + v_th {vth} V reaches V_dd {vdd} V")]
    Starved { vst: f64, vth: f64, vdd: f64 },
    #[error("degenerate sizing: overdrive V_dd - v_th - V_dd*alpha_drop = {overdrive} V")]
    DegenerateSizing { overdrive: f64 },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("circuit has no primary outputs")]
    NoOutputs,
    #[error("cell library lacks a {0} cell")]
    MissingCell(&'static str),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Structural violations of the circuit invariants.
///
/// A driver is either a gate id or `None` for a primary input.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetlistError {
    #[error("gate `{gate}` references unknown cell `{cell}`")]
    UnknownCell { gate: String, cell: String },
    #[error("gate `{gate}` has {got} {what}, cell expects {expected}")]
    Arity {
        gate: String,
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("net `{net}` has multiple drivers")]
    MultipleDrivers {
        net: String,
        first: Option<String>,
        second: Option<String>,
    },
    #[error("combinational cycle through gates {}", witness.join(" -> "))]
    Cycle { witness: Vec<String> },
    #[error("net `{net}` used by `{user}` has no driver")]
    Dangling { net: String, user: String },
    #[error("duplicate gate id `{0}`")]
    DuplicateGate(String),
    #[error("duplicate primary input `{0}`")]
    DuplicateInput(String),
    #[error("invalid cell `{cell}`: {reason}")]
    InvalidCell { cell: String, reason: String },
    #[error("gate `{gate}`: invalid geometry override")]
    InvalidGeometry { gate: String },
}
