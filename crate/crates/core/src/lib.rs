//! Analytical power-gating models for gate-level combinational circuits.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numerical and
//! structural algorithm: the sub-threshold leakage and alpha-power delay
//! models, sleep-transistor sizing, the gate-level circuit model and the 4x4
//! array multiplier generator, static timing analysis, the four gating
//! strategies (single sleep transistor, clustered, distributed network and
//! the tunable cell), the virtual-ground rail solver and power accounting.
//!
//! File formats, reports and the command-line front end live in the `pglab`
//! crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calibration;
pub mod device;
mod error;
pub mod flow;
pub mod gating;
pub mod library;
pub mod metrics;
pub mod netlist;
pub mod power;
pub mod rail;
pub mod tech;
pub mod timing;

pub use crate::device::{BiasPoint, DeviceParams, Geometry};
pub use crate::error::{Error, NetlistError, Result};
pub use crate::netlist::{CellDef, Circuit, GateInstance, LogicFn, RowAssignment};
pub use crate::tech::Technology;
