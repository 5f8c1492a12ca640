//! Default standard-cell library for the array multiplier.
//!
//! Relative cell weights are fixed design choices. The absolute scales of
//! load capacitance, delay and peak current are calibrated (see
//! [`crate::calibration`]) so the ungated multiplier reproduces the
//! reference delay and average power and the single sleep transistor sizes
//! to the reference width.

use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::device::Geometry;
use crate::netlist::{CellDef, LogicFn};
use crate::tech::Technology;

/// Absolute scales applied to the relative cell weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LibraryScales {
    /// Load capacitance of a weight-1 cell (F).
    pub cl_unit: f64,
    /// Delay of a weight-1 cell at the default technology (s).
    pub delay_unit: f64,
    /// Peak current of a weight-1 cell (A).
    pub ipeak_unit: f64,
}

pub const DEFAULT_SCALES: LibraryScales = LibraryScales {
    cl_unit: 1.868_910_256_410_255_4e-14,
    delay_unit: 1.444_606_060_606_060_5e-11,
    ipeak_unit: 3.210_461_082_509_505e-6,
};

struct Weights {
    logic: LogicFn,
    cl: f64,
    delay: f64,
    ipeak: f64,
    ileak: f64,
    wn: f64,
}

const WEIGHTS: [Weights; 4] = [
    Weights { logic: LogicFn::And2, cl: 1.0, delay: 1.0, ipeak: 1.0, ileak: 50e-9, wn: 90e-9 },
    Weights { logic: LogicFn::Buf, cl: 0.8, delay: 0.8, ipeak: 0.8, ileak: 25e-9, wn: 90e-9 },
    Weights { logic: LogicFn::HalfAdder, cl: 1.6, delay: 1.5, ipeak: 2.0, ileak: 90e-9, wn: 135e-9 },
    Weights { logic: LogicFn::FullAdder, cl: 2.4, delay: 2.0, ipeak: 3.0, ileak: 130e-9, wn: 180e-9 },
];

const CELL_LENGTH: f64 = 45e-9;

/// Library built from the default weights at the given scales. Drive factors
/// are solved so each cell's delay under `tech` equals its delay weight
/// times `delay_unit`.
pub fn library_with(scales: &LibraryScales, tech: &Technology) -> BTreeMap<String, CellDef> {
    let p = tech.device;
    let overdrive = libm::pow(p.vdd - tech.vth_logic, p.alpha);
    let mut lib = BTreeMap::new();
    for w in &WEIGHTS {
        let cl = w.cl * scales.cl_unit;
        let delay = w.delay * scales.delay_unit;
        let cell = CellDef {
            name: w.logic.name().into(),
            n_inputs: w.logic.n_inputs(),
            logic: w.logic,
            cl,
            k: cl * p.vdd / (delay * overdrive),
            i_peak: w.ipeak * scales.ipeak_unit,
            i_leak_ref: w.ileak,
            geom_n: Geometry::new(w.wn, CELL_LENGTH),
        };
        lib.insert(cell.name.clone(), cell);
    }
    lib
}

pub fn default_library() -> BTreeMap<String, CellDef> {
    library_with(&DEFAULT_SCALES, &Technology::default())
}
