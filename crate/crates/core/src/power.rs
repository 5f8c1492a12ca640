//! Standby leakage, dynamic power and duty-cycled average power.
//!
//! In active mode every cell leaks through its own devices and the gated
//! logic switches `activity * C_total` per cycle. In standby the footers are
//! off and a gated cluster leaks only through its sleep transistor, biased
//! at `VGS = 0`, `VDS = Vdd`. Control logic is never gated.

use crate::device::{self, BiasPoint, Geometry};
use crate::error::{Error, Result};
use crate::gating::{GatingPlan, SleepTransistor};
use crate::netlist::Circuit;
use crate::tech::{Technology, DEFAULT_ST_CAP_PER_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    /// Clock frequency (Hz).
    pub freq: f64,
    /// Switching activity per gate per cycle.
    pub activity: f64,
    /// Fraction of time spent in active mode.
    pub duty_active: f64,
    pub vdd: f64,
    /// Sleep-transistor gate capacitance per metre of conducting width.
    pub st_cap_per_width: f64,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams {
            freq: 2e8,
            activity: 0.15,
            duty_active: 0.5,
            vdd: 1.0,
            st_cap_per_width: DEFAULT_ST_CAP_PER_WIDTH,
        }
    }
}

impl PowerParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| Error::InvalidParam {
            name,
            reason: reason.into(),
        };
        if !(self.freq > 0.0 && self.freq.is_finite()) {
            return Err(bad("freq", "must be > 0"));
        }
        if !(self.activity >= 0.0 && self.activity <= 1.0) {
            return Err(bad("activity", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.duty_active) {
            return Err(bad("duty_active", "must lie in [0, 1]"));
        }
        if !(self.vdd > 0.0) {
            return Err(bad("vdd", "must be > 0"));
        }
        if !(self.st_cap_per_width >= 0.0) {
            return Err(bad("st_cap_per_width", "must be >= 0"));
        }
        Ok(())
    }
}

/// Power breakdown; `p_avg = duty*(p_dyn + p_leak_active) + (1-duty)*p_leak_standby`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub p_dyn: f64,
    pub p_leak_active: f64,
    pub p_leak_standby: f64,
    pub p_avg: f64,
}

/// Summed cell leakage current of the circuit (A).
pub fn cell_leakage(c: &Circuit) -> f64 {
    (0..c.len()).map(|g| c.leakage_current(g)).sum()
}

/// Off-state sub-threshold current through every device of a switch (A).
pub fn st_standby_current(st: &SleepTransistor, tech: &Technology) -> Result<f64> {
    let geom = Geometry::new(st.physical_width(), st.geom.l);
    device::subthreshold_current(&tech.device, &geom, &BiasPoint::new(0.0, 0.0, tech.device.vdd))
}

fn control_leakage(plan: Option<&GatingPlan>) -> f64 {
    plan.map_or(0.0, |p| p.control_cells.iter().map(|cell| cell.i_leak_ref).sum())
}

/// Standby leakage power (W). Gates outside every cluster leak through
/// their own devices.
pub fn standby_leakage(c: &Circuit, plan: Option<&GatingPlan>, tech: &Technology) -> Result<f64> {
    let vdd = tech.device.vdd;
    let Some(plan) = plan else {
        return Ok(vdd * cell_leakage(c));
    };
    let mut gated = alloc::vec![false; c.len()];
    for cl in &plan.clusters {
        for id in &cl.gate_ids {
            gated[c.gate_index_or_err(id)?] = true;
        }
    }
    let ungated: f64 = (0..c.len()).filter(|&g| !gated[g]).map(|g| c.leakage_current(g)).sum();
    let mut st = 0.0;
    for s in plan.st_per_cluster.values() {
        st += st_standby_current(s, tech)?;
    }
    Ok(vdd * (ungated + st + control_leakage(Some(plan))))
}

/// Switched capacitance: cell loads, conducting switch gates and control
/// logic loads (F).
pub fn switched_capacitance(c: &Circuit, plan: Option<&GatingPlan>, pp: &PowerParams) -> f64 {
    let cells: f64 = (0..c.len()).map(|g| c.cell_of(g).cl).sum();
    let Some(plan) = plan else {
        return cells;
    };
    let control: f64 = plan.control_cells.iter().map(|cell| cell.cl).sum();
    cells + pp.st_cap_per_width * plan.total_active_width() + control
}

/// `activity * f * Vdd^2 * C_total` (W).
pub fn dynamic_power(c: &Circuit, plan: Option<&GatingPlan>, pp: &PowerParams) -> Result<f64> {
    pp.validate()?;
    Ok(pp.activity * pp.freq * pp.vdd * pp.vdd * switched_capacitance(c, plan, pp))
}

pub fn average_power(c: &Circuit, plan: Option<&GatingPlan>, tech: &Technology) -> Result<PowerReport> {
    let pp = &tech.power;
    let p_dyn = dynamic_power(c, plan, pp)?;
    let p_leak_active = tech.device.vdd * (cell_leakage(c) + control_leakage(plan));
    let p_leak_standby = standby_leakage(c, plan, tech)?;
    let d = pp.duty_active;
    Ok(PowerReport {
        p_dyn,
        p_leak_active,
        p_leak_standby,
        p_avg: d * (p_dyn + p_leak_active) + (1.0 - d) * p_leak_standby,
    })
}

/// Percentage saved relative to the ungated power.
pub fn power_reduction(p_gated: f64, p_ungated: f64) -> f64 {
    100.0 * (p_ungated - p_gated) / p_ungated
}
