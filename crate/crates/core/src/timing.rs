//! Static timing analysis and delay-model calibration.
//!
//! Interconnect delay is zero; each gate contributes its alpha-power delay
//! once, whichever input or output the path uses.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::device::{self, DeviceParams};
use crate::error::{Error, Result};
use crate::netlist::Circuit;

/// Longest-path timing of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingResult {
    /// Delay of the critical path (s).
    pub d0: f64,
    /// Gate ids from the primary-input end to the primary-output end.
    pub critical_path: Vec<String>,
    /// Output arrival time of every gate (s).
    pub per_gate_arrival: BTreeMap<String, f64>,
}

/// Gate ids in topological order (logic level, then id).
pub fn topological_order(c: &Circuit) -> Vec<String> {
    c.topo_order().iter().map(|&g| c.gates()[g].id.clone()).collect()
}

/// Ungated delay of every gate, indexed like `c.gates()`. A width override
/// scales the drive factor; a length override does not change the delay.
pub fn gate_delays(c: &Circuit, p: &DeviceParams, vth: f64) -> Result<Vec<f64>> {
    (0..c.len())
        .map(|g| {
            let cell = c.cell_of(g);
            device::gate_delay(cell.cl, cell.k * c.drive_scale(g), p, vth)
        })
        .collect()
}

/// Ungated static timing.
pub fn critical_path(c: &Circuit, p: &DeviceParams, vth: f64) -> Result<TimingResult> {
    longest_path(c, &gate_delays(c, p, vth)?)
}

/// Longest primary-input to primary-output path for the given per-gate
/// delays. Among paths whose delays agree to 1e-12 relative, the
/// lexicographically smallest gate-id sequence wins.
pub fn longest_path(c: &Circuit, delays: &[f64]) -> Result<TimingResult> {
    if c.primary_outputs().is_empty() {
        return Err(Error::NoOutputs);
    }
    assert_eq!(delays.len(), c.len(), "one delay per gate");
    let order = c.topo_order();

    let mut arrival = vec![0.0f64; c.len()];
    for &g in order {
        let start = c.fanin(g).iter().map(|&d| arrival[d]).fold(0.0, f64::max);
        arrival[g] = start + delays[g];
    }

    // longest delay from a gate's input to any primary output, through it
    let mut tail = vec![f64::NEG_INFINITY; c.len()];
    for &g in order.iter().rev() {
        let mut rest = if c.drives_output(g) { 0.0 } else { f64::NEG_INFINITY };
        for &h in c.fanout(g) {
            rest = rest.max(tail[h]);
        }
        tail[g] = rest + delays[g];
    }

    let total = (0..c.len())
        .filter(|&g| c.has_primary_input(g))
        .map(|g| tail[g])
        .fold(f64::NEG_INFINITY, f64::max);

    let mut path = Vec::new();
    if total.is_finite() {
        let tol = 1e-12 * total.abs();
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        // gates are stored in id order, so the first match is the smallest id
        let mut cur = (0..c.len())
            .find(|&g| c.has_primary_input(g) && close(tail[g], total))
            .expect("maximum is attained");
        let mut remaining = total;
        loop {
            path.push(cur);
            remaining -= delays[cur];
            if c.drives_output(cur) && close(remaining, 0.0) {
                break;
            }
            let mut next: Vec<usize> = c
                .fanout(cur)
                .iter()
                .copied()
                .filter(|&h| close(tail[h], remaining))
                .collect();
            next.sort_unstable();
            match next.first() {
                Some(&h) => cur = h,
                None => break,
            }
        }
    }

    Ok(TimingResult {
        d0: path.last().map_or(0.0, |&g| arrival[g]),
        critical_path: path.iter().map(|&g| c.gates()[g].id.clone()).collect(),
        per_gate_arrival: c
            .gates()
            .iter()
            .zip(&arrival)
            .map(|(g, &a)| (g.id.clone(), a))
            .collect(),
    })
}

/// Timing with every gate slowed by its virtual-ground drop.
///
/// `vst` is indexed like `c.gates()`; ungated gates carry 0.
pub fn gated_timing(c: &Circuit, p: &DeviceParams, vth: f64, vst: &[f64]) -> Result<TimingResult> {
    if vst.len() != c.len() {
        return Err(Error::InvalidParam {
            name: "vst",
            reason: alloc::format!("expected {} per-gate drops, got {}", c.len(), vst.len()),
        });
    }
    let base = gate_delays(c, p, vth)?;
    let inflated = base
        .iter()
        .zip(vst)
        .map(|(&d, &v)| device::gated_delay(d, v, p, vth))
        .collect::<Result<Vec<_>>>()?;
    longest_path(c, &inflated)
}

/// Critical delay of the gated circuit; the critical path may move.
pub fn circuit_delay_gated(c: &Circuit, p: &DeviceParams, vth: f64, vst: &[f64]) -> Result<f64> {
    Ok(gated_timing(c, p, vth, vst)?.d0)
}

/// Threshold and velocity-saturation index that best explain measured
/// gated delays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayFit {
    pub vth_fit: f64,
    pub alpha_fit: f64,
    pub d0_ref: f64,
    /// Maximum relative error of the fitted prediction over all rows.
    pub residual: f64,
}

const FIT_VTH_STEPS: usize = 400;
const FIT_ALPHA_STEPS: usize = 40;
const FIT_REFINE_ROUNDS: usize = 40;
const FIT_REFINE_POINTS: usize = 10;

fn fit_residual(rows: &[(f64, f64)], d0: f64, vdd: f64, vth: f64, alpha: f64) -> f64 {
    rows.iter()
        .map(|&(vst, measured)| {
            let predicted = d0 * libm::pow((vdd - vth) / (vdd - vst - vth), alpha);
            ((predicted - measured) / measured).abs()
        })
        .fold(0.0, f64::max)
}

/// Minimax fit of `d0_ref * ((Vdd - vth) / (Vdd - v_ST - vth))^alpha` to
/// `(v_ST, delay)` rows over `0 < vth < Vdd - max(v_ST)` and `1 <= alpha <= 2`.
///
/// A fixed grid is followed by a fixed number of shrinking local grids, so
/// the result is a deterministic function of the row set.
pub fn fit_delay_model(rows: &[(f64, f64)], d0_ref: f64, vdd: f64) -> Result<DelayFit> {
    if rows.is_empty() {
        return Err(Error::InvalidParam {
            name: "rows",
            reason: "need at least one (v_ST, delay) row".into(),
        });
    }
    if !(d0_ref > 0.0) || !(vdd > 0.0) {
        return Err(Error::InvalidParam {
            name: "d0_ref",
            reason: "reference delay and supply must be positive".into(),
        });
    }
    if rows.iter().any(|&(v, d)| !(v >= 0.0) || !(d > 0.0)) {
        return Err(Error::InvalidParam {
            name: "rows",
            reason: "drops must be >= 0 and delays > 0".into(),
        });
    }
    let vmax = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let vth_hi = vdd - vmax;
    if !(vth_hi > 0.0) {
        return Err(Error::Infeasible(
            "no threshold keeps v_ST + v_th below V_dd for every row".into(),
        ));
    }

    let eval = |vth: f64, alpha: f64| fit_residual(rows, d0_ref, vdd, vth, alpha);
    let mut best = (f64::INFINITY, 0.0, 1.0);
    for i in 1..FIT_VTH_STEPS {
        let vth = vth_hi * i as f64 / FIT_VTH_STEPS as f64;
        for j in 0..=FIT_ALPHA_STEPS {
            let alpha = 1.0 + j as f64 / FIT_ALPHA_STEPS as f64;
            let r = eval(vth, alpha);
            if r < best.0 {
                best = (r, vth, alpha);
            }
        }
    }

    let mut half_v = 2.0 * vth_hi / FIT_VTH_STEPS as f64;
    let mut half_a = 2.0 / FIT_ALPHA_STEPS as f64;
    for _ in 0..FIT_REFINE_ROUNDS {
        let (_, cv, ca) = best;
        for i in 0..=FIT_REFINE_POINTS {
            let vth = cv - half_v + 2.0 * half_v * i as f64 / FIT_REFINE_POINTS as f64;
            if !(vth > 0.0 && vth < vth_hi) {
                continue;
            }
            for j in 0..=FIT_REFINE_POINTS {
                let alpha = ca - half_a + 2.0 * half_a * j as f64 / FIT_REFINE_POINTS as f64;
                if !(1.0..=2.0).contains(&alpha) {
                    continue;
                }
                let r = eval(vth, alpha);
                if r < best.0 {
                    best = (r, vth, alpha);
                }
            }
        }
        half_v *= 0.5;
        half_a *= 0.5;
    }

    Ok(DelayFit {
        vth_fit: best.1,
        alpha_fit: best.2,
        d0_ref,
        residual: best.0,
    })
}
