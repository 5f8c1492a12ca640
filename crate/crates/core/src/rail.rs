//! Distributed sleep-transistor network: one footer per row, with the rows'
//! virtual-ground rails joined in a chain.
//!
//! Node `k` is row `k`'s tap. It connects to ground through its footer
//! conductance and to its neighbours through the rail resistance, and every
//! row injects its worst-case peak current. The nodal system is symmetric,
//! tridiagonal and strictly diagonally dominant.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gating::{Candidate, Cluster, ClusterKind, GatingPlan, SleepTransistor, Strategy};
use crate::netlist::{Circuit, RowAssignment};
use crate::tech::Technology;
use crate::timing::{self, TimingResult};

#[derive(Debug, Clone, PartialEq)]
pub struct RailNetwork {
    pub r_rail: f64,
    /// Footer conductance to ground per node (S).
    pub g_st: Vec<f64>,
    /// Injected current per node (A).
    pub i_inj: Vec<f64>,
}

impl RailNetwork {
    pub fn new(r_rail: f64, g_st: Vec<f64>, i_inj: Vec<f64>) -> Result<RailNetwork> {
        let net = RailNetwork { r_rail, g_st, i_inj };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: alloc::string::String| Error::InvalidParam {
            name: "rail network",
            reason,
        };
        if self.g_st.is_empty() {
            return Err(bad("needs at least one node".into()));
        }
        if self.g_st.len() != self.i_inj.len() {
            return Err(bad(format!("{} conductances but {} currents", self.g_st.len(), self.i_inj.len())));
        }
        if !(self.r_rail > 0.0) {
            return Err(bad(format!("rail resistance must be > 0, got {}", self.r_rail)));
        }
        if self.g_st.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(bad("footer conductances must be > 0".into()));
        }
        if self.i_inj.iter().any(|i| !(i.is_finite() && *i >= 0.0)) {
            return Err(bad("injected currents must be >= 0".into()));
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.g_st.len()
    }

    /// Tridiagonal conductance matrix as (sub, main, super) diagonals.
    pub fn conductance_bands(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.n_nodes();
        let g = 1.0 / self.r_rail;
        let main = (0..n)
            .map(|k| self.g_st[k] + if k > 0 { g } else { 0.0 } + if k + 1 < n { g } else { 0.0 })
            .collect();
        (vec![-g; n - 1], main, vec![-g; n - 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RailSolution {
    /// Tap voltage per node (V).
    pub v: Vec<f64>,
    pub max_v: f64,
    /// `||G v - i||_inf` of the returned solution.
    pub residual: f64,
}

/// Solves `G v = i` by tridiagonal elimination.
pub fn solve_rail_voltages(net: &RailNetwork) -> Result<RailSolution> {
    net.validate()?;
    let (sub, main, sup) = net.conductance_bands();
    let n = main.len();
    let mut diag = main.clone();
    let mut rhs = net.i_inj.clone();
    for k in 1..n {
        let m = sub[k - 1] / diag[k - 1];
        diag[k] -= m * sup[k - 1];
        rhs[k] -= m * rhs[k - 1];
    }
    let mut v = vec![0.0; n];
    // diagonal dominance keeps every pivot >= g_st[k] > 0
    debug_assert!(diag.iter().all(|d| *d > 0.0));
    v[n - 1] = rhs[n - 1] / diag[n - 1];
    for k in (0..n - 1).rev() {
        v[k] = (rhs[k] - sup[k] * v[k + 1]) / diag[k];
    }
    let residual = (0..n)
        .map(|k| {
            let mut r = main[k] * v[k] - net.i_inj[k];
            if k > 0 {
                r += sub[k - 1] * v[k - 1];
            }
            if k + 1 < n {
                r += sup[k] * v[k + 1];
            }
            r.abs()
        })
        .fold(0.0, f64::max);
    let max_v = v.iter().copied().fold(0.0, f64::max);
    Ok(RailSolution { v, max_v, residual })
}

/// Outcome of an IR-drop check.
#[derive(Debug, Clone, PartialEq)]
pub struct IrVerdict {
    pub pass: bool,
    /// Node indices above the limit.
    pub violators: Vec<usize>,
    pub limit: f64,
}

/// Passes when at most `allowed_violations` taps exceed `frac * vdd`.
pub fn check_ir_constraint(sol: &RailSolution, vdd: f64, frac: f64, allowed_violations: usize) -> IrVerdict {
    let limit = frac * vdd;
    let violators: Vec<usize> = (0..sol.v.len()).filter(|&k| sol.v[k] > limit).collect();
    IrVerdict {
        pass: violators.len() <= allowed_violations,
        violators,
        limit,
    }
}

/// Network with one footer of width `w_st` per row.
pub fn build_dstn(c: &Circuit, rows: &RowAssignment, w_st: f64, r_rail: f64, tech: &Technology) -> Result<RailNetwork> {
    if rows.n_rows == 0 {
        return Err(Error::InvalidParam {
            name: "rows",
            reason: "need at least one row".into(),
        });
    }
    let st = SleepTransistor::fixed(w_st, tech.st_length);
    let g = 1.0 / st.on_resistance(tech)?;
    let mut i_inj = vec![0.0; rows.n_rows];
    for g_idx in 0..c.len() {
        let id = &c.gates()[g_idx].id;
        let row = *rows.mapping.get(id).ok_or_else(|| Error::InvalidParam {
            name: "rows",
            reason: format!("gate `{id}` has no row"),
        })?;
        if row >= rows.n_rows {
            return Err(Error::InvalidParam {
                name: "rows",
                reason: format!("gate `{id}` is in row {row} of {}", rows.n_rows),
            });
        }
        i_inj[row] += tech.i_peak_scale * c.peak_current(g_idx);
    }
    RailNetwork::new(r_rail, vec![g; rows.n_rows], i_inj)
}

/// Evaluated distributed network at one width.
#[derive(Debug, Clone, PartialEq)]
pub struct DstnEval {
    pub width: f64,
    pub network: RailNetwork,
    pub solution: RailSolution,
    pub verdict: IrVerdict,
    /// Clusters are the non-empty rows, each at its tap voltage.
    pub plan: GatingPlan,
    /// `None` when a tap voltage starves its row.
    pub timing: Option<TimingResult>,
}

pub fn dstn_evaluate(
    c: &Circuit,
    rows: &RowAssignment,
    w_st: f64,
    tech: &Technology,
    frac: f64,
    allowed_violations: usize,
) -> Result<DstnEval> {
    let network = build_dstn(c, rows, w_st, tech.r_rail, tech)?;
    let solution = solve_rail_voltages(&network)?;
    let verdict = check_ir_constraint(&solution, tech.device.vdd, frac, allowed_violations);
    let mut clusters = Vec::new();
    let mut sts = BTreeMap::new();
    for row in 0..rows.n_rows {
        let members = rows.members(c, row);
        if members.is_empty() {
            continue;
        }
        clusters.push(Cluster::from_gates(c, row, ClusterKind::NonCritical, &members, tech.i_peak_scale)?);
        sts.insert(row, SleepTransistor::fixed(w_st, tech.st_length));
    }
    let mut plan = GatingPlan::new(c, Strategy::Dstn, clusters, sts)?;
    for cl in &plan.clusters {
        plan.vst_per_cluster.insert(cl.id, solution.v[cl.id]);
    }
    let timing = timing::gated_timing(c, &tech.device, tech.vth_logic, &plan.gate_drops(c)).ok();
    Ok(DstnEval {
        width: w_st,
        network,
        solution,
        verdict,
        plan,
        timing,
    })
}

/// Result of the distributed-network width search.
#[derive(Debug, Clone, PartialEq)]
pub struct DstnSized {
    pub chosen: DstnEval,
    pub candidates: Vec<Candidate>,
}

/// Smallest per-row width that passes the IR check (with the allowance)
/// and keeps the gated delay within `budget * d_bc`.
pub fn dstn_size(
    c: &Circuit,
    rows: &RowAssignment,
    candidates: &[f64],
    tech: &Technology,
    frac: f64,
    allowed_violations: usize,
    d_bc: f64,
) -> Result<DstnSized> {
    let mut widths = candidates.to_vec();
    widths.sort_by(f64::total_cmp);
    widths.dedup();
    if widths.is_empty() {
        return Err(Error::InvalidParam {
            name: "candidates",
            reason: "need at least one width".into(),
        });
    }
    let limit = tech.delay_budget * d_bc;
    let mut rows_out = Vec::new();
    let mut chosen = None;
    for w in widths {
        let eval = dstn_evaluate(c, rows, w, tech, frac, allowed_violations)?;
        let delay = eval.timing.as_ref().map(|t| t.d0);
        rows_out.push(Candidate {
            width: w,
            vst: eval.solution.max_v,
            delay,
        });
        if chosen.is_none() && eval.verdict.pass && delay.is_some_and(|d| d <= limit) {
            chosen = Some(eval);
        }
    }
    let chosen = chosen.ok_or_else(|| {
        Error::Infeasible(format!(
            "no row width passes the IR limit with {allowed_violations} allowed violations and delay <= {limit:e} s"
        ))
    })?;
    Ok(DstnSized {
        chosen,
        candidates: rows_out,
    })
}
