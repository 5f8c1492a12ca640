//! End-to-end strategy evaluation on one circuit.
//!
//! Every strategy is reported against two baselines: the ungated circuit
//! (delay `d0`, ungated power) and the best-case single sleep transistor
//! (delay `d_bc`), which is the smallest conventional width meeting the IR
//! limit among [`CONVENTIONAL_WIDTHS`].

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gating::{self, Candidate, GatingPlan, Sized, Strategy, TuningWord};
use crate::netlist::{assign_rows, Circuit, RowAssignment};
use crate::power::{self, PowerReport};
use crate::rail;
use crate::tech::Technology;
use crate::timing::{self, TimingResult};

pub const CONVENTIONAL_WIDTHS: [f64; 5] = [135e-9, 270e-9, 400e-9, 540e-9, 700e-9];
pub const CBSTD_WIDTHS: [f64; 4] = [100e-9, 135e-9, 270e-9, 400e-9];
pub const DSTN_WIDTHS: [f64; 4] = [135e-9, 270e-9, 405e-9, 540e-9];
pub const DSTN_ROWS: usize = 7;

/// Reference points shared by every strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub timing: TimingResult,
    pub ungated_power: PowerReport,
    pub conventional: Sized,
    pub d_bc: f64,
}

pub fn baseline(c: &Circuit, tech: &Technology) -> Result<Baseline> {
    let timing = timing::critical_path(c, &tech.device, tech.vth_logic)?;
    let ungated_power = power::average_power(c, None, tech)?;
    let conventional = gating::conventional_gating(c, &CONVENTIONAL_WIDTHS, tech, tech.ir_frac)?;
    let d_bc = conventional.timing.d0;
    Ok(Baseline {
        timing,
        ungated_power,
        conventional,
        d_bc,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    Conventional { candidates: Vec<f64> },
    Cbstd { candidates: Vec<f64>, n_nc: usize },
    Dstn { candidates: Vec<f64>, rows: usize, allowed_violations: usize },
    Tunable { word: TuningWord },
}

impl Request {
    /// Request with the default candidate widths for `strategy`.
    pub fn default_for(strategy: Strategy) -> Request {
        match strategy {
            Strategy::Conventional => Request::Conventional {
                candidates: CONVENTIONAL_WIDTHS.to_vec(),
            },
            Strategy::Cbstd => Request::Cbstd {
                candidates: CBSTD_WIDTHS.to_vec(),
                n_nc: 1,
            },
            Strategy::Dstn => Request::Dstn {
                candidates: DSTN_WIDTHS.to_vec(),
                rows: DSTN_ROWS,
                allowed_violations: 1,
            },
            Strategy::Tunable => Request::Tunable {
                word: TuningWord::NOMINAL,
            },
        }
    }

    pub fn strategy(&self) -> Strategy {
        match self {
            Request::Conventional { .. } => Strategy::Conventional,
            Request::Cbstd { .. } => Strategy::Cbstd,
            Request::Dstn { .. } => Strategy::Dstn,
            Request::Tunable { .. } => Strategy::Tunable,
        }
    }
}

/// A pass/fail check with the compared quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub strategy: Strategy,
    /// Chosen switch widths: the single switch, the critical-cluster
    /// switch, the per-row switch, or the tunable effective width, followed
    /// by the non-critical width where one exists.
    pub widths: Vec<f64>,
    pub word: Option<TuningWord>,
    pub d0: f64,
    pub gated_delay: f64,
    pub d_bc: f64,
    pub max_vst: f64,
    pub power: PowerReport,
    pub ungated_power: PowerReport,
    pub critical_path: Vec<String>,
    pub candidates: Vec<Candidate>,
    pub verdicts: Vec<Verdict>,
    pub plan: GatingPlan,
}

fn delay_verdict(d: f64, base: &Baseline, tech: &Technology) -> Verdict {
    let limit = tech.delay_budget * base.d_bc;
    Verdict {
        name: "delay_budget".into(),
        pass: d <= limit,
        value: d,
        limit,
    }
}

fn ir_verdict(max_v: f64, tech: &Technology) -> Verdict {
    let limit = tech.ir_frac * tech.device.vdd;
    Verdict {
        name: "ir_drop".into(),
        pass: max_v <= limit,
        value: max_v,
        limit,
    }
}

/// Evaluates one strategy request.
pub fn run(c: &Circuit, tech: &Technology, request: &Request) -> Result<Outcome> {
    let base = baseline(c, tech)?;
    run_with_baseline(c, tech, request, &base)
}

pub fn run_with_baseline(c: &Circuit, tech: &Technology, request: &Request, base: &Baseline) -> Result<Outcome> {
    let finish = |plan: GatingPlan,
                  timing: TimingResult,
                  widths: Vec<f64>,
                  word: Option<TuningWord>,
                  candidates: Vec<Candidate>,
                  mut verdicts: Vec<Verdict>|
     -> Result<Outcome> {
        let power = power::average_power(c, Some(&plan), tech)?;
        verdicts.push(delay_verdict(timing.d0, base, tech));
        Ok(Outcome {
            strategy: plan.strategy,
            widths,
            word,
            d0: base.timing.d0,
            gated_delay: timing.d0,
            d_bc: base.d_bc,
            max_vst: plan.max_drop(),
            power,
            ungated_power: base.ungated_power,
            critical_path: timing.critical_path.clone(),
            candidates,
            verdicts,
            plan,
        })
    };

    match request {
        Request::Conventional { candidates } => {
            let s = gating::conventional_gating(c, candidates, tech, tech.ir_frac)?;
            let ir = ir_verdict(s.plan.max_drop(), tech);
            finish(s.plan, s.timing, vec![s.width], None, s.candidates, vec![ir])
        }
        Request::Cbstd { candidates, n_nc } => {
            let clusters = gating::cbstd_partition(c, &base.timing, *n_nc, tech)?;
            let s = gating::cbstd_gating(c, &clusters, candidates, base.d_bc, tech)?;
            let ir = ir_verdict(s.plan.max_drop(), tech);
            finish(s.plan, s.timing, vec![s.width, tech.nc_width], None, s.candidates, vec![ir])
        }
        Request::Dstn {
            candidates,
            rows,
            allowed_violations,
        } => {
            let assignment = dstn_rows(c, *rows)?;
            let s = rail::dstn_size(c, &assignment, candidates, tech, tech.ir_frac, *allowed_violations, base.d_bc)?;
            let eval = s.chosen;
            let ir = Verdict {
                name: "ir_drop".into(),
                pass: eval.verdict.pass,
                value: eval.solution.max_v,
                limit: eval.verdict.limit,
            };
            let timing = eval.timing.expect("chosen width has a delay");
            finish(eval.plan, timing, vec![eval.width], None, s.candidates, vec![ir])
        }
        Request::Tunable { word } => {
            let eff = gating::tunable_effective_width(*word, tech.w_unit);
            if eff == 0.0 {
                return Err(Error::Infeasible(alloc::format!(
                    "word {word} turns every tunable device off"
                )));
            }
            let clusters = gating::cbstd_partition(c, &base.timing, 1, tech)?;
            let mut plan = gating::tunable_plan(c, &clusters, *word, tech)?;
            gating::solve_plan_drops(&mut plan, tech)?;
            let timing = gating::plan_timing(c, &plan, tech)?;
            let ir = ir_verdict(plan.max_drop(), tech);
            finish(plan, timing, vec![eff, tech.nc_width], Some(*word), Vec::new(), vec![ir])
        }
    }
}

/// Row tags from the circuit when they match `n_rows`, else topological
/// bucketing.
pub fn dstn_rows(c: &Circuit, n_rows: usize) -> Result<RowAssignment> {
    match RowAssignment::from_tags(c) {
        Some(r) if r.n_rows == n_rows => Ok(r),
        _ => assign_rows(c, n_rows),
    }
}

/// Sixteen-word sweep of the tunable cell on the clustered circuit.
pub fn sweep(c: &Circuit, tech: &Technology) -> Result<Vec<gating::SweepRow>> {
    let tr = timing::critical_path(c, &tech.device, tech.vth_logic)?;
    let clusters = gating::cbstd_partition(c, &tr, 1, tech)?;
    gating::tunable_sweep(c, &clusters, tech)
}
