//! Sleep-transistor power-gating strategies.
//!
//! All strategies share one electrical model: a cluster draws the sum of its
//! cells' peak currents, reduced by the alpha-power law as its virtual
//! ground rises, through a footer whose linear-region on-resistance is
//! `beta / (W/L)`. The drop `v_ST` is the self-consistent operating point.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::device::{self, Geometry};
use crate::error::{Error, Result};
use crate::netlist::{CellDef, Circuit, LogicFn};
use crate::power;
use crate::tech::Technology;
use crate::timing::{self, TimingResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClusterKind {
    Critical,
    NonCritical,
}

/// Gates sharing one sleep transistor (or one rail tap).
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub id: usize,
    pub gate_ids: BTreeSet<String>,
    pub kind: ClusterKind,
    /// Aggregate peak discharge current with an ideal ground (A).
    pub i_peak: f64,
}

impl Cluster {
    /// Cluster over gate indices of `c`; the peak current is the scaled sum
    /// of member peak currents.
    pub fn from_gates(c: &Circuit, id: usize, kind: ClusterKind, gates: &[usize], scale: f64) -> Result<Cluster> {
        if gates.is_empty() {
            return Err(Error::InvalidParam {
                name: "cluster",
                reason: format!("cluster {id} is empty"),
            });
        }
        let i_peak = scale * gates.iter().map(|&g| c.peak_current(g)).sum::<f64>();
        if !(i_peak > 0.0) {
            return Err(Error::InvalidParam {
                name: "i_peak_scale",
                reason: format!("cluster {id} has non-positive peak current"),
            });
        }
        Ok(Cluster {
            id,
            gate_ids: gates.iter().map(|&g| c.gates()[g].id.clone()).collect(),
            kind,
            i_peak,
        })
    }
}

/// Four-bit configuration `B3 B2 B1 B0` of the tunable cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TuningWord(u8);

impl TuningWord {
    pub const NOMINAL: TuningWord = TuningWord(0b1000);

    pub fn new(bits: u8) -> Result<TuningWord> {
        if bits > 0b1111 {
            return Err(Error::InvalidParam {
                name: "word",
                reason: format!("{bits} does not fit in four bits"),
            });
        }
        Ok(TuningWord(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Bit `B_i`, `i` in `0..4`.
    pub fn bit(self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub fn all() -> impl Iterator<Item = TuningWord> {
        (0..16).map(TuningWord)
    }
}

impl fmt::Display for TuningWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

impl FromStr for TuningWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 4 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidParam {
                name: "word",
                reason: format!("expected four binary digits B3B2B1B0, got `{s}`"),
            });
        }
        Ok(TuningWord(u8::from_str_radix(s, 2).expect("validated")))
    }
}

/// Total conducting width `sum_{i=1..4} i * w_unit * B_{i-1}`.
pub fn tunable_effective_width(word: TuningWord, w_unit: f64) -> f64 {
    let units: u32 = (1..=4).filter(|&i| word.bit(i as usize - 1)).sum();
    f64::from(units) * w_unit
}

/// Gate drive of the four devices; entry `i` is the `(i+1) * W` device.
/// Each control AND gate passes `B_i` only while `slpbar1` is high.
pub fn tunable_control(slpbar1: bool, word: TuningWord) -> [bool; 4] {
    core::array::from_fn(|i| slpbar1 && word.bit(i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StMode {
    Fixed,
    Tunable(TuningWord),
}

/// A footer switch. For a tunable cell `geom.w` is the unit width and the
/// cell physically holds devices of 1, 2, 3 and 4 units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleepTransistor {
    pub geom: Geometry,
    pub mode: StMode,
    /// Active-mode enable; low means standby.
    pub slpbar1: bool,
}

impl SleepTransistor {
    pub fn fixed(w: f64, l: f64) -> Self {
        SleepTransistor {
            geom: Geometry::new(w, l),
            mode: StMode::Fixed,
            slpbar1: true,
        }
    }

    pub fn tunable(w_unit: f64, l: f64, word: TuningWord) -> Self {
        SleepTransistor {
            geom: Geometry::new(w_unit, l),
            mode: StMode::Tunable(word),
            slpbar1: true,
        }
    }

    /// Width of silicon, conducting or not.
    pub fn physical_width(&self) -> f64 {
        match self.mode {
            StMode::Fixed => self.geom.w,
            StMode::Tunable(_) => 10.0 * self.geom.w,
        }
    }

    /// Width that conducts in active mode. Parallel devices add.
    pub fn active_width(&self) -> f64 {
        match self.mode {
            StMode::Fixed => {
                if self.slpbar1 {
                    self.geom.w
                } else {
                    0.0
                }
            }
            StMode::Tunable(word) => {
                let units: u32 = (1..=4)
                    .zip(tunable_control(self.slpbar1, word))
                    .filter(|(_, on)| *on)
                    .map(|(i, _)| i)
                    .sum();
                f64::from(units) * self.geom.w
            }
        }
    }

    /// Linear-region on-resistance of the conducting devices.
    pub fn on_resistance(&self, tech: &Technology) -> Result<f64> {
        let w = self.active_width();
        if !(w > 0.0) {
            return Err(Error::Infeasible("no conducting sleep transistor".into()));
        }
        device::on_resistance(&Geometry::new(w, self.geom.l), &tech.device, tech.alpha_drop, tech.device.vth0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Conventional,
    Cbstd,
    Dstn,
    Tunable,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Conventional => "conv",
            Strategy::Cbstd => "cbstd",
            Strategy::Dstn => "dstn",
            Strategy::Tunable => "tunable",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conv" | "conventional" => Ok(Strategy::Conventional),
            "cbstd" => Ok(Strategy::Cbstd),
            "dstn" => Ok(Strategy::Dstn),
            "tunable" => Ok(Strategy::Tunable),
            _ => Err(Error::InvalidParam {
                name: "strategy",
                reason: format!("unknown strategy `{s}`"),
            }),
        }
    }
}

/// A gating strategy instance over a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct GatingPlan {
    pub strategy: Strategy,
    pub clusters: Vec<Cluster>,
    pub st_per_cluster: BTreeMap<usize, SleepTransistor>,
    /// Virtual-ground drop of each cluster, filled by analysis.
    pub vst_per_cluster: BTreeMap<usize, f64>,
    /// Ungated control logic driving the switches (tunable cell AND gates).
    pub control_cells: Vec<CellDef>,
}

impl GatingPlan {
    /// Checks that the clusters partition the gates of `c` and that every
    /// cluster has a switch.
    pub fn new(
        c: &Circuit,
        strategy: Strategy,
        clusters: Vec<Cluster>,
        st_per_cluster: BTreeMap<usize, SleepTransistor>,
    ) -> Result<GatingPlan> {
        let mut seen = BTreeSet::new();
        for cl in &clusters {
            if !st_per_cluster.contains_key(&cl.id) {
                return Err(Error::InvalidParam {
                    name: "plan",
                    reason: format!("cluster {} has no sleep transistor", cl.id),
                });
            }
            for id in &cl.gate_ids {
                c.gate_index_or_err(id)?;
                if !seen.insert(id.as_str()) {
                    return Err(Error::InvalidParam {
                        name: "plan",
                        reason: format!("gate `{id}` is in more than one cluster"),
                    });
                }
            }
        }
        if seen.len() != c.len() {
            return Err(Error::InvalidParam {
                name: "plan",
                reason: format!("clusters cover {} of {} gates", seen.len(), c.len()),
            });
        }
        Ok(GatingPlan {
            strategy,
            clusters,
            st_per_cluster,
            vst_per_cluster: BTreeMap::new(),
            control_cells: Vec::new(),
        })
    }

    /// Per-gate drops indexed like `c.gates()`.
    pub fn gate_drops(&self, c: &Circuit) -> Vec<f64> {
        let mut v = vec![0.0; c.len()];
        for cl in &self.clusters {
            let drop = self.vst_per_cluster.get(&cl.id).copied().unwrap_or(0.0);
            for id in &cl.gate_ids {
                if let Some(g) = c.gate_index(id) {
                    v[g] = drop;
                }
            }
        }
        v
    }

    pub fn max_drop(&self) -> f64 {
        self.vst_per_cluster.values().copied().fold(0.0, f64::max)
    }

    pub fn total_physical_width(&self) -> f64 {
        self.st_per_cluster.values().map(SleepTransistor::physical_width).sum()
    }

    pub fn total_active_width(&self) -> f64 {
        self.st_per_cluster.values().map(SleepTransistor::active_width).sum()
    }
}

const VST_TOLERANCE: f64 = 1e-12;

/// Self-consistent drop `v = r_on * i_peak0 * ((Vdd - v - vth)/(Vdd - vth))^alpha`.
pub fn solve_vst(i_peak0: f64, r_on: f64, p: &device::DeviceParams, vth: f64) -> Result<f64> {
    solve_vst_with_alpha(i_peak0, r_on, p.vdd, vth, p.alpha)
}

/// [`solve_vst`] with an explicit exponent; `alpha = 0` models a constant
/// current.
///
/// `f(v) = v - r_on * i(v)` is strictly increasing, so bisection over
/// `[0, Vdd - vth)` finds the unique root.
pub fn solve_vst_with_alpha(i_peak0: f64, r_on: f64, vdd: f64, vth: f64, alpha: f64) -> Result<f64> {
    if !(i_peak0 >= 0.0 && r_on >= 0.0 && alpha >= 0.0) || !(i_peak0.is_finite() && r_on.is_finite()) {
        return Err(Error::InvalidParam {
            name: "solve_vst",
            reason: format!("need finite i_peak0 >= 0, r_on >= 0, alpha >= 0 (got {i_peak0}, {r_on}, {alpha})"),
        });
    }
    if !(vth < vdd) {
        return Err(Error::ThresholdAboveSupply { vth, vdd });
    }
    let span = vdd - vth;
    let ir = r_on * i_peak0;
    if ir == 0.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return if ir < span {
            Ok(ir)
        } else {
            Err(Error::Infeasible(format!("drop {ir:.6} V leaves no overdrive")))
        };
    }
    let f = |v: f64| v - ir * libm::pow((span - v) / span, alpha);
    let (mut lo, mut hi) = (0.0, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= VST_TOLERANCE {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solves every cluster's drop in place.
pub fn solve_plan_drops(plan: &mut GatingPlan, tech: &Technology) -> Result<()> {
    for cl in &plan.clusters {
        let st = plan.st_per_cluster[&cl.id];
        let r = st.on_resistance(tech)?;
        let v = solve_vst(cl.i_peak, r, &tech.device, tech.vth_logic)?;
        plan.vst_per_cluster.insert(cl.id, v);
    }
    Ok(())
}

/// Gated timing of a plan whose drops are filled.
pub fn plan_timing(c: &Circuit, plan: &GatingPlan, tech: &Technology) -> Result<TimingResult> {
    timing::gated_timing(c, &tech.device, tech.vth_logic, &plan.gate_drops(c))
}

/// One evaluated sizing candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub width: f64,
    /// Largest drop of the candidate (V).
    pub vst: f64,
    /// Gated critical delay, `None` when the drop starves the logic.
    pub delay: Option<f64>,
}

/// Smallest width whose drop is at most `frac * vdd`.
pub fn select_by_drop(rows: &[(f64, f64)], frac: f64, vdd: f64) -> Result<f64> {
    let limit = frac * vdd;
    rows.iter()
        .filter(|(_, v)| *v <= limit)
        .map(|(w, _)| *w)
        .fold(None, |best: Option<f64>, w| Some(best.map_or(w, |b| b.min(w))))
        .ok_or_else(|| Error::Infeasible(format!("no candidate keeps v_ST within {limit:.6} V")))
}

/// Smallest width whose delay is at most `budget * d_bc`.
pub fn cbstd_select_width(rows: &[(f64, f64)], d_bc: f64, budget: f64) -> Result<f64> {
    let limit = budget * d_bc;
    rows.iter()
        .filter(|(_, d)| *d <= limit)
        .map(|(w, _)| *w)
        .fold(None, |best: Option<f64>, w| Some(best.map_or(w, |b| b.min(w))))
        .ok_or_else(|| Error::Infeasible(format!("no candidate meets the delay limit {limit:e} s")))
}

fn sorted_widths(candidates: &[f64]) -> Result<Vec<f64>> {
    if candidates.is_empty() || candidates.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidParam {
            name: "candidates",
            reason: "need at least one positive width".into(),
        });
    }
    let mut w = candidates.to_vec();
    w.sort_by(f64::total_cmp);
    w.dedup();
    Ok(w)
}

/// Result of a width search.
#[derive(Debug, Clone, PartialEq)]
pub struct Sized {
    pub plan: GatingPlan,
    pub timing: TimingResult,
    pub width: f64,
    pub candidates: Vec<Candidate>,
}

/// One cluster holding every gate behind a fixed switch of width `w`.
pub fn single_st_plan(c: &Circuit, w: f64, tech: &Technology) -> Result<GatingPlan> {
    let all: Vec<usize> = (0..c.len()).collect();
    let cluster = Cluster::from_gates(c, 0, ClusterKind::Critical, &all, tech.i_peak_scale)?;
    let mut sts = BTreeMap::new();
    sts.insert(0, SleepTransistor::fixed(w, tech.st_length));
    let mut plan = GatingPlan::new(c, Strategy::Conventional, vec![cluster], sts)?;
    solve_plan_drops(&mut plan, tech)?;
    Ok(plan)
}

/// Single sleep transistor for the whole circuit: the smallest candidate
/// whose drop stays within `frac * Vdd`.
pub fn conventional_gating(c: &Circuit, candidates: &[f64], tech: &Technology, frac: f64) -> Result<Sized> {
    let mut rows = Vec::new();
    for &w in &sorted_widths(candidates)? {
        let plan = single_st_plan(c, w, tech)?;
        let delay = plan_timing(c, &plan, tech).ok().map(|t| t.d0);
        rows.push(Candidate {
            width: w,
            vst: plan.max_drop(),
            delay,
        });
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.width, r.vst)).collect();
    let width = select_by_drop(&pairs, frac, tech.device.vdd)?;
    let plan = single_st_plan(c, width, tech)?;
    let timing = plan_timing(c, &plan, tech)?;
    Ok(Sized {
        plan,
        timing,
        width,
        candidates: rows,
    })
}

/// Critical cluster = the gates of `tr.critical_path`; the remaining gates,
/// in topological order, are split into at most `n_nc` contiguous
/// non-critical clusters of balanced size.
pub fn cbstd_partition(c: &Circuit, tr: &TimingResult, n_nc: usize, tech: &Technology) -> Result<Vec<Cluster>> {
    let critical: Vec<usize> = tr
        .critical_path
        .iter()
        .map(|id| c.gate_index_or_err(id))
        .collect::<Result<_>>()?;
    let rest: Vec<usize> = c
        .topo_order()
        .iter()
        .copied()
        .filter(|g| !critical.contains(g))
        .collect();
    let mut clusters = Vec::new();
    if !critical.is_empty() {
        clusters.push(Cluster::from_gates(c, 0, ClusterKind::Critical, &critical, tech.i_peak_scale)?);
    }
    if rest.is_empty() {
        return Ok(clusters);
    }
    if n_nc == 0 {
        return Err(Error::InvalidParam {
            name: "n_nc",
            reason: "non-critical gates exist but zero non-critical clusters requested".into(),
        });
    }
    let k = n_nc.min(rest.len());
    let (base, extra) = (rest.len() / k, rest.len() % k);
    let mut pos = 0;
    for b in 0..k {
        let size = base + usize::from(b < extra);
        let id = clusters.len();
        clusters.push(Cluster::from_gates(c, id, ClusterKind::NonCritical, &rest[pos..pos + size], tech.i_peak_scale)?);
        pos += size;
    }
    Ok(clusters)
}

/// Clustered plan with `critical` on the critical cluster and the
/// technology's fixed width on every non-critical cluster.
pub fn clustered_plan(
    c: &Circuit,
    strategy: Strategy,
    clusters: &[Cluster],
    critical: SleepTransistor,
    tech: &Technology,
) -> Result<GatingPlan> {
    let sts = clusters
        .iter()
        .map(|cl| {
            let st = match cl.kind {
                ClusterKind::Critical => critical,
                ClusterKind::NonCritical => SleepTransistor::fixed(tech.nc_width, tech.st_length),
            };
            (cl.id, st)
        })
        .collect();
    GatingPlan::new(c, strategy, clusters.to_vec(), sts)
}

/// Clustered gating: the smallest critical-cluster width whose gated delay
/// stays within `budget * d_bc`.
pub fn cbstd_gating(
    c: &Circuit,
    clusters: &[Cluster],
    candidates: &[f64],
    d_bc: f64,
    tech: &Technology,
) -> Result<Sized> {
    let evaluate = |w: f64| -> Result<(GatingPlan, Option<TimingResult>)> {
        let st = SleepTransistor::fixed(w, tech.st_length);
        let mut plan = clustered_plan(c, Strategy::Cbstd, clusters, st, tech)?;
        solve_plan_drops(&mut plan, tech)?;
        let t = plan_timing(c, &plan, tech).ok();
        Ok((plan, t))
    };
    let mut rows = Vec::new();
    for &w in &sorted_widths(candidates)? {
        let (plan, t) = evaluate(w)?;
        rows.push(Candidate {
            width: w,
            vst: plan.max_drop(),
            delay: t.map(|t| t.d0),
        });
    }
    let pairs: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.delay.map(|d| (r.width, d))).collect();
    let width = cbstd_select_width(&pairs, d_bc, tech.delay_budget)?;
    let (plan, timing) = evaluate(width)?;
    Ok(Sized {
        plan,
        timing: timing.expect("selected candidate has a delay"),
        width,
        candidates: rows,
    })
}

/// Load and leakage of a control gate relative to the library AND2; the
/// control gates drive a single switch gate each and are minimum size.
pub const CONTROL_CELL_SCALE: f64 = 0.25;

fn control_cell(and2: &CellDef) -> CellDef {
    let mut cell = and2.clone();
    cell.cl *= CONTROL_CELL_SCALE;
    cell.k *= CONTROL_CELL_SCALE;
    cell.i_peak *= CONTROL_CELL_SCALE;
    cell.i_leak_ref *= CONTROL_CELL_SCALE;
    cell.geom_n.w *= CONTROL_CELL_SCALE;
    cell
}

/// Clustered plan with the tunable cell on the critical cluster.
pub fn tunable_plan(c: &Circuit, clusters: &[Cluster], word: TuningWord, tech: &Technology) -> Result<GatingPlan> {
    let st = SleepTransistor::tunable(tech.w_unit, tech.st_length, word);
    let mut plan = clustered_plan(c, Strategy::Tunable, clusters, st, tech)?;
    let and2 = c
        .cells()
        .values()
        .find(|cell| cell.logic == LogicFn::And2)
        .ok_or(Error::MissingCell("AND2"))?;
    plan.control_cells = vec![control_cell(and2); 4];
    Ok(plan)
}

/// One row of the sixteen-word sweep. Word `0000` has no conducting device
/// and carries no operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub word: TuningWord,
    pub eff_width: f64,
    /// Virtual rail of the tunable cluster (V).
    pub vgnd1: Option<f64>,
    pub delay: Option<f64>,
    pub avg_power: Option<f64>,
    pub feasible: bool,
}

/// Evaluates every configuration word; non-critical switches stay fixed.
pub fn tunable_sweep(c: &Circuit, clusters: &[Cluster], tech: &Technology) -> Result<Vec<SweepRow>> {
    let tunable_id = clusters
        .iter()
        .find(|cl| cl.kind == ClusterKind::Critical)
        .map(|cl| cl.id)
        .ok_or_else(|| Error::InvalidParam {
            name: "clusters",
            reason: "no critical cluster to hold the tunable cell".into(),
        })?;
    let mut rows = Vec::with_capacity(16);
    for word in TuningWord::all() {
        let eff_width = tunable_effective_width(word, tech.w_unit);
        let mut plan = tunable_plan(c, clusters, word, tech)?;
        if eff_width == 0.0 {
            rows.push(SweepRow {
                word,
                eff_width,
                vgnd1: None,
                delay: None,
                avg_power: None,
                feasible: false,
            });
            continue;
        }
        solve_plan_drops(&mut plan, tech)?;
        let delay = plan_timing(c, &plan, tech).ok().map(|t| t.d0);
        let power = power::average_power(c, Some(&plan), tech)?;
        rows.push(SweepRow {
            word,
            eff_width,
            vgnd1: plan.vst_per_cluster.get(&tunable_id).copied(),
            delay,
            avg_power: Some(power.p_avg),
            feasible: delay.is_some(),
        });
    }
    Ok(rows)
}
