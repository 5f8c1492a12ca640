//! Report records and their CSV/JSON text forms.
//!
//! Numbers are written in scientific notation with six significant digits
//! and fields always appear in declaration order, so the text of a report
//! depends only on its values.

use std::fmt::Write as _;

use serde::Deserialize;

use pglab_core::flow::Outcome;
use pglab_core::gating::SweepRow;
use pglab_core::metrics::{delta_d_over_d, improvement_over_dbc, shift_from_dbc};
use pglab_core::netlist::Circuit;
use pglab_core::power::power_reduction;
use pglab_core::rail::{IrVerdict, RailSolution};
use pglab_core::timing::TimingResult;

use crate::netlist_text::{write_netlist, Num};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Six significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn round6(x: f64) -> f64 {
    sci(x).parse().expect("formatted float parses")
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn json_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "null".to_owned(), sci)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Derived {
    pub delta_d_over_d_pct: f64,
    pub shift_from_dbc_pct: f64,
    pub improvement_pct: f64,
    pub power_reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct VerdictRow {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CandidateRow {
    pub width_m: f64,
    pub vst_v: f64,
    pub delay_s: Option<f64>,
}

/// Result of one gating analysis.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct AnalysisReport {
    pub strategy: String,
    pub word: Option<String>,
    pub widths_m: Vec<f64>,
    pub d0_s: f64,
    pub gated_delay_s: f64,
    pub d_bc_s: f64,
    pub max_vst_v: f64,
    pub p_avg_w: f64,
    pub p_avg_ungated_w: f64,
    pub p_dyn_w: f64,
    pub p_leak_active_w: f64,
    pub p_leak_standby_w: f64,
    pub derived: Derived,
    pub verdicts: Vec<VerdictRow>,
    pub candidates: Vec<CandidateRow>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("report field `{field}` is {got}, raw fields give {want}")]
pub struct InconsistentReport {
    pub field: &'static str,
    pub got: f64,
    pub want: f64,
}

/// Relative tolerance of the consistency check run on every emit.
pub const CONSISTENCY_TOL: f64 = 1e-9;

impl AnalysisReport {
    pub fn from_outcome(o: &Outcome) -> AnalysisReport {
        let mut r = AnalysisReport {
            strategy: o.strategy.name().to_owned(),
            word: o.word.map(|w| w.to_string()),
            widths_m: o.widths.clone(),
            d0_s: o.d0,
            gated_delay_s: o.gated_delay,
            d_bc_s: o.d_bc,
            max_vst_v: o.max_vst,
            p_avg_w: o.power.p_avg,
            p_avg_ungated_w: o.ungated_power.p_avg,
            p_dyn_w: o.power.p_dyn,
            p_leak_active_w: o.power.p_leak_active,
            p_leak_standby_w: o.power.p_leak_standby,
            derived: Derived {
                delta_d_over_d_pct: 0.0,
                shift_from_dbc_pct: 0.0,
                improvement_pct: 0.0,
                power_reduction_pct: 0.0,
            },
            verdicts: o
                .verdicts
                .iter()
                .map(|v| VerdictRow {
                    name: v.name.clone(),
                    pass: v.pass,
                    value: v.value,
                    limit: v.limit,
                })
                .collect(),
            candidates: o
                .candidates
                .iter()
                .map(|c| CandidateRow {
                    width_m: c.width,
                    vst_v: c.vst,
                    delay_s: c.delay,
                })
                .collect(),
        };
        r.derived = r.recompute();
        r
    }

    /// Derived percentages from the raw fields.
    pub fn recompute(&self) -> Derived {
        Derived {
            delta_d_over_d_pct: delta_d_over_d(self.gated_delay_s, self.d0_s),
            shift_from_dbc_pct: shift_from_dbc(self.gated_delay_s, self.d_bc_s),
            improvement_pct: improvement_over_dbc(self.gated_delay_s, self.d_bc_s),
            power_reduction_pct: power_reduction(self.p_avg_w, self.p_avg_ungated_w),
        }
    }

    /// Compares every derived value with its recomputation. The tolerance
    /// is relative to the magnitude of the terms it is computed from, so a
    /// percentage that is zero up to rounding passes.
    pub fn check(&self, tol: f64) -> Result<(), InconsistentReport> {
        let want = self.recompute();
        let d = &self.derived;
        for (field, got, want) in [
            ("delta_d_over_d_pct", d.delta_d_over_d_pct, want.delta_d_over_d_pct),
            ("shift_from_dbc_pct", d.shift_from_dbc_pct, want.shift_from_dbc_pct),
            ("improvement_pct", d.improvement_pct, want.improvement_pct),
            ("power_reduction_pct", d.power_reduction_pct, want.power_reduction_pct),
        ] {
            // written negated so that NaN fails
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !((got - want).abs() <= tol * want.abs().max(100.0 * tol)) {
                return Err(InconsistentReport { field, got, want });
            }
        }
        Ok(())
    }

    fn verdict(&self, name: &str) -> Option<&VerdictRow> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// Checks the report and renders it.
pub fn emit_report(r: &AnalysisReport, format: Format) -> Result<String, InconsistentReport> {
    r.check(CONSISTENCY_TOL)?;
    Ok(render_report(r, format))
}

pub fn render_report(r: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => report_json(r),
        Format::Csv => report_csv(r),
    }
}

pub const REPORT_CSV_HEADER: &str = "strategy,word,widths_m,d0_s,gated_delay_s,d_bc_s,max_vst_v,p_avg_w,p_avg_ungated_w,\
p_dyn_w,p_leak_active_w,p_leak_standby_w,delta_d_over_d_pct,shift_from_dbc_pct,improvement_pct,power_reduction_pct,\
ir_drop,delay_budget";

fn report_csv(r: &AnalysisReport) -> String {
    let widths: Vec<String> = r.widths_m.iter().map(|&w| sci(w)).collect();
    let verdict = |name| match r.verdict(name) {
        Some(v) if v.pass => "pass",
        Some(_) => "fail",
        None => "",
    };
    let d = &r.derived;
    let nums = [
        r.d0_s,
        r.gated_delay_s,
        r.d_bc_s,
        r.max_vst_v,
        r.p_avg_w,
        r.p_avg_ungated_w,
        r.p_dyn_w,
        r.p_leak_active_w,
        r.p_leak_standby_w,
        d.delta_d_over_d_pct,
        d.shift_from_dbc_pct,
        d.improvement_pct,
        d.power_reduction_pct,
    ];
    let mut row = format!("{},{},{}", r.strategy, r.word.as_deref().unwrap_or(""), widths.join(";"));
    for x in nums {
        row.push(',');
        row.push_str(&sci(x));
    }
    let _ = write!(row, ",{},{}", verdict("ir_drop"), verdict("delay_budget"));
    format!("{REPORT_CSV_HEADER}\n{row}\n")
}

fn report_json(r: &AnalysisReport) -> String {
    let mut o = String::from("{\n");
    let _ = writeln!(o, "  \"strategy\": {},", json_str(&r.strategy));
    let _ = writeln!(o, "  \"word\": {},", r.word.as_deref().map_or_else(|| "null".to_owned(), json_str));
    let widths: Vec<String> = r.widths_m.iter().map(|&w| sci(w)).collect();
    let _ = writeln!(o, "  \"widths_m\": [{}],", widths.join(", "));
    for (k, v) in [
        ("d0_s", r.d0_s),
        ("gated_delay_s", r.gated_delay_s),
        ("d_bc_s", r.d_bc_s),
        ("max_vst_v", r.max_vst_v),
        ("p_avg_w", r.p_avg_w),
        ("p_avg_ungated_w", r.p_avg_ungated_w),
        ("p_dyn_w", r.p_dyn_w),
        ("p_leak_active_w", r.p_leak_active_w),
        ("p_leak_standby_w", r.p_leak_standby_w),
    ] {
        let _ = writeln!(o, "  \"{k}\": {},", sci(v));
    }
    let d = &r.derived;
    let _ = writeln!(
        o,
        "  \"derived\": {{\"delta_d_over_d_pct\": {}, \"shift_from_dbc_pct\": {}, \"improvement_pct\": {}, \"power_reduction_pct\": {}}},",
        sci(d.delta_d_over_d_pct),
        sci(d.shift_from_dbc_pct),
        sci(d.improvement_pct),
        sci(d.power_reduction_pct)
    );
    let verdicts: Vec<String> = r
        .verdicts
        .iter()
        .map(|v| {
            format!(
                "    {{\"name\": {}, \"pass\": {}, \"value\": {}, \"limit\": {}}}",
                json_str(&v.name),
                v.pass,
                sci(v.value),
                sci(v.limit)
            )
        })
        .collect();
    let _ = writeln!(o, "  \"verdicts\": [\n{}\n  ],", verdicts.join(",\n"));
    let cands: Vec<String> = r
        .candidates
        .iter()
        .map(|c| {
            format!(
                "    {{\"width_m\": {}, \"vst_v\": {}, \"delay_s\": {}}}",
                sci(c.width_m),
                sci(c.vst_v),
                json_opt(c.delay_s)
            )
        })
        .collect();
    if cands.is_empty() {
        o.push_str("  \"candidates\": []\n}\n");
    } else {
        let _ = write!(o, "  \"candidates\": [\n{}\n  ]\n}}\n", cands.join(",\n"));
    }
    o
}

pub fn parse_report_json(text: &str) -> Result<AnalysisReport, serde_json::Error> {
    serde_json::from_str(text)
}

impl AnalysisReport {
    /// Every number rounded as the text forms print it.
    pub fn rounded(&self) -> AnalysisReport {
        let mut r = self.clone();
        for x in [
            &mut r.d0_s,
            &mut r.gated_delay_s,
            &mut r.d_bc_s,
            &mut r.max_vst_v,
            &mut r.p_avg_w,
            &mut r.p_avg_ungated_w,
            &mut r.p_dyn_w,
            &mut r.p_leak_active_w,
            &mut r.p_leak_standby_w,
            &mut r.derived.delta_d_over_d_pct,
            &mut r.derived.shift_from_dbc_pct,
            &mut r.derived.improvement_pct,
            &mut r.derived.power_reduction_pct,
        ] {
            *x = round6(*x);
        }
        for w in &mut r.widths_m {
            *w = round6(*w);
        }
        for v in &mut r.verdicts {
            v.value = round6(v.value);
            v.limit = round6(v.limit);
        }
        for c in &mut r.candidates {
            c.width_m = round6(c.width_m);
            c.vst_v = round6(c.vst_v);
            c.delay_s = c.delay_s.map(round6);
        }
        r
    }
}

// ---- static timing ------------------------------------------------------

pub const STA_CSV_HEADER: &str = "gate,level,arrival_s,critical";

pub fn sta_csv(c: &Circuit, tr: &TimingResult) -> String {
    let mut out = format!("{STA_CSV_HEADER}\n");
    for &g in c.topo_order() {
        let id = &c.gates()[g].id;
        let crit = tr.critical_path.contains(id);
        let _ = writeln!(out, "{id},{},{},{crit}", c.level(g), sci(tr.per_gate_arrival[id]));
    }
    out
}

pub fn sta_json(c: &Circuit, tr: &TimingResult) -> String {
    let path: Vec<String> = tr.critical_path.iter().map(|id| json_str(id)).collect();
    let gates: Vec<String> = c
        .topo_order()
        .iter()
        .map(|&g| {
            let id = &c.gates()[g].id;
            format!(
                "    {{\"gate\": {}, \"level\": {}, \"arrival_s\": {}}}",
                json_str(id),
                c.level(g),
                sci(tr.per_gate_arrival[id])
            )
        })
        .collect();
    format!(
        "{{\n  \"d0_s\": {},\n  \"critical_path\": [{}],\n  \"gates\": [\n{}\n  ]\n}}\n",
        sci(tr.d0),
        path.join(", "),
        gates.join(",\n")
    )
}

/// The netlist preceded by the timing summary as comment lines, so the
/// output can feed another command. Delays are printed exactly.
pub fn sta_annotated(c: &Circuit, tr: &TimingResult) -> String {
    format!(
        "# sta d0_s={}\n# sta critical_path={}\n{}",
        Num(tr.d0),
        tr.critical_path.join(","),
        write_netlist(c)
    )
}

// ---- tunable sweep ------------------------------------------------------

pub const SWEEP_CSV_HEADER: &str = "word,eff_width_m,vgnd1_v,delay_s,avg_power_w,feasible";

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.word,
            sci(r.eff_width),
            opt(r.vgnd1),
            opt(r.delay),
            opt(r.avg_power),
            r.feasible
        );
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> String {
    let items: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "  {{\"word\": \"{}\", \"eff_width_m\": {}, \"vgnd1_v\": {}, \"delay_s\": {}, \"avg_power_w\": {}, \"feasible\": {}}}",
                r.word,
                sci(r.eff_width),
                json_opt(r.vgnd1),
                json_opt(r.delay),
                json_opt(r.avg_power),
                r.feasible
            )
        })
        .collect();
    format!("[\n{}\n]\n", items.join(",\n"))
}

// ---- distributed rail ---------------------------------------------------

pub const RAIL_CSV_HEADER: &str = "node,v_volts,violator";

pub fn rail_csv(sol: &RailSolution, verdict: &IrVerdict) -> String {
    let mut out = format!("{RAIL_CSV_HEADER}\n");
    for (k, v) in sol.v.iter().enumerate() {
        let _ = writeln!(out, "{k},{},{}", sci(*v), verdict.violators.contains(&k));
    }
    out
}
