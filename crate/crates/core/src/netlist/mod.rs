//! Gate-level combinational circuits.
//!
//! A [`Circuit`] is validated on construction: every net has exactly one
//! driver, every gate input and primary output is driven, gate arities match
//! their cells and the gate graph is acyclic. Gates are stored sorted by id,
//! which makes index order and id order the same thing.

mod eval;
mod multiplier;
mod rows;

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use self::eval::evaluate;
pub use self::multiplier::{generate_multiplier4x4, multiplier_inputs, multiplier_product};
pub use self::rows::{assign_rows, RowAssignment};

use crate::device::Geometry;
use crate::error::{Error, NetlistError, Result};

/// Boolean function implemented by a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogicFn {
    And2,
    HaSum,
    HaCarry,
    FaSum,
    FaCarry,
    Buf,
    /// Two-output half adder (sum, carry).
    HalfAdder,
    /// Two-output full adder (sum, carry).
    FullAdder,
}

impl LogicFn {
    pub const ALL: [LogicFn; 8] = [
        LogicFn::And2,
        LogicFn::HaSum,
        LogicFn::HaCarry,
        LogicFn::FaSum,
        LogicFn::FaCarry,
        LogicFn::Buf,
        LogicFn::HalfAdder,
        LogicFn::FullAdder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogicFn::And2 => "AND2",
            LogicFn::HaSum => "HA_SUM",
            LogicFn::HaCarry => "HA_CARRY",
            LogicFn::FaSum => "FA_SUM",
            LogicFn::FaCarry => "FA_CARRY",
            LogicFn::Buf => "BUF",
            LogicFn::HalfAdder => "HA",
            LogicFn::FullAdder => "FA",
        }
    }

    pub fn from_name(name: &str) -> Option<LogicFn> {
        LogicFn::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn n_inputs(self) -> usize {
        match self {
            LogicFn::Buf => 1,
            LogicFn::And2 | LogicFn::HaSum | LogicFn::HaCarry | LogicFn::HalfAdder => 2,
            LogicFn::FaSum | LogicFn::FaCarry | LogicFn::FullAdder => 3,
        }
    }

    pub fn n_outputs(self) -> usize {
        match self {
            LogicFn::HalfAdder | LogicFn::FullAdder => 2,
            _ => 1,
        }
    }

    /// Evaluates the function; `inputs.len()` must equal [`Self::n_inputs`].
    pub fn eval(self, inputs: &[bool]) -> [bool; 2] {
        let a = inputs[0];
        let b = inputs.get(1).copied().unwrap_or(false);
        let c = inputs.get(2).copied().unwrap_or(false);
        let maj = (a & b) | (a & c) | (b & c);
        match self {
            LogicFn::And2 | LogicFn::HaCarry => [a & b, false],
            LogicFn::HaSum => [a ^ b, false],
            LogicFn::FaSum => [a ^ b ^ c, false],
            LogicFn::FaCarry => [maj, false],
            LogicFn::Buf => [a, false],
            LogicFn::HalfAdder => [a ^ b, a & b],
            LogicFn::FullAdder => [a ^ b ^ c, maj],
        }
    }
}

/// A library cell with its electrical characterisation.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDef {
    pub name: String,
    pub n_inputs: usize,
    pub logic: LogicFn,
    /// Output load capacitance (F).
    pub cl: f64,
    /// Drive factor of the alpha-power delay model.
    pub k: f64,
    /// Peak discharge current with an ideal ground (A).
    pub i_peak: f64,
    /// Standby leakage at the reference geometry (A).
    pub i_leak_ref: f64,
    /// Representative NMOS geometry; overrides are scaled against it.
    pub geom_n: Geometry,
}

impl CellDef {
    pub fn validate(&self) -> core::result::Result<(), NetlistError> {
        let bad = |reason: String| NetlistError::InvalidCell {
            cell: self.name.clone(),
            reason,
        };
        if self.name.is_empty() || self.name.chars().any(char::is_whitespace) {
            return Err(bad("name must be a non-empty identifier".to_owned()));
        }
        if !(1..=3).contains(&self.n_inputs) || self.n_inputs != self.logic.n_inputs() {
            return Err(bad(format!(
                "{} inputs declared, {} takes {}",
                self.n_inputs,
                self.logic.name(),
                self.logic.n_inputs()
            )));
        }
        for (field, v) in [
            ("cl", self.cl),
            ("k", self.k),
            ("ipeak", self.i_peak),
            ("ileak", self.i_leak_ref),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(format!("{field} must be > 0, got {v}")));
            }
        }
        if self.geom_n.validate().is_err() {
            return Err(bad("reference geometry must be positive".to_owned()));
        }
        Ok(())
    }
}

/// One placed instance of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    pub id: String,
    pub cell: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub row: Option<usize>,
    /// Per-instance geometry (multiple channel-length sizing).
    pub geom_override: Option<Geometry>,
}

impl GateInstance {
    pub fn new(id: &str, cell: &str, inputs: &[&str], outputs: &[&str]) -> Self {
        GateInstance {
            id: id.into(),
            cell: cell.into(),
            inputs: inputs.iter().map(|s| (*s).into()).collect(),
            outputs: outputs.iter().map(|s| (*s).into()).collect(),
            row: None,
            geom_override: None,
        }
    }
}

/// A validated combinational netlist.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    cells: BTreeMap<String, CellDef>,
    gates: Vec<GateInstance>,
    primary_inputs: Vec<String>,
    primary_outputs: Vec<String>,
    order: Vec<usize>,
    levels: Vec<usize>,
    fanin: Vec<Vec<usize>>,
    fanout: Vec<Vec<usize>>,
    drives_output: Vec<bool>,
    has_pi_input: Vec<bool>,
}

impl Circuit {
    /// Builds and validates a circuit. Gates are re-ordered by id.
    pub fn new(
        cells: BTreeMap<String, CellDef>,
        mut gates: Vec<GateInstance>,
        primary_inputs: Vec<String>,
        primary_outputs: Vec<String>,
    ) -> core::result::Result<Circuit, NetlistError> {
        for (name, cell) in &cells {
            cell.validate()?;
            if *name != cell.name {
                return Err(NetlistError::InvalidCell {
                    cell: name.clone(),
                    reason: format!("registered under a different name `{}`", cell.name),
                });
            }
        }
        gates.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in gates.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(NetlistError::DuplicateGate(pair[0].id.clone()));
            }
        }

        // driver of each net: None = primary input, Some(i) = gate i
        let mut driver: BTreeMap<&str, Option<usize>> = BTreeMap::new();
        for pi in &primary_inputs {
            if driver.insert(pi.as_str(), None).is_some() {
                return Err(NetlistError::DuplicateInput(pi.clone()));
            }
        }
        for (i, g) in gates.iter().enumerate() {
            let cell = cells.get(&g.cell).ok_or_else(|| NetlistError::UnknownCell {
                gate: g.id.clone(),
                cell: g.cell.clone(),
            })?;
            if g.inputs.len() != cell.n_inputs {
                return Err(NetlistError::Arity {
                    gate: g.id.clone(),
                    what: "inputs",
                    expected: cell.n_inputs,
                    got: g.inputs.len(),
                });
            }
            if g.outputs.len() != cell.logic.n_outputs() {
                return Err(NetlistError::Arity {
                    gate: g.id.clone(),
                    what: "outputs",
                    expected: cell.logic.n_outputs(),
                    got: g.outputs.len(),
                });
            }
            if let Some(geom) = g.geom_override {
                if geom.validate().is_err() {
                    return Err(NetlistError::InvalidGeometry { gate: g.id.clone() });
                }
            }
            for net in &g.outputs {
                if let Some(prev) = driver.insert(net.as_str(), Some(i)) {
                    return Err(NetlistError::MultipleDrivers {
                        net: net.clone(),
                        first: prev.map(|p| gates[p].id.clone()),
                        second: Some(g.id.clone()),
                    });
                }
            }
        }

        let n = gates.len();
        let mut fanin = vec![Vec::new(); n];
        let mut has_pi_input = vec![false; n];
        for (i, g) in gates.iter().enumerate() {
            for net in &g.inputs {
                match driver.get(net.as_str()) {
                    None => {
                        return Err(NetlistError::Dangling {
                            net: net.clone(),
                            user: g.id.clone(),
                        })
                    }
                    Some(None) => has_pi_input[i] = true,
                    Some(Some(d)) => {
                        if !fanin[i].contains(d) {
                            fanin[i].push(*d);
                        }
                    }
                }
            }
        }
        let mut drives_output = vec![false; n];
        for po in &primary_outputs {
            match driver.get(po.as_str()) {
                None => {
                    return Err(NetlistError::Dangling {
                        net: po.clone(),
                        user: "output".into(),
                    })
                }
                Some(Some(d)) => drives_output[*d] = true,
                Some(None) => {}
            }
        }
        let mut fanout = vec![Vec::new(); n];
        for (i, fi) in fanin.iter().enumerate() {
            for &d in fi {
                fanout[d].push(i);
            }
        }

        let (order, levels) = levelize(&fanin, &fanout).map_err(|stuck| NetlistError::Cycle {
            witness: cycle_witness(&fanin, &stuck)
                .into_iter()
                .map(|i| gates[i].id.clone())
                .collect(),
        })?;

        Ok(Circuit {
            cells,
            gates,
            primary_inputs,
            primary_outputs,
            order,
            levels,
            fanin,
            fanout,
            drives_output,
            has_pi_input,
        })
    }

    pub fn cells(&self) -> &BTreeMap<String, CellDef> {
        &self.cells
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn primary_inputs(&self) -> &[String] {
        &self.primary_inputs
    }

    pub fn primary_outputs(&self) -> &[String] {
        &self.primary_outputs
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate_index(&self, id: &str) -> Option<usize> {
        self.gates.binary_search_by(|g| g.id.as_str().cmp(id)).ok()
    }

    pub fn gate_index_or_err(&self, id: &str) -> Result<usize> {
        self.gate_index(id).ok_or_else(|| Error::UnknownGate(id.into()))
    }

    pub fn cell_of(&self, gate: usize) -> &CellDef {
        // validated on construction
        &self.cells[&self.gates[gate].cell]
    }

    /// Gate indices in topological order: by level, then by id.
    pub fn topo_order(&self) -> &[usize] {
        &self.order
    }

    /// Logic depth of a gate; gates fed only by primary inputs are level 0.
    pub fn level(&self, gate: usize) -> usize {
        self.levels[gate]
    }

    /// Gates driving an input of `gate`, deduplicated.
    pub fn fanin(&self, gate: usize) -> &[usize] {
        &self.fanin[gate]
    }

    pub fn fanout(&self, gate: usize) -> &[usize] {
        &self.fanout[gate]
    }

    pub fn drives_output(&self, gate: usize) -> bool {
        self.drives_output[gate]
    }

    pub fn has_primary_input(&self, gate: usize) -> bool {
        self.has_pi_input[gate]
    }

    /// Effective geometry: the override if present, else the cell reference.
    pub fn geometry(&self, gate: usize) -> Geometry {
        self.gates[gate]
            .geom_override
            .unwrap_or(self.cell_of(gate).geom_n)
    }

    /// Width relative to the cell's reference; scales drive and peak current.
    pub fn drive_scale(&self, gate: usize) -> f64 {
        self.geometry(gate).w / self.cell_of(gate).geom_n.w
    }

    /// `(W/L)` relative to the cell's reference; scales leakage.
    pub fn leakage_scale(&self, gate: usize) -> f64 {
        self.geometry(gate).aspect() / self.cell_of(gate).geom_n.aspect()
    }

    pub fn peak_current(&self, gate: usize) -> f64 {
        self.cell_of(gate).i_peak * self.drive_scale(gate)
    }

    pub fn leakage_current(&self, gate: usize) -> f64 {
        self.cell_of(gate).i_leak_ref * self.leakage_scale(gate)
    }

    /// Copy of the circuit with every gate's row tag set from `rows`.
    pub fn with_rows(&self, rows: &RowAssignment) -> Circuit {
        let mut c = self.clone();
        for g in &mut c.gates {
            g.row = rows.mapping.get(&g.id).copied();
        }
        c
    }

    /// Copy with each gate passed through `f`; connectivity must not change.
    pub fn map_gates(&self, mut f: impl FnMut(&CellDef, &mut GateInstance)) -> Circuit {
        let mut c = self.clone();
        for g in &mut c.gates {
            let cell = &self.cells[&g.cell];
            f(cell, g);
        }
        c
    }

    pub fn into_parts(self) -> (BTreeMap<String, CellDef>, Vec<GateInstance>, Vec<String>, Vec<String>) {
        (self.cells, self.gates, self.primary_inputs, self.primary_outputs)
    }
}

/// Kahn levelisation. On a cycle returns the gates that never became ready.
fn levelize(fanin: &[Vec<usize>], fanout: &[Vec<usize>]) -> core::result::Result<(Vec<usize>, Vec<usize>), BTreeSet<usize>> {
    let n = fanin.len();
    let mut pending: Vec<usize> = fanin.iter().map(Vec::len).collect();
    let mut levels = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut wave: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut level = 0;
    while !wave.is_empty() {
        wave.sort_unstable();
        let mut next = Vec::new();
        for &g in &wave {
            levels[g] = level;
            order.push(g);
            for &h in &fanout[g] {
                pending[h] -= 1;
                if pending[h] == 0 {
                    next.push(h);
                }
            }
        }
        wave = next;
        level += 1;
    }
    if order.len() == n {
        Ok((order, levels))
    } else {
        Err((0..n).filter(|&i| pending[i] > 0).collect())
    }
}

fn cycle_witness(fanin: &[Vec<usize>], stuck: &BTreeSet<usize>) -> Vec<usize> {
    // every stuck gate has a stuck fanin, so walking backwards must revisit
    let Some(&start) = stuck.iter().next() else {
        return Vec::new();
    };
    let mut path = vec![start];
    let mut seen = BTreeMap::new();
    seen.insert(start, 0usize);
    let mut cur = start;
    loop {
        let next = *fanin[cur]
            .iter()
            .filter(|d| stuck.contains(d))
            .min()
            .expect("stuck gate without stuck driver");
        if let Some(&pos) = seen.get(&next) {
            let mut cyc: Vec<usize> = path[pos..].to_vec();
            cyc.reverse();
            return cyc;
        }
        seen.insert(next, path.len());
        path.push(next);
        cur = next;
    }
}

/// Returns a copy where gates in `critical` are widened by `widen` and all
/// other gates are lengthened by `lengthen`. Factors of exactly 1 leave the
/// corresponding gates untouched.
pub fn apply_mccmos(c: &Circuit, critical: &BTreeSet<String>, widen: f64, lengthen: f64) -> Result<Circuit> {
    for (name, f) in [("widen", widen), ("lengthen", lengthen)] {
        if !(f.is_finite() && f >= 1.0) {
            return Err(Error::InvalidParam {
                name,
                reason: format!("must be >= 1, got {f}"),
            });
        }
    }
    for id in critical {
        c.gate_index_or_err(id)?;
    }
    Ok(c.map_gates(|cell, g| {
        let base = g.geom_override.unwrap_or(cell.geom_n);
        if critical.contains(&g.id) {
            if widen != 1.0 {
                g.geom_override = Some(Geometry::new(base.w * widen, base.l));
            }
        } else if lengthen != 1.0 {
            g.geom_override = Some(Geometry::new(base.w, base.l * lengthen));
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::default_library;

    fn lib() -> BTreeMap<String, CellDef> {
        default_library()
    }

    fn pis(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| (*s).into()).collect()
    }

    #[test]
    fn rejects_multiple_drivers() {
        let gates = vec![
            GateInstance::new("g1", "AND2", &["a", "b"], &["y"]),
            GateInstance::new("g2", "AND2", &["a", "b"], &["y"]),
        ];
        let err = Circuit::new(lib(), gates, pis(&["a", "b"]), pis(&["y"])).unwrap_err();
        assert_eq!(
            err,
            NetlistError::MultipleDrivers {
                net: "y".into(),
                first: Some("g1".into()),
                second: Some("g2".into())
            }
        );
    }

    #[test]
    fn rejects_unknown_cell_and_arity() {
        let gates = vec![GateInstance::new("g1", "NAND9", &["a", "b"], &["y"])];
        assert!(matches!(
            Circuit::new(lib(), gates, pis(&["a", "b"]), pis(&["y"])),
            Err(NetlistError::UnknownCell { .. })
        ));
        let gates = vec![GateInstance::new("g1", "AND2", &["a"], &["y"])];
        assert!(matches!(
            Circuit::new(lib(), gates, pis(&["a"]), pis(&["y"])),
            Err(NetlistError::Arity { what: "inputs", .. })
        ));
    }

    #[test]
    fn rejects_dangling_and_cycles() {
        let gates = vec![GateInstance::new("g1", "AND2", &["a", "x"], &["y"])];
        assert!(matches!(
            Circuit::new(lib(), gates, pis(&["a"]), pis(&["y"])),
            Err(NetlistError::Dangling { .. })
        ));
        let gates = vec![
            GateInstance::new("g1", "AND2", &["a", "z"], &["y"]),
            GateInstance::new("g2", "AND2", &["a", "y"], &["z"]),
            GateInstance::new("g3", "AND2", &["a", "a"], &["w"]),
        ];
        match Circuit::new(lib(), gates, pis(&["a"]), pis(&["w"])) {
            Err(NetlistError::Cycle { witness }) => {
                let mut w = witness.clone();
                w.sort();
                assert_eq!(w, ["g1", "g2"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gates_sorted_and_levelled() {
        let gates = vec![
            GateInstance::new("z", "AND2", &["a", "b"], &["n1"]),
            GateInstance::new("m", "AND2", &["n1", "b"], &["n2"]),
            GateInstance::new("a", "AND2", &["n2", "a"], &["y"]),
        ];
        let c = Circuit::new(lib(), gates, pis(&["a", "b"]), pis(&["y"])).unwrap();
        let ids: Vec<_> = c.gates().iter().map(|g| g.id.as_str()).collect();
        assert_eq!(ids, ["a", "m", "z"]);
        let order: Vec<_> = c.topo_order().iter().map(|&i| c.gates()[i].id.as_str()).collect();
        assert_eq!(order, ["z", "m", "a"]);
    }

    #[test]
    fn mccmos_identity_and_lengthening() {
        let c = generate_multiplier4x4(&lib()).unwrap();
        let same = apply_mccmos(&c, &BTreeSet::new(), 1.0, 1.0).unwrap();
        assert_eq!(same, c);
        let long = apply_mccmos(&c, &BTreeSet::new(), 1.0, 2.0).unwrap();
        for (i, g) in long.gates().iter().enumerate() {
            let base = c.cell_of(i).geom_n;
            assert_eq!(g.geom_override, Some(Geometry::new(base.w, 2.0 * base.l)));
        }
        assert!(c.gates().iter().all(|g| g.geom_override.is_none()));
        assert!(apply_mccmos(&c, &BTreeSet::new(), 0.5, 1.0).is_err());
    }
}
