//! Line-oriented netlist text format.
//!
//! ```text
//! celldef NAME inputs=N fn=FN cl=F k=F ipeak=F ileak=F wn=F ln=F
//! input NET...
//! output NET...
//! gate ID CELL in=NET[,NET...] out=NET[,NET] [row=N] [wn=F ln=F]
//! ```
//!
//! `#` starts a comment. Numbers are plain decimal or scientific notation
//! in SI base units. The writer prints every number in the shortest form
//! that parses back to the same `f64`, so parse and write round-trip
//! exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use pglab_core::device::Geometry;
use pglab_core::netlist::{CellDef, Circuit, GateInstance, LogicFn};
use pglab_core::NetlistError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line of the offending record (0 when no line applies).
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Key/value fields of one record, in order, rejecting repeats.
struct Fields<'a> {
    line: usize,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, tokens: &[&'a str], allowed: &[&str]) -> Result<Self, ParseError> {
        let mut map = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected key=value, got `{tok}`")))?;
            if !allowed.contains(&k) {
                return Err(err(line, format!("unknown field `{k}`")));
            }
            if v.is_empty() {
                return Err(err(line, format!("field `{k}` has no value")));
            }
            if map.insert(k, v).is_some() {
                return Err(err(line, format!("field `{k}` given twice")));
            }
        }
        Ok(Fields { line, map })
    }

    fn opt(&self, key: &str) -> Option<&'a str> {
        self.map.get(key).copied()
    }

    fn req(&self, key: &str) -> Result<&'a str, ParseError> {
        self.opt(key)
            .ok_or_else(|| err(self.line, format!("missing field `{key}`")))
    }

    fn num(&self, key: &str) -> Result<f64, ParseError> {
        parse_num(self.line, key, self.req(key)?)
    }

    fn count(&self, key: &str) -> Result<usize, ParseError> {
        let v = self.req(key)?;
        v.parse()
            .map_err(|_| err(self.line, format!("field `{key}`: `{v}` is not a non-negative integer")))
    }
}

fn parse_num(line: usize, key: &str, v: &str) -> Result<f64, ParseError> {
    let ok = v
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'));
    match v.parse::<f64>() {
        Ok(x) if ok && x.is_finite() => Ok(x),
        _ => Err(err(line, format!("field `{key}`: `{v}` is not a finite number"))),
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && !s.contains(['=', ',', '#'])
}

fn net_list(line: usize, key: &str, v: &str) -> Result<Vec<String>, ParseError> {
    v.split(',')
        .map(|n| {
            if is_ident(n) {
                Ok(n.to_owned())
            } else {
                Err(err(line, format!("field `{key}`: bad net name `{n}`")))
            }
        })
        .collect()
}

/// Where each named item was declared, for error messages.
#[derive(Default)]
struct Lines {
    cells: BTreeMap<String, usize>,
    gates: BTreeMap<String, usize>,
    inputs: BTreeMap<String, usize>,
    outputs: BTreeMap<String, usize>,
}

impl Lines {
    fn gate(&self, id: &str) -> usize {
        self.gates.get(id).copied().unwrap_or(0)
    }

    fn driver(&self, d: &Option<String>, net: &str) -> (usize, String) {
        match d {
            Some(g) => (self.gate(g), format!("gate `{g}`")),
            None => (self.inputs.get(net).copied().unwrap_or(0), "primary input".to_owned()),
        }
    }

    fn locate(&self, e: NetlistError) -> ParseError {
        match &e {
            NetlistError::UnknownCell { gate, .. }
            | NetlistError::Arity { gate, .. }
            | NetlistError::InvalidGeometry { gate } => err(self.gate(gate), e.to_string()),
            NetlistError::MultipleDrivers { net, first, second } => {
                let (l1, w1) = self.driver(first, net);
                let (l2, w2) = self.driver(second, net);
                err(
                    l1.max(l2),
                    format!("net `{net}` driven by {w1} (line {l1}) and {w2} (line {l2})"),
                )
            }
            NetlistError::Cycle { witness } => {
                let at: Vec<String> = witness.iter().map(|g| format!("{g} (line {})", self.gate(g))).collect();
                let line = witness.iter().map(|g| self.gate(g)).min().unwrap_or(0);
                err(line, format!("combinational cycle through {}", at.join(" -> ")))
            }
            NetlistError::Dangling { net, user } => {
                let line = if user == "output" {
                    self.outputs.get(net).copied().unwrap_or(0)
                } else {
                    self.gate(user)
                };
                err(line, e.to_string())
            }
            NetlistError::DuplicateGate(id) => err(self.gate(id), e.to_string()),
            NetlistError::DuplicateInput(net) => err(self.inputs.get(net).copied().unwrap_or(0), e.to_string()),
            NetlistError::InvalidCell { cell, .. } => err(self.cells.get(cell).copied().unwrap_or(0), e.to_string()),
        }
    }
}

const CELL_FIELDS: [&str; 8] = ["inputs", "fn", "cl", "k", "ipeak", "ileak", "wn", "ln"];
const GATE_FIELDS: [&str; 5] = ["in", "out", "row", "wn", "ln"];

pub fn parse_netlist(text: &str) -> Result<Circuit, ParseError> {
    let mut lines = Lines::default();
    let mut cells = BTreeMap::new();
    let mut gates = Vec::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut output_set = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split_once('#').map_or(raw, |(b, _)| b);
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let Some((&kw, rest)) = tokens.split_first() else {
            continue;
        };
        match kw {
            "celldef" => {
                let (&name, rest) = rest
                    .split_first()
                    .ok_or_else(|| err(line, "celldef needs a name"))?;
                if !is_ident(name) {
                    return Err(err(line, format!("bad cell name `{name}`")));
                }
                let f = Fields::new(line, rest, &CELL_FIELDS)?;
                let fn_name = f.req("fn")?;
                let logic = LogicFn::from_name(fn_name)
                    .ok_or_else(|| err(line, format!("unknown logic function `{fn_name}`")))?;
                let cell = CellDef {
                    name: name.to_owned(),
                    n_inputs: f.count("inputs")?,
                    logic,
                    cl: f.num("cl")?,
                    k: f.num("k")?,
                    i_peak: f.num("ipeak")?,
                    i_leak_ref: f.num("ileak")?,
                    geom_n: Geometry::new(f.num("wn")?, f.num("ln")?),
                };
                if let Some(prev) = lines.cells.insert(name.to_owned(), line) {
                    return Err(err(line, format!("cell `{name}` already defined at line {prev}")));
                }
                cells.insert(name.to_owned(), cell);
            }
            "input" | "output" => {
                for &net in rest {
                    if !is_ident(net) {
                        return Err(err(line, format!("bad net name `{net}`")));
                    }
                    if kw == "input" {
                        if let Some(prev) = lines.inputs.insert(net.to_owned(), line) {
                            return Err(err(line, format!("primary input `{net}` already declared at line {prev}")));
                        }
                        inputs.push(net.to_owned());
                    } else {
                        if !output_set.insert(net.to_owned()) {
                            let prev = lines.outputs[net];
                            return Err(err(line, format!("primary output `{net}` already declared at line {prev}")));
                        }
                        lines.outputs.insert(net.to_owned(), line);
                        outputs.push(net.to_owned());
                    }
                }
            }
            "gate" => {
                let [id, cell, rest @ ..] = rest else {
                    return Err(err(line, "gate needs an id and a cell"));
                };
                if !is_ident(id) || !is_ident(cell) {
                    return Err(err(line, "bad gate id or cell name"));
                }
                let f = Fields::new(line, rest, &GATE_FIELDS)?;
                let ins = net_list(line, "in", f.req("in")?)?;
                let outs = net_list(line, "out", f.req("out")?)?;
                let row = match f.opt("row") {
                    Some(_) => Some(f.count("row")?),
                    None => None,
                };
                let geom = match (f.opt("wn"), f.opt("ln")) {
                    (None, None) => None,
                    (Some(_), Some(_)) => Some(Geometry::new(f.num("wn")?, f.num("ln")?)),
                    _ => return Err(err(line, "wn and ln must be given together")),
                };
                if let Some(prev) = lines.gates.insert((*id).to_owned(), line) {
                    return Err(err(line, format!("gate `{id}` already defined at line {prev}")));
                }
                gates.push(GateInstance {
                    id: (*id).to_owned(),
                    cell: (*cell).to_owned(),
                    inputs: ins,
                    outputs: outs,
                    row,
                    geom_override: geom,
                });
            }
            other => return Err(err(line, format!("unknown record `{other}`"))),
        }
    }
    Circuit::new(cells, gates, inputs, outputs).map_err(|e| lines.locate(e))
}

/// Shortest decimal form that parses back to the same value.
pub(crate) struct Num(pub f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0)
    }
}

/// Canonical text: cells by name, inputs, outputs, gates by id.
pub fn write_netlist(c: &Circuit) -> String {
    let mut out = String::new();
    for cell in c.cells().values() {
        let _ = writeln!(
            out,
            "celldef {} inputs={} fn={} cl={} k={} ipeak={} ileak={} wn={} ln={}",
            cell.name,
            cell.n_inputs,
            cell.logic.name(),
            Num(cell.cl),
            Num(cell.k),
            Num(cell.i_peak),
            Num(cell.i_leak_ref),
            Num(cell.geom_n.w),
            Num(cell.geom_n.l),
        );
    }
    if !c.primary_inputs().is_empty() {
        let _ = writeln!(out, "input {}", c.primary_inputs().join(" "));
    }
    if !c.primary_outputs().is_empty() {
        let _ = writeln!(out, "output {}", c.primary_outputs().join(" "));
    }
    for g in c.gates() {
        let _ = write!(out, "gate {} {} in={} out={}", g.id, g.cell, g.inputs.join(","), g.outputs.join(","));
        if let Some(r) = g.row {
            let _ = write!(out, " row={r}");
        }
        if let Some(geom) = g.geom_override {
            let _ = write!(out, " wn={} ln={}", Num(geom.w), Num(geom.l));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pglab_core::library::default_library;
    use pglab_core::netlist::generate_multiplier4x4;

    const ONE: &str = "\
# one gate
celldef AND2 inputs=2 fn=AND2 cl=1e-15 k=2e-5 ipeak=1e-5 ileak=2e-8 wn=9e-8 ln=4.5e-8
input a b   # two inputs
output y
gate g1 AND2 in=a,b out=y
";

    #[test]
    fn one_gate_round_trip() {
        let c = parse_netlist(ONE).unwrap();
        assert_eq!(c.len(), 1);
        let text = write_netlist(&c);
        let again = parse_netlist(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(write_netlist(&again), text);
    }

    #[test]
    fn multiplier_round_trip() {
        let c = generate_multiplier4x4(&default_library()).unwrap();
        let text = write_netlist(&c);
        assert_eq!(parse_netlist(&text).unwrap(), c);
    }

    #[test]
    fn empty_circuit_round_trip() {
        let text = "celldef BUF inputs=1 fn=BUF cl=1e-15 k=1e-5 ipeak=1e-6 ileak=1e-9 wn=9e-8 ln=4.5e-8\n";
        let c = parse_netlist(text).unwrap();
        assert!(c.is_empty());
        assert_eq!(write_netlist(&c), text);
        assert!(parse_netlist("").unwrap().is_empty());
    }

    #[test]
    fn overrides_and_rows_survive() {
        let text = ONE.replace("out=y", "out=y row=3 wn=1.35e-7 ln=9e-8");
        let c = parse_netlist(&text).unwrap();
        assert_eq!(c.gates()[0].row, Some(3));
        assert_eq!(c.gates()[0].geom_override, Some(Geometry::new(1.35e-7, 9e-8)));
        assert_eq!(parse_netlist(&write_netlist(&c)).unwrap(), c);
    }

    #[test]
    fn two_drivers_name_net_and_lines() {
        let text = format!("{ONE}gate g2 AND2 in=a,b out=y\n");
        let e = parse_netlist(&text).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.message.contains("`y`"), "{e}");
        assert!(e.message.contains("line 5") && e.message.contains("line 6"), "{e}");
    }

    #[test]
    fn undefined_cell_has_line() {
        let text = ONE.replace("gate g1 AND2", "gate g1 NAND9");
        let e = parse_netlist(&text).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("NAND9"));
    }

    #[test]
    fn malformed_records() {
        let cases = [
            (ONE.replace("cl=1e-15", "cl=1fF"), 2),
            (ONE.replace("cl=1e-15", "cl=inf"), 2),
            (ONE.replace("in=a,b", "in=a"), 5),
            (ONE.replace("in=a,b", "in=a,b in=a,b"), 5),
            (ONE.replace("out=y", "out=y wn=1e-7"), 5),
            (ONE.replace("out=y", "out=y colour=red"), 5),
            (ONE.replace("gate g1", "gaet g1"), 5),
            (ONE.replace("fn=AND2", "fn=XOR"), 2),
            (ONE.replace("output y", "output z"), 4),
            (format!("{ONE}input a\n"), 6),
        ];
        for (text, line) in cases {
            let e = parse_netlist(&text).unwrap_err();
            assert_eq!(e.line, line, "{e}");
        }
    }

    #[test]
    fn cycle_lists_gates() {
        let text = "\
celldef BUF inputs=1 fn=BUF cl=1e-15 k=1e-5 ipeak=1e-6 ileak=1e-9 wn=9e-8 ln=4.5e-8
output x
gate g1 BUF in=y out=x
gate g2 BUF in=x out=y
";
        let e = parse_netlist(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("g1 (line 3)") && e.message.contains("g2 (line 4)"), "{e}");
    }
}
