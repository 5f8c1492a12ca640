use std::collections::BTreeMap;

use proptest::prelude::*;

use pglab::netlist_text::{parse_netlist, write_netlist};
use pglab_core::device::Geometry;
use pglab_core::netlist::{CellDef, Circuit, GateInstance, LogicFn};

/// Positive values spread over many decades with full mantissas.
fn positive() -> impl Strategy<Value = f64> {
    (1.0f64..10.0, -20i32..3).prop_map(|(m, e)| m * 10f64.powi(e))
}

fn cell(name: &str, logic: LogicFn, v: &[f64]) -> CellDef {
    CellDef {
        name: name.into(),
        n_inputs: logic.n_inputs(),
        logic,
        cl: v[0],
        k: v[1],
        i_peak: v[2],
        i_leak_ref: v[3],
        geom_n: Geometry::new(v[4], v[5]),
    }
}

#[derive(Debug, Clone)]
struct GateSpec {
    two: bool,
    a: usize,
    b: usize,
    row: Option<usize>,
    geom: Option<(f64, f64)>,
}

fn gate_spec(avail: usize) -> impl Strategy<Value = GateSpec> {
    (
        any::<bool>(),
        0..avail,
        0..avail,
        proptest::option::of(0usize..8),
        proptest::option::of((positive(), positive())),
    )
        .prop_map(|(two, a, b, row, geom)| GateSpec { two, a, b, row, geom })
}

fn circuit() -> impl Strategy<Value = (Vec<f64>, usize, Vec<GateSpec>)> {
    (1usize..=4, 0usize..=20).prop_flat_map(|(n_pi, n)| {
        let gates: Vec<_> = (0..n).map(|i| gate_spec(n_pi + i)).collect();
        (proptest::collection::vec(positive(), 12), Just(n_pi), gates)
    })
}

fn build(values: &[f64], n_pi: usize, specs: &[GateSpec]) -> Circuit {
    let mut cells = BTreeMap::new();
    cells.insert("AND2".to_owned(), cell("AND2", LogicFn::And2, &values[..6]));
    cells.insert("BUF".to_owned(), cell("BUF", LogicFn::Buf, &values[6..]));
    let net = |k: usize| if k < n_pi { format!("pi{k}") } else { format!("w{}", k - n_pi) };
    let mut gates = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        let (cell, ins) = if s.two { ("AND2", vec![net(s.a), net(s.b)]) } else { ("BUF", vec![net(s.a)]) };
        let refs: Vec<&str> = ins.iter().map(String::as_str).collect();
        let mut g = GateInstance::new(&format!("u{i}"), cell, &refs, &[&format!("w{i}")]);
        g.row = s.row;
        g.geom_override = s.geom.map(|(w, l)| Geometry::new(w, l));
        gates.push(g);
    }
    let inputs = (0..n_pi).map(|k| format!("pi{k}")).collect();
    let outputs = (0..specs.len()).map(|i| format!("w{i}")).collect();
    Circuit::new(cells, gates, inputs, outputs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn parse_write_identity((values, n_pi, specs) in circuit()) {
        let c = build(&values, n_pi, &specs);
        let text = write_netlist(&c);
        let back = parse_netlist(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(write_netlist(&back), text);
    }
}

#[test]
fn golden_files_round_trip() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    for name in ["conventional.json", "dstn.json"] {
        let text = std::fs::read_to_string(format!("{dir}/{name}")).unwrap();
        let r = pglab::report::parse_report_json(&text).unwrap();
        assert_eq!(pglab::report::render_report(&r, pglab::Format::Json), text, "{name}");
        // the rounded report still passes the consistency check loosely
        assert!(r.check(1e-4).is_ok(), "{name}");
    }
}
