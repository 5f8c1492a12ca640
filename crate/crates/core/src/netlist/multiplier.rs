//! 4x4 unsigned ripple-carry array multiplier.
//!
//! Sixteen AND2 gates form the partial products `a_i & b_j`. Adder row `j`
//! (1..=3) adds partial-product row `j` to the sums of row `j-1`, rippling
//! its carry from the least significant position to the most significant
//! one, whose carry-out feeds the top position of the next row. Row 1 is
//! HA FA FA HA, rows 2 and 3 are HA FA FA FA.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{assign_rows, CellDef, Circuit, GateInstance, LogicFn};
use crate::error::{Error, Result};

fn find_cell(lib: &BTreeMap<String, CellDef>, logic: LogicFn, label: &'static str) -> Result<String> {
    lib.values()
        .find(|c| c.logic == logic)
        .map(|c| c.name.clone())
        .ok_or(Error::MissingCell(label))
}

/// Builds the multiplier with inputs `a0..a3`, `b0..b3` and outputs
/// `p0..p7`, tagged with seven rows.
// positions index several parallel sequences, so the loops stay indexed
#[allow(clippy::needless_range_loop)]
pub fn generate_multiplier4x4(lib: &BTreeMap<String, CellDef>) -> Result<Circuit> {
    let and2 = find_cell(lib, LogicFn::And2, "AND2")?;
    let ha = find_cell(lib, LogicFn::HalfAdder, "HA")?;
    let fa = find_cell(lib, LogicFn::FullAdder, "FA")?;

    let pp = |j: usize, i: usize| -> String {
        match (j, i) {
            (0, 0) => "p0".into(),
            _ => format!("pp{j}{i}"),
        }
    };
    let mut gates = Vec::new();
    for j in 0..4 {
        for i in 0..4 {
            let a = format!("a{i}");
            let b = format!("b{j}");
            gates.push(GateInstance::new(&format!("pp{j}{i}"), &and2, &[&a, &b], &[&pp(j, i)]));
        }
    }

    // sum[i] of the previous row, position i = 1..=3 feed the next row;
    // prev_carry is the carry-out of the previous row's top position.
    let mut prev_sum: Vec<String> = (1..4).map(|i| pp(0, i)).collect();
    let mut prev_carry: Option<String> = None;
    for j in 1..4 {
        let mut carry: Option<String> = None;
        let mut sums = Vec::new();
        for i in 0..4 {
            let id = format!("add{j}_{i}");
            let sum = if i == 0 { format!("p{j}") } else { format!("s{j}_{i}") };
            let cout = if j == 3 && i == 3 { "p7".into() } else { format!("c{j}_{i}") };
            let partial = pp(j, i);
            // the top position adds the previous row's carry-out (row 1 has
            // no previous carry and uses partial product a3b0 instead)
            let upper = if i < 3 { prev_sum[i].clone() } else { prev_carry.clone().unwrap_or_default() };
            let mut ins: Vec<String> = Vec::new();
            ins.push(partial);
            if !upper.is_empty() {
                ins.push(upper);
            }
            if let Some(c) = carry.take() {
                ins.push(c);
            }
            let cell = if ins.len() == 3 { &fa } else { &ha };
            let ins_ref: Vec<&str> = ins.iter().map(String::as_str).collect();
            gates.push(GateInstance::new(&id, cell, &ins_ref, &[&sum, &cout]));
            sums.push(sum);
            carry = Some(cout);
        }
        prev_sum = sums[1..].to_vec();
        prev_carry = carry;
    }
    // the last row's sums are the product bits p4..p6
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for (i, s) in prev_sum.iter().enumerate() {
        rename.insert(s.clone(), format!("p{}", i + 4));
    }
    for g in &mut gates {
        for n in g.outputs.iter_mut().chain(g.inputs.iter_mut()) {
            if let Some(r) = rename.get(n) {
                *n = r.clone();
            }
        }
    }

    let inputs = (0..4).map(|i| format!("a{i}")).chain((0..4).map(|j| format!("b{j}"))).collect();
    let outputs = (0..8).map(|k| format!("p{k}")).collect();
    let c = Circuit::new(lib.clone(), gates, inputs, outputs)?;
    let rows = assign_rows(&c, 7)?;
    Ok(c.with_rows(&rows))
}

/// Input assignment for operands `a` and `b` (low four bits each).
pub fn multiplier_inputs(a: u8, b: u8) -> BTreeMap<String, bool> {
    let mut m = BTreeMap::new();
    for i in 0..4 {
        m.insert(format!("a{i}"), (a >> i) & 1 == 1);
        m.insert(format!("b{i}"), (b >> i) & 1 == 1);
    }
    m
}

/// Packs output bits `p0..p7` (least significant first) into an integer.
pub fn multiplier_product(bits: &[bool]) -> u16 {
    bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | (u16::from(b) << k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::default_library;
    use crate::netlist::evaluate;

    #[test]
    fn structure() {
        let c = generate_multiplier4x4(&default_library()).unwrap();
        let count = |f: LogicFn| (0..c.len()).filter(|&g| c.cell_of(g).logic == f).count();
        assert_eq!(count(LogicFn::And2), 16);
        assert_eq!(count(LogicFn::FullAdder), 8);
        assert_eq!(count(LogicFn::HalfAdder), 4);
        assert_eq!(c.len(), 28);
        assert_eq!(c.primary_outputs().len(), 8);
        assert!(c.gates().iter().all(|g| g.row.is_some()));
    }

    #[test]
    fn annihilator_and_max() {
        let c = generate_multiplier4x4(&default_library()).unwrap();
        for b in 0..16 {
            let out = evaluate(&c, &multiplier_inputs(0, b)).unwrap();
            assert_eq!(multiplier_product(&out), 0);
        }
        let out = evaluate(&c, &multiplier_inputs(15, 15)).unwrap();
        assert_eq!(multiplier_product(&out), 225);
    }

    #[test]
    fn exhaustive_products() {
        let c = generate_multiplier4x4(&default_library()).unwrap();
        for a in 0..16u8 {
            for b in 0..16u8 {
                let out = evaluate(&c, &multiplier_inputs(a, b)).unwrap();
                assert_eq!(multiplier_product(&out), u16::from(a) * u16::from(b), "{a}*{b}");
            }
        }
    }

    #[test]
    fn missing_cells() {
        let mut lib = default_library();
        lib.retain(|_, c| c.logic != LogicFn::FullAdder);
        assert_eq!(generate_multiplier4x4(&lib).unwrap_err(), Error::MissingCell("FA"));
    }
}
