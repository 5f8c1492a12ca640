use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::Circuit;
use crate::error::{Error, Result};

/// Evaluates the circuit for one input vector. Returns the primary output
/// values in declaration order.
pub fn evaluate(c: &Circuit, assignment: &BTreeMap<String, bool>) -> Result<Vec<bool>> {
    let mut values: BTreeMap<&str, bool> = BTreeMap::new();
    for pi in c.primary_inputs() {
        let v = assignment.get(pi).ok_or_else(|| Error::InvalidParam {
            name: "assignment",
            reason: alloc::format!("missing value for primary input `{pi}`"),
        })?;
        values.insert(pi, *v);
    }
    let mut ins = Vec::with_capacity(3);
    for &gi in c.topo_order() {
        let gate = &c.gates()[gi];
        ins.clear();
        ins.extend(gate.inputs.iter().map(|n| values[n.as_str()]));
        let out = c.cell_of(gi).logic.eval(&ins);
        for (net, v) in gate.outputs.iter().zip(out) {
            values.insert(net, v);
        }
    }
    Ok(c.primary_outputs().iter().map(|n| values[n.as_str()]).collect())
}
