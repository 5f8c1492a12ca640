use alloc::collections::BTreeMap;
use alloc::string::String;

use super::Circuit;
use crate::error::{Error, Result};

/// Partition of the gates into placement rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowAssignment {
    pub n_rows: usize,
    pub mapping: BTreeMap<String, usize>,
}

impl RowAssignment {
    /// Gate indices of one row, in id order.
    pub fn members(&self, c: &Circuit, row: usize) -> alloc::vec::Vec<usize> {
        (0..c.len()).filter(|&g| self.mapping.get(&c.gates()[g].id) == Some(&row)).collect()
    }

    /// Reads the row tags already present on the circuit.
    pub fn from_tags(c: &Circuit) -> Option<RowAssignment> {
        let mut mapping = BTreeMap::new();
        let mut n_rows = 0;
        for g in c.gates() {
            let r = g.row?;
            n_rows = n_rows.max(r + 1);
            mapping.insert(g.id.clone(), r);
        }
        Some(RowAssignment { n_rows, mapping })
    }
}

/// Splits the topological order (level, then id) into `n_rows` contiguous
/// buckets whose sizes differ by at most one, larger buckets first.
pub fn assign_rows(c: &Circuit, n_rows: usize) -> Result<RowAssignment> {
    if n_rows == 0 {
        return Err(Error::InvalidParam {
            name: "n_rows",
            reason: "must be at least 1".into(),
        });
    }
    let n = c.len();
    let base = n / n_rows;
    let extra = n % n_rows;
    let mut mapping = BTreeMap::new();
    let mut pos = 0;
    for row in 0..n_rows {
        let size = base + usize::from(row < extra);
        for &g in &c.topo_order()[pos..pos + size] {
            mapping.insert(c.gates()[g].id.clone(), row);
        }
        pos += size;
    }
    Ok(RowAssignment { n_rows, mapping })
}
