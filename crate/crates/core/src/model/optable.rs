//! Precomputed table of integer add/subtract operations.
//!
//! For every constant `C` in the value range there are two operations,
//! `O = C + I` and `O = C - I`. Each operation contributes one row per
//! input value `I` whose result `O` stays in range, so the table covers
//! every representable (operation, input, output) triple exactly once.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    AddConst,
    SubConst,
}

/// One table row: applying `op` to `input` yields `output`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpRow {
    /// Dense operation id, shared by all rows of the same operation.
    pub op_id: usize,
    pub kind: OpKind,
    pub constant: i64,
    pub input: i64,
    pub output: i64,
}

impl OpRow {
    pub fn apply(&self, input: i64) -> i64 {
        match self.kind {
            OpKind::AddConst => self.constant + input,
            OpKind::SubConst => self.constant - input,
        }
    }

    pub fn op_name(&self) -> String {
        match self.kind {
            OpKind::AddConst => format!("O={}+I", self.constant),
            OpKind::SubConst => format!("O={}-I", self.constant),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpTable {
    pub vmin: i64,
    pub vmax: i64,
    /// Distinct operations: `2 * (vmax - vmin + 1)`.
    pub n_ops: usize,
    pub rows: Vec<OpRow>,
}

/// Enumerate all rows for a value range: add ops first, then subtract ops,
/// constants ascending, inputs ascending within an operation.
pub fn build_op_table(vmin: i64, vmax: i64) -> OpTable {
    assert!(vmin <= vmax);
    let mut rows = Vec::new();
    let mut op_id = 0usize;
    for kind in [OpKind::AddConst, OpKind::SubConst] {
        for constant in vmin..=vmax {
            for input in vmin..=vmax {
                let row = OpRow { op_id, kind, constant, input, output: 0 };
                let output = row.apply(input);
                if output >= vmin && output <= vmax {
                    rows.push(OpRow { output, ..row });
                }
            }
            op_id += 1;
        }
    }
    OpTable { vmin, vmax, n_ops: op_id, rows }
}

impl OpTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// CSV dump: `op,constant,input,output`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("op,constant,input,output\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.op_name(), r.constant, r.input, r.output));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_range_has_122_rows() {
        let t = build_op_table(-4, 4);
        assert_eq!(t.len(), 122);
        assert_eq!(t.rows.iter().filter(|r| r.kind == OpKind::AddConst).count(), 61);
        assert_eq!(t.rows.iter().filter(|r| r.kind == OpKind::SubConst).count(), 61);
        assert_eq!(t.n_ops, 18);
    }

    #[test]
    fn the_two_plus_two_row_exists() {
        let t = build_op_table(-4, 4);
        assert!(t
            .rows
            .iter()
            .any(|r| r.kind == OpKind::AddConst && r.constant == 2 && r.input == 2 && r.output == 4));
    }

    #[test]
    fn every_row_satisfies_its_own_equation() {
        let t = build_op_table(-4, 4);
        for r in &t.rows {
            assert_eq!(r.apply(r.input), r.output);
            assert!(r.output >= -4 && r.output <= 4);
        }
    }

    #[test]
    fn rows_are_unique() {
        let t = build_op_table(-4, 4);
        for (i, a) in t.rows.iter().enumerate() {
            for b in &t.rows[i + 1..] {
                assert!(!(a.op_id == b.op_id && a.input == b.input));
            }
        }
    }

    #[test]
    fn degenerate_range_has_two_rows() {
        let t = build_op_table(0, 0);
        assert_eq!(t.len(), 2);
        assert_eq!(t.n_ops, 2);
        for r in &t.rows {
            assert_eq!((r.constant, r.input, r.output), (0, 0, 0));
        }
    }
}
