use serde::{Deserialize, Serialize};

use super::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Standard alist text serialization of a sparse binary matrix.
pub fn parity_check_to_alist(h: &ParityCheckMatrix) -> String {
    let n = h.n_cols();
    let m = h.n_rows();
    let max_col = (0..n).map(|j| h.col(j).len()).max().unwrap_or(0);
    let max_row = (0..m).map(|i| h.row(i).len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col} {max_row}\n"));
    let col_degs: Vec<String> = (0..n).map(|j| h.col(j).len().to_string()).collect();
    out.push_str(&col_degs.join(" "));
    out.push('\n');
    let row_degs: Vec<String> = (0..m).map(|i| h.row(i).len().to_string()).collect();
    out.push_str(&row_degs.join(" "));
    out.push('\n');
    for j in 0..n {
        let entries: Vec<String> = h.col(j).iter().map(|&i| (i + 1).to_string()).collect();
        out.push_str(&entries.join(" "));
        out.push('\n');
    }
    for i in 0..m {
        let entries: Vec<String> = h.row(i).iter().map(|&j| (j + 1).to_string()).collect();
        out.push_str(&entries.join(" "));
        out.push('\n');
    }
    out
}

/// JSON schema for a lifted parity-check matrix: dimensions, lifting factor,
/// explicit (row, col) entries, and the punctured-label mask (1 = transmitted).
#[derive(Serialize, Deserialize)]
pub struct ParityCheckJson {
    pub m: usize,
    pub n: usize,
    pub z: usize,
    pub entries: Vec<(u32, u32)>,
    pub punctured: Vec<u8>,
}

pub fn parity_check_to_json(h: &ParityCheckMatrix) -> ParityCheckJson {
    let mut entries = Vec::with_capacity(h.n_edges());
    for i in 0..h.n_rows() {
        for &j in h.row(i) {
            entries.push((i as u32, j));
        }
    }
    ParityCheckJson {
        m: h.n_rows(),
        n: h.n_cols(),
        z: h.lifting_factor(),
        entries,
        punctured: h.transmit_mask().iter().map(|&t| t as u8).collect(),
    }
}

pub fn parity_check_from_json(doc: &ParityCheckJson) -> Result<ParityCheckMatrix> {
    let mut rows = vec![Vec::new(); doc.m];
    for &(i, j) in &doc.entries {
        if i as usize >= doc.m || j as usize >= doc.n {
            return Err(Error::Construction(format!("entry ({i},{j}) out of bounds")));
        }
        rows[i as usize].push(j);
    }
    let transmit = doc.punctured.iter().map(|&p| p != 0).collect();
    let z = doc.z.max(1);
    let col_proto: Vec<u32> = (0..doc.n).map(|j| (j / z) as u32).collect();
    ParityCheckMatrix::from_adjacency(doc.m, doc.n, rows, transmit, col_proto, z)
}
