use super::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Bit-packed GF(2) row.
#[derive(Clone)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zero(n: usize) -> Self {
        BitRow(vec![0; n.div_ceil(64)])
    }
    #[inline]
    fn get(&self, j: usize) -> bool {
        self.0[j / 64] >> (j % 64) & 1 == 1
    }
    #[inline]
    fn set(&mut self, j: usize) {
        self.0[j / 64] |= 1 << (j % 64);
    }
    fn xor_in(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// Systematic encoder obtained by GF(2) elimination on H. Information bits
/// occupy the non-pivot columns and are copied verbatim into the codeword;
/// every pivot (parity) bit is a fixed XOR of information bits.
pub struct Encoder {
    n: usize,
    k: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    /// One reduced row per parity bit, restricted to information columns.
    parity_rows: Vec<BitRow>,
    transmit_mask: Vec<bool>,
    rank_deficiency: usize,
}

impl Encoder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Columns of the codeword that carry the message verbatim.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn transmit_mask(&self) -> &[bool] {
        &self.transmit_mask
    }

    /// Rows of H that were linearly dependent; nonzero means k grew above
    /// the design dimension n - M.
    pub fn rank_deficiency(&self) -> usize {
        self.rank_deficiency
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::Dimension(format!(
                "message length {} != k = {}",
                message.len(),
                self.k
            )));
        }
        let mut cw = vec![0u8; self.n];
        let mut msg_bits = BitRow::zero(self.k);
        for (idx, &b) in message.iter().enumerate() {
            if b & 1 == 1 {
                msg_bits.set(idx);
                cw[self.info_positions[idx]] = 1;
            }
        }
        for (row, &pos) in self.parity_rows.iter().zip(&self.parity_positions) {
            let mut acc = 0u64;
            for (a, b) in row.0.iter().zip(&msg_bits.0) {
                acc ^= a & b;
            }
            cw[pos] = (acc.count_ones() & 1) as u8;
        }
        Ok(cw)
    }
}

/// Build a systematic encoder from H by Gaussian elimination over GF(2).
/// Dependent rows reduce the check count (and raise k); the caller can
/// inspect `rank_deficiency` to detect that.
pub fn systematic_encoder(h: &ParityCheckMatrix) -> Result<Encoder> {
    let n = h.n_cols();
    let m = h.n_rows();
    for j in 0..n {
        if h.col(j).is_empty() {
            return Err(Error::Construction(format!("zero column {j} in H")));
        }
    }
    let mut rows: Vec<BitRow> = (0..m)
        .map(|i| {
            let mut r = BitRow::zero(n);
            for &j in h.row(i) {
                r.set(j as usize);
            }
            r
        })
        .collect();

    // forward elimination with full back-substitution (RREF)
    let mut pivot_of_row: Vec<usize> = Vec::new();
    let mut is_pivot_col = vec![false; n];
    let mut rank = 0usize;
    for col in 0..n {
        let Some(src) = (rank..m).find(|&r| rows[r].get(col)) else { continue };
        rows.swap(rank, src);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_in(&pivot_row);
            }
        }
        is_pivot_col[col] = true;
        pivot_of_row.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }

    let k = n - rank;
    let info_positions: Vec<usize> = (0..n).filter(|&j| !is_pivot_col[j]).collect();
    let col_to_info: Vec<usize> = {
        let mut map = vec![usize::MAX; n];
        for (idx, &j) in info_positions.iter().enumerate() {
            map[j] = idx;
        }
        map
    };
    // x_pivot = sum of info bits present in the reduced row
    let parity_rows: Vec<BitRow> = (0..rank)
        .map(|r| {
            let mut pr = BitRow::zero(k);
            for &j in info_positions.iter() {
                if rows[r].get(j) {
                    pr.set(col_to_info[j]);
                }
            }
            pr
        })
        .collect();

    Ok(Encoder {
        n,
        k,
        info_positions,
        parity_positions: pivot_of_row,
        parity_rows,
        transmit_mask: h.transmit_mask().to_vec(),
        rank_deficiency: m - rank,
    })
}
