use crate::error::{Error, Result};

/// Integer base matrix of a protograph ensemble, with per-node puncturing
/// labels. `punctured_label(j) == 0` means variable node `j` is never
/// transmitted; its bits still exist in the lifted code and in decoding.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMatrix {
    entries: Vec<Vec<u32>>,
    /// P_j labels: `true` = transmitted, `false` = punctured.
    transmit: Vec<bool>,
}

impl BaseMatrix {
    pub fn new(entries: Vec<Vec<u32>>, transmit: Vec<bool>) -> Result<Self> {
        let m = entries.len();
        if m == 0 {
            return Err(Error::Construction("base matrix has no rows".into()));
        }
        let n = entries[0].len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Construction("ragged base matrix".into()));
        }
        if transmit.len() != n {
            return Err(Error::Dimension(format!(
                "puncturing mask length {} != {} columns",
                transmit.len(),
                n
            )));
        }
        if !transmit.iter().any(|&t| t) {
            return Err(Error::Construction("all variable nodes punctured".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.iter().all(|&b| b == 0) {
                return Err(Error::Construction(format!("base row {i} is empty")));
            }
        }
        for j in 0..n {
            if entries.iter().all(|r| r[j] == 0) {
                return Err(Error::Construction(format!("base column {j} is empty")));
            }
        }
        Ok(BaseMatrix { entries, transmit })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    pub fn is_transmitted(&self, j: usize) -> bool {
        self.transmit[j]
    }

    /// P_j: 1 for a transmitted node, 0 for a punctured one.
    pub fn punctured_label(&self, j: usize) -> u32 {
        self.transmit[j] as u32
    }

    pub fn transmit_mask(&self) -> &[bool] {
        &self.transmit
    }

    pub fn n_transmitted(&self) -> usize {
        self.transmit.iter().filter(|&&t| t).count()
    }

    /// Information bits per transmitted bit: (N - M) / #transmitted.
    pub fn design_rate(&self) -> f64 {
        (self.cols() - self.rows()) as f64 / self.n_transmitted() as f64
    }

    pub fn row_sum(&self, i: usize) -> u32 {
        self.entries[i].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u32 {
        self.entries.iter().map(|r| r[j]).sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// AR3A family base matrix; rate (n+1)/(n+2), second variable node punctured.
pub fn ar3a_base(n: usize) -> BaseMatrix {
    let mut r0 = vec![1, 2, 1, 0, 0];
    let mut r1 = vec![0, 2, 1, 1, 1];
    let mut r2 = vec![0, 1, 2, 1, 1];
    for _ in 0..n {
        r0.extend([0, 0]);
        r1.extend([2, 1]);
        r2.extend([1, 2]);
    }
    let mut transmit = vec![true; 5 + 2 * n];
    transmit[1] = false;
    BaseMatrix::new(vec![r0, r1, r2], transmit).expect("AR3A base is well formed")
}

/// AR4JA family base matrix; rate (n+1)/(n+2), second variable node punctured.
pub fn ar4ja_base(n: usize) -> BaseMatrix {
    let mut r0 = vec![1, 2, 0, 0, 0];
    let mut r1 = vec![0, 3, 1, 1, 1];
    let mut r2 = vec![0, 1, 2, 2, 1];
    for _ in 0..n {
        r0.extend([0, 0]);
        r1.extend([3, 1]);
        r2.extend([1, 3]);
    }
    let mut transmit = vec![true; 5 + 2 * n];
    transmit[1] = false;
    BaseMatrix::new(vec![r0, r1, r2], transmit).expect("AR4JA base is well formed")
}

///// A fixed (3,6)-regular rate-1/2 protograph with no puncturing:
/// column sums 3, row sums 6.
pub fn regular_base() -> BaseMatrix {
    BaseMatrix::new(vec![vec![2, 1, 1, 2], vec![1, 2, 2, 1]], vec![true; 4])
        .expect("regular base is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar3a_n0_matches_reference() {
        let b = ar3a_base(0);
        assert_eq!(b.entries(), &[vec![1, 2, 1, 0, 0], vec![0, 2, 1, 1, 1], vec![0, 1, 2, 1, 1]]);
        assert_eq!(b.transmit_mask(), &[true, false, true, true, true]);
        assert_eq!(b.design_rate(), 0.5);
    }

    #[test]
    fn ar3a_n1_appends_pair_columns() {
        let b = ar3a_base(1);
        assert_eq!(b.rows(), 3);
        assert_eq!(b.cols(), 7);
        assert_eq!(b.entries()[0][5..], [0, 0]);
        assert_eq!(b.entries()[1][5..], [2, 1]);
        assert_eq!(b.entries()[2][5..], [1, 2]);
        assert!((b.design_rate() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ar4ja_n0_matches_reference() {
        let b = ar4ja_base(0);
        assert_eq!(b.entries(), &[vec![1, 2, 0, 0, 0], vec![0, 3, 1, 1, 1], vec![0, 1, 2, 2, 1]]);
        let sums: Vec<u32> = (0..5).map(|j| b.col_sum(j)).collect();
        assert_eq!(sums, [1, 6, 3, 3, 2]);
    }

    #[test]
    fn ar4ja_n2_rate() {
        let b = ar4ja_base(2);
        assert_eq!(b.cols(), 9);
        assert_eq!(b.design_rate(), 0.75);
    }

    #[test]
    fn family_rates_match_labels() {
        for n in 0..=6 {
            let want = (n as f64 + 1.0) / (n as f64 + 2.0);
            assert!((ar3a_base(n).design_rate() - want).abs() < 1e-15);
            assert!((ar4ja_base(n).design_rate() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn regular_is_3_6() {
        let b = regular_base();
        assert!((0..4).all(|j| b.col_sum(j) == 3));
        assert!((0..2).all(|i| b.row_sum(i) == 6));
        assert!(b.transmit_mask().iter().all(|&t| t));
        assert_eq!(b.design_rate(), 0.5);
    }

    #[test]
    fn rejects_empty_row() {
        assert!(BaseMatrix::new(vec![vec![0, 0], vec![1, 1]], vec![true, true]).is_err());
    }

    #[test]
    fn rejects_all_punctured() {
        assert!(BaseMatrix::new(vec![vec![1, 1]], vec![false, false]).is_err());
    }
}
