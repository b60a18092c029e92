//! Flooding sum-product decoder over a lifted parity-check matrix.

use serde::Serialize;

use crate::codes::ParityCheckMatrix;

/// Knobs for belief propagation.
#[derive(Debug, Clone, Serialize)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub llr_clip: f64,
    pub early_stop: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { max_iterations: 100, llr_clip: 38.0, early_stop: true }
    }
}

/// Outcome of one decoding attempt.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub hard_bits: Vec<u8>,
    pub iterations_used: usize,
    pub syndrome_ok: bool,
    pub posterior_llrs: Vec<f64>,
}

/// Sum-product decoder with a flat edge layout derived from the code.
pub struct Decoder {
    n_rows: usize,
    n_cols: usize,
    // edges grouped by check row; edge e connects row_of[e] to col_of[e]
    row_start: Vec<usize>,
    col_of: Vec<u32>,
    // the same edges grouped by column, as indices into the row-major layout
    col_start: Vec<usize>,
    col_edges: Vec<u32>,
}

impl Decoder {
    pub fn new(code: &ParityCheckMatrix) -> Self {
        let n_rows = code.n_rows();
        let n_cols = code.n_cols();
        let mut row_start = Vec::with_capacity(n_rows + 1);
        let mut col_of = Vec::new();
        row_start.push(0);
        for r in 0..n_rows {
            col_of.extend_from_slice(code.row(r));
            row_start.push(col_of.len());
        }
        let mut col_start = vec![0usize; n_cols + 1];
        for &c in &col_of {
            col_start[c as usize + 1] += 1;
        }
        for i in 0..n_cols {
            col_start[i + 1] += col_start[i];
        }
        let mut cursor = col_start.clone();
        let mut col_edges = vec![0u32; col_of.len()];
        for (e, &c) in col_of.iter().enumerate() {
            col_edges[cursor[c as usize]] = e as u32;
            cursor[c as usize] += 1;
        }
        Decoder { n_rows, n_cols, row_start, col_of, col_start, col_edges }
    }

    pub fn n(&self) -> usize {
        self.n_cols
    }

    /// Decode from per-bit channel LLRs (positive favours bit 0).
    /// Punctured positions must be fed 0.
    pub fn decode(&self, channel_llrs: &[f64], config: &DecoderConfig) -> DecodeResult {
        assert_eq!(channel_llrs.len(), self.n_cols);
        let n_edges = self.col_of.len();
        let clip = config.llr_clip;
        let mut v2c = vec![0.0f64; n_edges];
        let mut c2v = vec![0.0f64; n_edges];
        let mut posterior: Vec<f64> = channel_llrs.to_vec();
        let mut hard: Vec<u8> = posterior.iter().map(|&l| (l < 0.0) as u8).collect();
        // initial variable-to-check messages are the channel LLRs
        for (e, &c) in self.col_of.iter().enumerate() {
            v2c[e] = channel_llrs[c as usize].clamp(-clip, clip);
        }
        let mut scratch = Vec::new();
        let mut iterations_used = 0;
        let mut syndrome_ok = self.syndrome_ok(&hard);
        if !(config.early_stop && syndrome_ok) {
            for iter in 1..=config.max_iterations {
                iterations_used = iter;
                // check update: per-row extrinsic tanh products via
                // forward/backward prefix scans
                for r in 0..self.n_rows {
                    let span = self.row_start[r]..self.row_start[r + 1];
                    let deg = span.len();
                    scratch.clear();
                    scratch.extend(span.clone().map(|e| (0.5 * v2c[e]).tanh()));
                    let mut back = vec![1.0f64; deg];
                    for k in (0..deg - 1).rev() {
                        back[k] = back[k + 1] * scratch[k + 1];
                    }
                    let mut fwd = 1.0f64;
                    for (k, e) in span.enumerate() {
                        let prod = (fwd * back[k]).clamp(-0.999_999_999_999, 0.999_999_999_999);
                        c2v[e] = (2.0 * prod.atanh()).clamp(-clip, clip);
                        fwd *= scratch[k];
                    }
                }
                // variable update and posterior
                for c in 0..self.n_cols {
                    let span = self.col_start[c]..self.col_start[c + 1];
                    let total: f64 =
                        channel_llrs[c] + span.clone().map(|k| c2v[self.col_edges[k] as usize]).sum::<f64>();
                    posterior[c] = total;
                    hard[c] = (total < 0.0) as u8;
                    for k in span {
                        let e = self.col_edges[k] as usize;
                        v2c[e] = (total - c2v[e]).clamp(-clip, clip);
                    }
                }
                if config.early_stop {
                    syndrome_ok = self.syndrome_ok(&hard);
                    if syndrome_ok {
                        break;
                    }
                }
            }
            if !config.early_stop {
                syndrome_ok = self.syndrome_ok(&hard);
            }
        }
        DecodeResult { hard_bits: hard, iterations_used, syndrome_ok, posterior_llrs: posterior }
    }

    fn syndrome_ok(&self, bits: &[u8]) -> bool {
        (0..self.n_rows).all(|r| {
            let mut parity = 0u8;
            for e in self.row_start[r]..self.row_start[r + 1] {
                parity ^= bits[self.col_of[e] as usize];
            }
            parity == 0
        })
    }
}
