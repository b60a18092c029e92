//! Protograph EXIT analysis over SIMO Rayleigh fading.
//!
//! The per-edge mutual-information recursion of protograph EXIT charts is
//! modified for fading by drawing Q blocks of channel factors
//! `alpha[q][j]` and averaging the variable-node and a-posteriori updates
//! over the blocks; the check-node update does not see the channel and is
//! computed once per iteration. The decoding threshold is the smallest
//! Eb/N0 on a 0.001 dB grid at which every a-posteriori MI saturates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::BaseMatrix;
use crate::error::{Error, Result};
use crate::jfunc::{j_inv_exact, j_inv_unchecked, JTable, MI_CLAMP};

/// Scan grid resolution in dB.
pub const GRID_DB: f64 = 0.001;

/// A-posteriori MI must reach 1 - CONVERGENCE_EPS at every variable node.
pub const CONVERGENCE_EPS: f64 = 1e-5;

/// Iterations are cut short once the per-iteration MI gain drops below
/// this; the recursion is monotone, so no later recovery is possible at
/// any resolution we care about.
const STALL_EPS: f64 = 1e-10;

/// Q x N matrix of channel factors, row-major by block.
pub struct ChannelFactorMatrix {
    q: usize,
    n: usize,
    data: Vec<f64>,
}

impl ChannelFactorMatrix {
    /// Draw Q blocks of channel factors for N variable nodes, each entry
    /// the squared norm of an N_R-antenna Rayleigh fading vector.
    pub fn generate(n_r: usize, q: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..q * n)
            .map(|_| {
                (0..2 * n_r)
                    .map(|_| {
                        let g: f64 = rng.sample(StandardNormal);
                        0.5 * g * g
                    })
                    .sum()
            })
            .collect();
        ChannelFactorMatrix { q, n, data }
    }

    /// All factors pinned to a constant; with value 1 and N_R = 1 the
    /// recursion degenerates to the unfaded EXIT analysis.
    pub fn constant(value: f64, n: usize) -> Self {
        ChannelFactorMatrix { q: 1, n, data: vec![value; n] }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean_and_variance(&self) -> (f64, f64) {
        let len = self.data.len() as f64;
        let mean = self.data.iter().sum::<f64>() / len;
        let var = self.data.iter().map(|&a| (a - mean) * (a - mean)).sum::<f64>() / len;
        (mean, var)
    }
}

/// Variance of the initial LLR seen by variable node j in block q:
/// sigma_ch^2 = 8 R P_j alpha / N_R * 10^(EbN0/10). Punctured nodes get 0.
pub fn sigma_ch_sq(alpha: f64, punctured_label: u32, rate: f64, n_r: usize, eb_n0_db: f64) -> f64 {
    8.0 * rate * punctured_label as f64 * alpha / n_r as f64 * 10f64.powf(eb_n0_db / 10.0)
}

/// Per-edge mutual-information state of the recursion. All arrays are
/// M x N row-major; entries where the base matrix is zero stay 0.
#[derive(Debug, Clone)]
pub struct MutualInfoState {
    pub m: usize,
    pub n: usize,
    pub i_av: Vec<f64>,
    pub i_ac: Vec<f64>,
    pub i_ec: Vec<f64>,
    pub e_i_app: Vec<f64>,
}

impl MutualInfoState {
    pub fn new(m: usize, n: usize) -> Self {
        MutualInfoState {
            m,
            n,
            i_av: vec![0.0; m * n],
            i_ac: vec![0.0; m * n],
            i_ec: vec![0.0; m * n],
            e_i_app: vec![0.0; n],
        }
    }

    pub fn min_app(&self) -> f64 {
        self.e_i_app.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn assert_domain(&self) {
        debug_assert!(self
            .i_av
            .iter()
            .chain(&self.i_ac)
            .chain(&self.i_ec)
            .chain(&self.e_i_app)
            .all(|v| (0.0..=1.0).contains(v)));
    }
}

/// Fixed per-search context: code, channel factors, and J lookup.
pub struct PexitContext<'a> {
    base: &'a BaseMatrix,
    alphas: &'a ChannelFactorMatrix,
    jtable: &'a JTable,
    j_inv: fn(f64) -> f64,
    nonzero: Vec<(usize, usize)>,
    n_r: usize,
    rate: f64,
}

impl<'a> PexitContext<'a> {
    pub fn new(
        base: &'a BaseMatrix,
        alphas: &'a ChannelFactorMatrix,
        jtable: &'a JTable,
        n_r: usize,
    ) -> Result<Self> {
        if alphas.n() != base.cols() {
            return Err(Error::Dimension(format!(
                "alpha matrix has {} columns for a base with {}",
                alphas.n(),
                base.cols()
            )));
        }
        let mut nonzero = Vec::new();
        for i in 0..base.rows() {
            for j in 0..base.cols() {
                if base.entry(i, j) != 0 {
                    nonzero.push((i, j));
                }
            }
        }
        Ok(PexitContext {
            base,
            alphas,
            jtable,
            j_inv: j_inv_unchecked,
            nonzero,
            n_r,
            rate: base.design_rate(),
        })
    }

    /// Replace the published two-branch inverse fit with the exact
    /// (quadrature-bisected) inverse.
    pub fn with_exact_inverse(mut self) -> Self {
        self.j_inv = j_inv_exact;
        self
    }

    fn scales(&self, eb_n0_db: f64) -> Vec<f64> {
        (0..self.base.cols())
            .map(|j| sigma_ch_sq(1.0, self.base.punctured_label(j), self.rate, self.n_r, eb_n0_db))
            .collect()
    }

    /// E_q[ J(sqrt(c + scale_col * alpha_q,col)) ] for each requested term,
    /// reduced in deterministic chunk order regardless of thread count.
    fn averaged_j(&self, scales: &[f64], terms: &[(usize, f64)]) -> Vec<f64> {
        let n = self.alphas.n();
        let q = self.alphas.q();
        let chunk_rows = 8192usize;
        let partials: Vec<Vec<f64>> = self
            .alphas
            .data
            .par_chunks(chunk_rows * n)
            .map(|block| {
                let mut acc = vec![0.0; terms.len()];
                for row in block.chunks_exact(n) {
                    for (slot, &(col, c)) in acc.iter_mut().zip(terms) {
                        let arg = c + scales[col] * row[col];
                        *slot += self.jtable.eval(arg.sqrt());
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![0.0; terms.len()];
        for part in partials {
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        for o in out.iter_mut() {
            *o /= q as f64;
        }
        out
    }

    /// One full sweep of the recursion at the given Eb/N0:
    /// variable-to-check MI per block averaged into I_Ac, check-to-variable
    /// once, I_Av <- I_Ec, then the block-averaged a-posteriori MI.
    pub fn iteration(&self, state: &mut MutualInfoState, eb_n0_db: f64) {
        let (m, n) = (state.m, state.n);
        let b = self.base;
        let scales = self.scales(eb_n0_db);

        // variable-node side constants: T_j - x_ij^2
        let x2: Vec<f64> = state.i_av.iter().map(|&v| sq((self.j_inv)(v.min(MI_CLAMP)))).collect();
        let mut tj = vec![0.0; n];
        for &(i, j) in &self.nonzero {
            tj[j] += b.entry(i, j) as f64 * x2[i * n + j];
        }
        let terms: Vec<(usize, f64)> =
            self.nonzero.iter().map(|&(i, j)| (j, (tj[j] - x2[i * n + j]).max(0.0))).collect();
        let avg = self.averaged_j(&scales, &terms);
        for v in state.i_ac.iter_mut() {
            *v = 0.0;
        }
        for (&(i, j), &val) in self.nonzero.iter().zip(&avg) {
            state.i_ac[i * n + j] = val.clamp(0.0, 1.0);
        }

        // check-node update, channel-independent
        let y2: Vec<f64> =
            state.i_ac.iter().map(|&v| sq((self.j_inv)((1.0 - v).min(MI_CLAMP)))).collect();
        let mut ti = vec![0.0; m];
        for &(i, j) in &self.nonzero {
            ti[i] += b.entry(i, j) as f64 * y2[i * n + j];
        }
        for v in state.i_ec.iter_mut() {
            *v = 0.0;
        }
        for &(i, j) in &self.nonzero {
            let arg = (ti[i] - y2[i * n + j]).max(0.0);
            state.i_ec[i * n + j] = (1.0 - self.jtable.eval(arg.sqrt())).clamp(0.0, 1.0);
        }
        state.i_av.copy_from_slice(&state.i_ec);

        // a-posteriori MI from the refreshed I_Av
        let x2: Vec<f64> = state.i_av.iter().map(|&v| sq((self.j_inv)(v.min(MI_CLAMP)))).collect();
        let mut tj = vec![0.0; n];
        for &(i, j) in &self.nonzero {
            tj[j] += b.entry(i, j) as f64 * x2[i * n + j];
        }
        let app_terms: Vec<(usize, f64)> = (0..n).map(|j| (j, tj[j])).collect();
        let app = self.averaged_j(&scales, &app_terms);
        for (slot, val) in state.e_i_app.iter_mut().zip(app) {
            *slot = val.clamp(0.0, 1.0);
        }
        state.assert_domain();
    }

    /// Run the recursion at one Eb/N0. Returns convergence plus the
    /// iteration count used.
    pub fn evaluate(&self, eb_n0_db: f64, t_max: usize) -> (bool, usize) {
        let mut state = MutualInfoState::new(self.base.rows(), self.base.cols());
        let mut prev_min = -1.0;
        for t in 1..=t_max {
            self.iteration(&mut state, eb_n0_db);
            let min_app = state.min_app();
            if min_app >= 1.0 - CONVERGENCE_EPS {
                return (true, t);
            }
            if min_app - prev_min < STALL_EPS && t >= 8 {
                return (false, t);
            }
            prev_min = min_app;
        }
        (false, t_max)
    }
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

/// Outcome of a decoding-threshold search.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub eb_n0_db_threshold: f64,
    pub iterations_at_threshold: usize,
    pub converged: bool,
    pub q: usize,
    pub t_max: usize,
    pub seed: u64,
}

/// Find the smallest Eb/N0 on the 0.001 dB grid at which the recursion
/// drives every a-posteriori MI to saturation within `t_max` iterations.
///
/// One channel-factor matrix is drawn per search and reused for every
/// scanned Eb/N0; that keeps the converged/not-converged boundary monotone
/// so the 0.001 dB grid point can be located by bisection.
pub fn find_threshold(
    base: &BaseMatrix,
    n_r: usize,
    q: usize,
    t_max: usize,
    seed: u64,
    scan_db: (f64, f64),
) -> Result<ThresholdResult> {
    let alphas = ChannelFactorMatrix::generate(n_r, q, base.cols(), seed);
    let jtable = JTable::default();
    let ctx = PexitContext::new(base, &alphas, &jtable, n_r)?;
    let (mut lo, mut hi) = scan_db;
    if lo >= hi {
        return Err(Error::Domain(format!("empty scan range [{lo}, {hi}]")));
    }
    if !ctx.evaluate(hi, t_max).0 {
        return Err(Error::NoConvergence { lo_db: lo, hi_db: hi });
    }
    if ctx.evaluate(lo, t_max).0 {
        // threshold at or below the scan start; report the start of the grid
        let (_, iters) = ctx.evaluate(lo, t_max);
        return Ok(ThresholdResult {
            eb_n0_db_threshold: lo,
            iterations_at_threshold: iters,
            converged: true,
            q,
            t_max,
            seed,
        });
    }
    while hi - lo > GRID_DB {
        let mid = 0.5 * (lo + hi);
        if ctx.evaluate(mid, t_max).0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // snap up to the grid and confirm
    let mut candidate = (lo / GRID_DB).ceil() * GRID_DB;
    if candidate <= lo {
        candidate += GRID_DB;
    }
    loop {
        let (ok, iters) = ctx.evaluate(candidate, t_max);
        if ok {
            return Ok(ThresholdResult {
                eb_n0_db_threshold: candidate,
                iterations_at_threshold: iters,
                converged: true,
                q,
                t_max,
                seed,
            });
        }
        candidate += GRID_DB;
        if candidate > scan_db.1 {
            return Err(Error::NoConvergence { lo_db: scan_db.0, hi_db: scan_db.1 });
        }
    }
}
