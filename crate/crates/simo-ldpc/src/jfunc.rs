//! Mutual-information transfer functions for EXIT-style analysis.
//!
//! `j_func` maps the standard deviation of a consistent Gaussian LLR,
//! `L ~ N(sigma^2/2, sigma^2)`, to the mutual information between the LLR
//! and the underlying bit. It has no closed form and is evaluated by
//! adaptive Simpson quadrature. `j_inv` is the usual piecewise polynomial
//! / logarithmic approximation of the inverse.

use crate::error::Error;

/// Constants of the piecewise inverse approximation.
const GAMMA: [f64; 6] = [1.09542, 0.214217, 2.33737, -0.706692, 0.386013, 1.75017];

/// Breakpoint between the two branches of `j_inv`.
const J_INV_SPLIT: f64 = 0.3646;

/// Inputs to `j_inv` are clamped below 1 by this margin in the hot paths.
pub const MI_CLAMP: f64 = 1.0 - 1e-12;

fn integrand(xi: f64, mu: f64, var: f64) -> f64 {
    let pdf = (-(xi - mu) * (xi - mu) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
    // log2(1 + e^-xi), written via ln_1p for large |xi| stability
    let t = if xi > 700.0 { 0.0 } else { (-xi).exp().ln_1p() / std::f64::consts::LN_2 };
    pdf * t
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32, mu: f64, var: f64) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = integrand(lm, mu, var);
    let frm = integrand(rm, mu, var);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(a, m, fa, flm, fm, left, tol / 2.0, depth - 1, mu, var)
            + adaptive(m, b, fm, frm, fb, right, tol / 2.0, depth - 1, mu, var)
    }
}

/// Mutual information of a consistent Gaussian LLR with standard deviation
/// `sigma`, via adaptive quadrature (absolute error below 1e-8).
pub fn j_func(sigma: f64) -> Result<f64, Error> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::Domain(format!("j_func: sigma must be finite and >= 0, got {sigma}")));
    }
    Ok(j_func_unchecked(sigma))
}

pub(crate) fn j_func_unchecked(sigma: f64) -> f64 {
    if sigma < 1e-9 {
        return 0.0;
    }
    // Beyond this the complement is under 1e-13 and drowns in quadrature error.
    if sigma > 18.0 {
        return 1.0;
    }
    let var = sigma * sigma;
    let mu = var / 2.0;
    // pdf(xi) * log2(1 + e^-xi) has mass near +mu and, scaled by the
    // consistency factor, near -mu; cover both or large-sigma values lose
    // their tail and monotonicity
    let a = -mu - 12.0 * sigma;
    let b = mu + 12.0 * sigma;
    let panels = 16usize;
    let width = (b - a) / panels as f64;
    let mut integral = 0.0;
    for p in 0..panels {
        let pa = a + p as f64 * width;
        let pb = pa + width;
        let pm = 0.5 * (pa + pb);
        let fa = integrand(pa, mu, var);
        let fm = integrand(pm, mu, var);
        let fb = integrand(pb, mu, var);
        let whole = simpson(pa, pb, fa, fm, fb);
        integral += adaptive(pa, pb, fa, fm, fb, whole, 1e-10, 48, mu, var);
    }
    (1.0 - integral).clamp(0.0, 1.0)
}

/// Inverse of `j_func`. Defined on [0, 1); saturated MI must be clamped by
/// the caller before entering here.
pub fn j_inv(mi: f64) -> Result<f64, Error> {
    if !(0.0..1.0).contains(&mi) {
        return Err(Error::Domain(format!("j_inv: MI must lie in [0, 1), got {mi}")));
    }
    Ok(j_inv_unchecked(mi))
}

pub(crate) fn j_inv_unchecked(mi: f64) -> f64 {
    let x = mi.clamp(0.0, MI_CLAMP);
    let s = if x <= J_INV_SPLIT {
        GAMMA[0] * x * x + GAMMA[1] * x + GAMMA[2] * x.sqrt()
    } else {
        GAMMA[3] * (GAMMA[4] * (1.0 - x)).ln() + GAMMA[5] * x
    };
    s.max(0.0)
}

/// Piecewise polynomial/exponential fit of J from ten Brink, Kramer and
/// Ashikhmin (the reference the paper takes its J-function pair from),
/// saturating exactly at 1 for sigma >= 10. The hard saturation makes the
/// PEXIT convergence target reachable the way the paper's thresholds
/// require; the exact quadrature `j_func` only approaches 1 asymptotically.
pub fn j_ten_brink(sigma: f64) -> f64 {
    const SIGMA_STAR: f64 = 1.6363;
    const A1: f64 = -0.0421061;
    const B1: f64 = 0.209252;
    const C1: f64 = -0.00640081;
    const A2: f64 = 0.00181491;
    const B2: f64 = -0.142675;
    const C2: f64 = -0.0822054;
    const D2: f64 = 0.0549608;
    if sigma <= 0.0 {
        0.0
    } else if sigma <= SIGMA_STAR {
        (A1 * sigma * sigma * sigma + B1 * sigma * sigma + C1 * sigma).clamp(0.0, 1.0)
    } else if sigma < 10.0 {
        1.0 - (A2 * sigma * sigma * sigma + B2 * sigma * sigma + C2 * sigma + D2).exp()
    } else {
        1.0
    }
}

/// Exact inverse of `j_func`, by bisection against the quadrature. The
/// published two-branch polynomial/log fit (`j_inv`) is discontinuous at its
/// split point (it jumps down by ~4e-3 in sigma), which breaks the
/// monotonicity of the PEXIT recursion and distorts near-threshold fixed
/// points; the analysis path uses this inverse instead.
pub fn j_inv_exact(mi: f64) -> f64 {
    let target = mi.clamp(0.0, MI_CLAMP);
    if target <= 0.0 {
        return 0.0;
    }
    static TABLE: std::sync::OnceLock<JTable> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(JTable::default);
    // Bracket on the table first (monotone values), then refine on the
    // quadrature; table nodes are only ~1e-3 sigma apart so few exact
    // evaluations are needed.
    let hi_idx = table.values.partition_point(|&v| v < target);
    let (mut lo, mut hi) = if hi_idx >= table.values.len() {
        (table.max_sigma, 40.0)
    } else {
        let step = 1.0 / table.step_inv;
        ((hi_idx.saturating_sub(1)) as f64 * step, hi_idx as f64 * step)
    };
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if j_func_unchecked(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Precomputed monotone linear-interpolation table for `j_func`, used in the
/// PEXIT inner loops. Absolute error stays below 1e-6 on the covered range.
pub struct JTable {
    step_inv: f64,
    max_sigma: f64,
    values: Vec<f64>,
}

impl JTable {
    pub const DEFAULT_NODES: usize = 1 << 14;

    pub fn new(nodes: usize) -> Self {
        let max_sigma = 18.0;
        let step = max_sigma / nodes as f64;
        let values: Vec<f64> = (0..=nodes).map(|i| j_func_unchecked(i as f64 * step)).collect();
        JTable { step_inv: 1.0 / step, max_sigma, values }
    }

    /// Table over the ten Brink fit instead of the quadrature; saturates
    /// exactly at sigma = 10 like the fit itself.
    pub fn ten_brink(nodes: usize) -> Self {
        let max_sigma = 10.0;
        let step = max_sigma / nodes as f64;
        let values: Vec<f64> = (0..=nodes).map(|i| j_ten_brink(i as f64 * step)).collect();
        JTable { step_inv: 1.0 / step, max_sigma, values }
    }

    #[inline]
    pub fn eval(&self, sigma: f64) -> f64 {
        if sigma >= self.max_sigma {
            return 1.0;
        }
        if sigma <= 0.0 {
            return 0.0;
        }
        let pos = sigma * self.step_inv;
        let idx = pos as usize;
        let frac = pos - idx as f64;
        self.values[idx] + frac * (self.values[idx + 1] - self.values[idx])
    }
}

impl Default for JTable {
    fn default() -> Self {
        JTable::new(Self::DEFAULT_NODES)
    }
}
