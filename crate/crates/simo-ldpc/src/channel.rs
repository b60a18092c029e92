//! SIMO Rayleigh fading channel: fading generation, AWGN, MRC/EGC
//! combining, channel LLRs, Eb/N0 calibration, and ergodic capacity.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Antenna gains below this magnitude are dropped from the EGC sum instead
/// of dividing by them.
const EGC_EPS: f64 = 1e-30;

/// Operating point of the SIMO link. Symbol energy is normalized to 1, so
/// `sigma_n_sq = N_R / (2 R Eb/N0)` fixes the noise level.
///
/// `sigma_n_sq` is the per-dimension noise variance, which makes the real
/// channel LLR a consistent Gaussian N(2a/s^2, 4a/s^2) given the fading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub n_r: usize,
    pub rate: f64,
    pub eb_n0_db: f64,
    pub sigma_n_sq: f64,
}

impl ChannelParams {
    pub fn new(n_r: usize, rate: f64, eb_n0_db: f64) -> Result<Self> {
        if n_r < 1 {
            return Err(Error::Domain("N_R must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&rate) || rate == 0.0 {
            return Err(Error::Domain(format!("rate must lie in (0, 1), got {rate}")));
        }
        let sigma_n_sq = n_r as f64 / (2.0 * rate * 10f64.powf(eb_n0_db / 10.0));
        Ok(ChannelParams { n_r, rate, eb_n0_db, sigma_n_sq })
    }

    /// E_s/N_0 in linear scale (E_s = 1, Eb/N0 = (N_R/R) Es/N0).
    pub fn es_n0_linear(&self) -> f64 {
        self.rate / self.n_r as f64 * 10f64.powf(self.eb_n0_db / 10.0)
    }
}

/// One fading draw: the complex gain per receive antenna and the channel
/// factor `alpha = sum |h[k]|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub alpha: f64,
}

impl ChannelRealization {
    pub fn from_gains(h: Vec<Complex64>) -> Self {
        let alpha = h.iter().map(|g| g.norm_sqr()).sum();
        ChannelRealization { h, alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    Mrc,
    Egc,
}

impl std::fmt::Display for Combiner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Combiner::Mrc => write!(f, "mrc"),
            Combiner::Egc => write!(f, "egc"),
        }
    }
}

impl std::str::FromStr for Combiner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mrc" => Ok(Combiner::Mrc),
            "egc" => Ok(Combiner::Egc),
            other => Err(Error::Domain(format!("unknown combiner '{other}'"))),
        }
    }
}

/// Combiner output and the channel LLR it induces. Decoding consumes
/// `llr.re`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedObservation {
    pub y: Complex64,
    pub llr: Complex64,
    pub combiner: Combiner,
}

/// Draw one channel realization: i.i.d. complex gains with variance 1/2
/// per dimension, so E|h[k]|^2 = 1.
pub fn sample_fading<R: Rng + ?Sized>(n_r: usize, rng: &mut R) -> ChannelRealization {
    let h: Vec<Complex64> = (0..n_r)
        .map(|_| {
            let re: f64 = rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
            let im: f64 = rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
            Complex64::new(re, im)
        })
        .collect();
    ChannelRealization::from_gains(h)
}

/// Pass a BPSK symbol through the fading channel: r[k] = h[k] x + n[k],
/// with complex noise of the given per-dimension variance.
pub fn transmit<R: Rng + ?Sized>(
    x: f64,
    realization: &ChannelRealization,
    noise_var_per_dim: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    debug_assert!(x == 1.0 || x == -1.0);
    let sd = noise_var_per_dim.sqrt();
    realization
        .h
        .iter()
        .map(|&g| {
            let n = Complex64::new(
                rng.sample::<f64, _>(StandardNormal) * sd,
                rng.sample::<f64, _>(StandardNormal) * sd,
            );
            g * x + n
        })
        .collect()
}

/// BPSK map: coded bit v in {0,1} to symbol x = (-1)^v.
pub fn bpsk(v: u8) -> f64 {
    if v & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Maximum-ratio combining: y = sum h*[k] r[k], LLR = 2y / sigma_n^2.
pub fn combine_mrc(
    r: &[Complex64],
    realization: &ChannelRealization,
    sigma_n_sq: f64,
) -> Result<CombinedObservation> {
    if r.len() != realization.h.len() {
        return Err(Error::Dimension(format!(
            "{} received samples for {} antennas",
            r.len(),
            realization.h.len()
        )));
    }
    let y: Complex64 = realization.h.iter().zip(r).map(|(&g, &rv)| g.conj() * rv).sum();
    Ok(CombinedObservation { y, llr: 2.0 * y / sigma_n_sq, combiner: Combiner::Mrc })
}

/// Equal-gain combining: y = sum (h*[k]/|h[k]|) r[k],
/// LLR = (2y / (N_R sigma_n^2)) sum |h[k]|.
pub fn combine_egc(
    r: &[Complex64],
    realization: &ChannelRealization,
    sigma_n_sq: f64,
) -> Result<CombinedObservation> {
    if r.len() != realization.h.len() {
        return Err(Error::Dimension(format!(
            "{} received samples for {} antennas",
            r.len(),
            realization.h.len()
        )));
    }
    let n_r = realization.h.len() as f64;
    let mut y = Complex64::new(0.0, 0.0);
    let mut gain_sum = 0.0;
    for (&g, &rv) in realization.h.iter().zip(r) {
        let mag = g.norm();
        if mag < EGC_EPS {
            continue;
        }
        y += g.conj() / mag * rv;
        gain_sum += mag;
    }
    Ok(CombinedObservation {
        y,
        llr: 2.0 * y / (n_r * sigma_n_sq) * gain_sum,
        combiner: Combiner::Egc,
    })
}

/// Conditional distribution of the real channel LLR given the fading:
/// mean 2 alpha / sigma_n^2, variance 4 alpha / sigma_n^2.
pub fn conditional_llr_params(alpha: f64, sigma_n_sq: f64) -> (f64, f64) {
    if alpha == 0.0 {
        return (0.0, 0.0);
    }
    (2.0 * alpha / sigma_n_sq, 4.0 * alpha / sigma_n_sq)
}

/// Monte Carlo estimate of the ergodic SIMO capacity
/// E[log2(1 + (Es/N0) alpha)] in bits/s/Hz, with its standard error.
pub fn ergodic_capacity<R: Rng + ?Sized>(
    n_r: usize,
    es_n0_linear: f64,
    n_samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let alpha = sample_fading(n_r, rng).alpha;
        let c = (1.0 + es_n0_linear * alpha).log2();
        sum += c;
        sum_sq += c * c;
    }
    let mean = sum / n_samples as f64;
    let var = (sum_sq / n_samples as f64 - mean * mean).max(0.0);
    (mean, (var / n_samples as f64).sqrt())
}

/// Eb/N0 (dB) at which the ergodic capacity crosses the code rate, found by
/// bisection over a fixed set of fading draws (common random numbers keep
/// the capacity curve monotone in Eb/N0 so the bracket is valid).
pub fn capacity_crossing_db(n_r: usize, rate: f64, n_samples: usize, seed: u64) -> Result<f64> {
    // validates n_r/rate; n_r = 0 would otherwise turn the Es/N0 conversion
    // into NaN and the bisection below would return its lower bound
    ChannelParams::new(n_r, rate, 0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas: Vec<f64> = (0..n_samples).map(|_| sample_fading(n_r, &mut rng).alpha).collect();
    let capacity_at = |db: f64| -> f64 {
        let es_n0 = rate / n_r as f64 * 10f64.powf(db / 10.0);
        alphas.iter().map(|&a| (1.0 + es_n0 * a).log2()).sum::<f64>() / n_samples as f64
    };
    let (mut lo, mut hi) = (-20.0, 20.0);
    if capacity_at(lo) >= rate || capacity_at(hi) <= rate {
        return Err(Error::Domain(format!(
            "capacity does not cross rate {rate} within [{lo}, {hi}] dB"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if capacity_at(mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
