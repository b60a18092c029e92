//! Monte Carlo experiments: coded BER/FER over the SIMO fading link and
//! channel-LLR statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    bpsk, combine_egc, combine_mrc, sample_fading, transmit, ChannelParams, ChannelRealization,
    Combiner,
};
use crate::codes::{Encoder, ParityCheckMatrix};
use crate::decoder::{Decoder, DecoderConfig};
use crate::error::Result;

/// One BER/FER operating point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_r: usize,
    pub combiner: Combiner,
    pub eb_n0_db: f64,
    pub target_bit_errors: usize,
    pub max_frames: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub batch_size: usize,
}

impl SimConfig {
    pub fn new(n_r: usize, combiner: Combiner, eb_n0_db: f64, seed: u64) -> Self {
        SimConfig {
            n_r,
            combiner,
            eb_n0_db,
            target_bit_errors: 500,
            max_frames: 10_000_000,
            seed,
            max_iterations: 100,
            batch_size: 1024,
        }
    }
}

/// Measured outcome of one operating point.
#[derive(Debug, Clone, Serialize)]
pub struct SimPoint {
    pub eb_n0_db: f64,
    pub frames: u64,
    pub info_bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub avg_iterations: f64,
    /// True when the target error count was reached before `max_frames`.
    pub resolved: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    bit_errors: u32,
    frame_error: bool,
    iterations: u32,
}

/// splitmix64, used to derive one independent stream per frame.
fn mix_seed(seed: u64, frame: u64) -> u64 {
    let mut z = seed ^ frame.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn simulate_frame(
    code: &ParityCheckMatrix,
    decoder: &Decoder,
    encoder: &Encoder,
    params: &ChannelParams,
    combiner: Combiner,
    cfg: &DecoderConfig,
    frame_seed: u64,
) -> FrameOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(frame_seed);
    let x = bpsk(0); // all-zero codeword
    let mut llrs = vec![0.0f64; code.n_cols()];
    for (j, llr) in llrs.iter_mut().enumerate() {
        if !code.is_transmitted(j) {
            continue;
        }
        let fading = sample_fading(params.n_r, &mut rng);
        let r = transmit(x, &fading, params.sigma_n_sq, &mut rng);
        let obs = match combiner {
            Combiner::Mrc => combine_mrc(&r, &fading, params.sigma_n_sq),
            Combiner::Egc => combine_egc(&r, &fading, params.sigma_n_sq),
        }
        .expect("lengths match by construction");
        *llr = obs.llr.re;
    }
    let res = decoder.decode(&llrs, cfg);
    let bit_errors =
        encoder.info_positions().iter().filter(|&&p| res.hard_bits[p] != 0).count() as u32;
    FrameOutcome {
        bit_errors,
        frame_error: bit_errors > 0,
        iterations: res.iterations_used as u32,
    }
}

/// Run one BER/FER point with the all-zero codeword.
///
/// Frames are simulated in batches that are parallelized internally, but
/// accumulation walks the batch in frame order and stops at the first frame
/// that reaches the error target, so results are bit-identical for any
/// worker count.
pub fn run_ber(code: &ParityCheckMatrix, encoder: &Encoder, config: &SimConfig) -> Result<SimPoint> {
    let rate = encoder.k() as f64 / code.n_transmitted() as f64;
    let params = ChannelParams::new(config.n_r, rate, config.eb_n0_db)?;
    let decoder = Decoder::new(code);
    let dec_cfg = DecoderConfig { max_iterations: config.max_iterations, ..Default::default() };

    let mut frames = 0u64;
    let mut bit_errors = 0u64;
    let mut frame_errors = 0u64;
    let mut iterations = 0u64;
    let mut resolved = false;

    // batches grow geometrically so cheap (low-SNR) points do not
    // overshoot the error target by a full batch
    let mut batch_size = 32usize.min(config.batch_size);
    'outer: while frames < config.max_frames as u64 {
        let batch = batch_size.min((config.max_frames as u64 - frames) as usize);
        batch_size = (batch_size * 2).min(config.batch_size);
        let outcomes: Vec<FrameOutcome> = (0..batch)
            .into_par_iter()
            .map(|k| {
                simulate_frame(
                    code,
                    &decoder,
                    encoder,
                    &params,
                    config.combiner,
                    &dec_cfg,
                    mix_seed(config.seed, frames + k as u64),
                )
            })
            .collect();
        for out in outcomes {
            frames += 1;
            bit_errors += out.bit_errors as u64;
            frame_errors += out.frame_error as u64;
            iterations += out.iterations as u64;
            if bit_errors >= config.target_bit_errors as u64 {
                resolved = true;
                break 'outer;
            }
        }
    }
    if frames == config.max_frames as u64 && bit_errors >= config.target_bit_errors as u64 {
        resolved = true;
    }

    let info_bits = frames * encoder.k() as u64;
    Ok(SimPoint {
        eb_n0_db: config.eb_n0_db,
        frames,
        info_bits,
        bit_errors,
        frame_errors,
        ber: bit_errors as f64 / info_bits as f64,
        fer: frame_errors as f64 / frames as f64,
        avg_iterations: iterations as f64 / frames as f64,
        resolved,
    })
}

/// Channel-LLR statistics: mean |Re L| and Var(Re L) of the combiner
/// output LLR for x = +1 with fresh fading each symbol.
#[derive(Debug, Clone, Serialize)]
pub struct LlrMomentReport {
    pub n_r: usize,
    pub combiner: Combiner,
    pub eb_n0_db: f64,
    /// Raw mean of Re L with x = +1 sent; this is what Table III tabulates
    /// as the "mean" (it matches the closed form 4·R·Eb/N0, independent of
    /// N_R, where the folded mean E|L| does not).
    pub mean: f64,
    pub mean_abs: f64,
    pub variance: f64,
    pub n_samples: usize,
}

fn combine(
    combiner: Combiner,
    r: &[num_complex::Complex64],
    fading: &ChannelRealization,
    sigma_n_sq: f64,
) -> num_complex::Complex64 {
    match combiner {
        Combiner::Mrc => combine_mrc(r, fading, sigma_n_sq),
        Combiner::Egc => combine_egc(r, fading, sigma_n_sq),
    }
    .expect("lengths match by construction")
    .llr
}

/// Draw unconditioned channel LLRs for x = +1: fresh fading every symbol.
/// Returns the complex combiner LLRs.
pub fn sample_llrs(
    n_r: usize,
    rate: f64,
    eb_n0_db: f64,
    combiner: Combiner,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<num_complex::Complex64>> {
    let params = ChannelParams::new(n_r, rate, eb_n0_db)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_samples)
        .map(|_| {
            let fading = sample_fading(n_r, &mut rng);
            let r = transmit(1.0, &fading, params.sigma_n_sq, &mut rng);
            combine(combiner, &r, &fading, params.sigma_n_sq)
        })
        .collect())
}

/// Draw channel LLRs for x = +1 conditioned on one fixed fading draw.
pub fn sample_llrs_fixed_h(
    n_r: usize,
    rate: f64,
    eb_n0_db: f64,
    combiner: Combiner,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<num_complex::Complex64>> {
    let params = ChannelParams::new(n_r, rate, eb_n0_db)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fading = sample_fading(n_r, &mut rng);
    Ok((0..n_samples)
        .map(|_| {
            let r = transmit(1.0, &fading, params.sigma_n_sq, &mut rng);
            combine(combiner, &r, &fading, params.sigma_n_sq)
        })
        .collect())
}

/// Mean, folded mean |Re L| and Var(Re L) of the channel LLR.
pub fn measure_llr_moments(
    n_r: usize,
    rate: f64,
    eb_n0_db: f64,
    combiner: Combiner,
    n_samples: usize,
    seed: u64,
) -> Result<LlrMomentReport> {
    let samples = sample_llrs(n_r, rate, eb_n0_db, combiner, n_samples, seed)?;
    let n = samples.len() as f64;
    let mean_abs = samples.iter().map(|l| l.re.abs()).sum::<f64>() / n;
    let mean = samples.iter().map(|l| l.re).sum::<f64>() / n;
    let variance = samples.iter().map(|l| (l.re - mean) * (l.re - mean)).sum::<f64>() / n;
    Ok(LlrMomentReport { n_r, combiner, eb_n0_db, mean, mean_abs, variance, n_samples: samples.len() })
}

/// Normalized histogram (probability density) over `bins` equal-width bins.
pub fn histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    assert!(bins > 0 && range.1 > range.0);
    let width = (range.1 - range.0) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut kept = 0u64;
    for &s in samples {
        if s >= range.0 && s < range.1 {
            counts[((s - range.0) / width) as usize] += 1;
            kept += 1;
        }
    }
    let centers = (0..bins).map(|b| range.0 + (b as f64 + 0.5) * width).collect();
    let density = counts
        .iter()
        .map(|&c| if kept == 0 { 0.0 } else { c as f64 / (kept as f64 * width) })
        .collect();
    (centers, density)
}

/// Jarque-Bera normality statistic and its asymptotic p-value
/// (chi-squared with 2 degrees of freedom: p = exp(-JB/2)).
pub fn jarque_bera(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &s in samples {
        let d = s - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let jb = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    (jb, (-jb / 2.0).exp())
}
