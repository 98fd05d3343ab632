//! Independent Monte Carlo and brute-force oracles.
//!
//! These exist to cross-check the analytic machinery and deliberately take
//! the dumbest correct route: direct sampling of the centroid walk, a
//! two-dimensional polar quadrature of the displaced beam overlap, and a
//! straight simulation of the estimation rounds.
//!
//! Randomness contract: ChaCha12 keyed by the user seed (little-endian
//! `u64` repeated into the 32-byte key), one stream per 65536-sample
//! chunk (stream id = chunk index). Uniforms are `(next_u64 >> 11 + 1) ·
//! 2^-53` in `(0, 1]`, normals come from the Box-Muller transform on one
//! uniform pair. Serial and chunk-parallel execution therefore produce
//! bit-identical streams.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::cvqkd::{ChannelPoint, Detection};
use crate::estimation::{deviations_from_eps, EstimationConfig};
use crate::fading::FadingModel;

const CHUNK: u64 = 1 << 16;

/// Summary statistic kinds an oracle run can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatistic {
    KsDistance,
    Mean,
    Variance,
    Coverage,
}

/// One reproducible oracle outcome: deterministic in `(seed, samples,
/// statistic, inputs)`.
#[derive(Debug, Clone, Copy)]
pub struct OracleRun {
    pub seed: u64,
    pub samples: u64,
    pub statistic: OracleStatistic,
    pub value: f64,
    /// Half-width of a 95% normal-approximation confidence interval where
    /// meaningful (0 when not applicable).
    pub ci95: f64,
}

/// RNG for chunk `chunk` of the stream family identified by `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    for (i, b) in seed.to_le_bytes().iter().cycle().take(32).enumerate() {
        key[i] = *b;
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(chunk);
    rng
}

/// Uniform draw in `(0, 1]`.
fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One standard-normal pair via Box-Muller.
fn normal_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}

/// Draw `n` instantaneous transmissivities from the fading model by
/// sampling the centroid deflection (inverse-CDF Weibull at zero mean
/// offset, two-component Gaussian otherwise) and mapping through
/// `τ = η exp[-(r/r0)^γ]`.
pub fn sample_fading(model: &FadingModel, seed: u64, n: u64) -> Vec<f64> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|ci| {
            let mut rng = chunk_rng(seed, ci);
            let count = CHUNK.min(n - ci * CHUNK);
            let mut out = Vec::with_capacity(count as usize);
            for _ in 0..count {
                let r = if model.d == 0.0 {
                    model.sigma * (-2.0 * uniform(&mut rng).ln()).sqrt()
                } else {
                    let (g1, g2) = normal_pair(&mut rng);
                    let x = model.d + model.sigma * g1;
                    let y = model.sigma * g2;
                    x.hypot(y)
                };
                out.push(model.tau_of_deflection(r));
            }
            out
        })
        .collect()
}

/// Kolmogorov-Smirnov distance between a sample and a closed-form lower
/// CDF `cdf(x) = Prob(X ≤ x)` (bin-free, two-sided).
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let hi = (i + 1) as f64 / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// KS check of the fading sampler against the analytic transmissivity
/// CDF, packaged as a reproducible run.
pub fn fading_ks_run(model: &FadingModel, seed: u64, n: u64) -> OracleRun {
    let mut samples = sample_fading(model, seed, n);
    let value = ks_distance(&mut samples, |t| 1.0 - model.prob_above(t));
    OracleRun { seed, samples: n, statistic: OracleStatistic::KsDistance, value, ci95: 0.0 }
}

/// Fraction of a unit-power Gaussian beam of field spot size `w` whose
/// center sits a distance `r` from the center of a disk of radius `a_r`
/// that lands inside the disk.
///
/// Plain two-dimensional quadrature in polar coordinates around the disk
/// center: composite Simpson radially, trapezoid in angle (spectrally
/// accurate for the periodic integrand). Entirely independent of the
/// Weber-integral route it validates.
pub fn overlap_oracle(r: f64, a_r: f64, w: f64, radial_points: usize) -> f64 {
    let n_rho = radial_points | 1; // Simpson needs an odd count
    let n_phi = 720;
    let h_rho = a_r / (n_rho - 1) as f64;
    let h_phi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut total = 0.0;
    for i in 0..n_rho {
        let rho = i as f64 * h_rho;
        // angular average of exp(-2|x - r|^2 / w^2) on the circle |x| = rho
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = j as f64 * h_phi;
            let d2 = rho * rho + r * r - 2.0 * rho * r * phi.cos();
            ring += (-2.0 * d2 / (w * w)).exp();
        }
        ring *= h_phi;
        let simpson_w = if i == 0 || i == n_rho - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        total += simpson_w * ring * rho;
    }
    total * h_rho / 3.0 * 2.0 / (std::f64::consts::PI * w * w)
}

/// Sample moments of the transmissivity and noise estimators over
/// simulated estimation rounds.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorStats {
    pub tau_mean: f64,
    pub tau_variance: f64,
    pub n_mean: f64,
    pub n_variance: f64,
}

/// Simulate `rounds` estimation rounds of `m` signals each through the
/// channel `y = sqrt(τ) x + z` and return the empirical moments of the
/// two estimators.
pub fn simulate_estimators(
    config: &EstimationConfig,
    point: &ChannelPoint,
    seed: u64,
    rounds: u64,
) -> EstimatorStats {
    let results: Vec<(f64, f64)> = (0..rounds)
        .into_par_iter()
        .map(|round| {
            let mut rng = chunk_rng(seed, round);
            estimate_once(config, point, &mut rng)
        })
        .collect();
    let n = rounds as f64;
    let tau_mean = results.iter().map(|r| r.0).sum::<f64>() / n;
    let n_mean = results.iter().map(|r| r.1).sum::<f64>() / n;
    let tau_variance =
        results.iter().map(|r| (r.0 - tau_mean) * (r.0 - tau_mean)).sum::<f64>() / (n - 1.0);
    let n_variance =
        results.iter().map(|r| (r.1 - n_mean) * (r.1 - n_mean)).sum::<f64>() / (n - 1.0);
    EstimatorStats { tau_mean, tau_variance, n_mean, n_variance }
}

/// One estimation round: returns `(τ̂, n̄̂)`.
fn estimate_once(
    config: &EstimationConfig,
    point: &ChannelPoint,
    rng: &mut ChaCha12Rng,
) -> (f64, f64) {
    let (m_eff, sigma_z2) = match config.detection {
        Detection::Homodyne => (config.m as u64, point.sigma_z2()),
        Detection::Heterodyne => (2 * config.m as u64, point.sigma_z2() + 1.0),
    };
    let sigma_x = point.sigma_x2().sqrt();
    let sigma_z = sigma_z2.sqrt();
    let sqrt_tau = point.tau.sqrt();
    let mut cov = 0.0;
    let mut resid2 = 0.0;
    let mut i = 0;
    while i < m_eff {
        let (g1, g2) = normal_pair(rng);
        let (g3, g4) = normal_pair(rng);
        for (gx, gz) in [(g1, g2), (g3, g4)] {
            if i >= m_eff {
                break;
            }
            let x = sigma_x * gx;
            let z = sigma_z * gz;
            let y = sqrt_tau * x + z;
            cov += x * y;
            resid2 += (y - sqrt_tau * x) * (y - sqrt_tau * x);
            i += 1;
        }
    }
    let m_f = m_eff as f64;
    let c_xy = cov / m_f;
    let tau_hat = (c_xy / point.sigma_x2()) * (c_xy / point.sigma_x2());
    let n_hat = match config.detection {
        Detection::Homodyne => 0.5 * (resid2 / m_f - 1.0),
        Detection::Heterodyne => 0.5 * (resid2 / m_f - 2.0),
    };
    (tau_hat, n_hat)
}

/// Frequency with which the worst-case noise bound `n̄' = n̄̂ + w σ_n̄`
/// fails to cover the true noise over simulated rounds.
pub fn estimator_coverage(
    config: &EstimationConfig,
    point: &ChannelPoint,
    seed: u64,
    trials: u64,
) -> OracleRun {
    let w = deviations_from_eps(config.eps_pe);
    let sigma_n = match config.detection {
        Detection::Homodyne => point.sigma_z2() * point.sigma_z2() / (2.0 * config.m),
        Detection::Heterodyne => {
            let s = point.sigma_z2() + 1.0;
            s * s / (4.0 * config.m)
        }
    }
    .sqrt();
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = chunk_rng(seed, t);
            let (_, n_hat) = estimate_once(config, point, &mut rng);
            u64::from(n_hat + w * sigma_n < point.n_bar)
        })
        .sum();
    let freq = failures as f64 / trials as f64;
    let ci = 1.96 * (freq.max(1.0 / trials as f64) * (1.0 - freq) / trials as f64).sqrt();
    OracleRun {
        seed,
        samples: trials,
        statistic: OracleStatistic::Coverage,
        value: freq,
        ci95: ci,
    }
}
