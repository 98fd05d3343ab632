//! Fading statistics of the wandering beam.
//!
//! A Gaussian random walk of the beam centroid produces a heavy-tailed
//! distribution of instantaneous transmissivities. This module carries the
//! exact misalignment transmissivity (an incomplete Weber integral), its
//! two-parameter `η exp[-(r/r0)^γ]` approximation, and the induced density
//! `P0(τ)`, its closed-form survival function, and fading averages.
//!
//! All `P0`-weighted integrals run in the variable `u = c·ln(η/τ)^{2/γ}`
//! (the log-transmissivity substitution followed by the Weibull-exponent
//! rescaling), where the weight is exactly `e^{-u}` and the endpoint
//! singularity of the density disappears; the tail is truncated once
//! `e^{-u}` drops below 1e-16 of the total mass.

use thiserror::Error;

use crate::quad;
use crate::special::{bessel_i0_scaled, lambda_n};
use crate::turbulence::TurbulenceRegime;

/// Truncation point of the `e^{-u}` weighted integrals (`e^{-45} ≈ 3e-20`).
const U_CUTOFF: f64 = 45.0;

#[derive(Debug, Error, PartialEq)]
pub enum FadingError {
    #[error("short-term transmissivity must be in (0, 1), got {0}")]
    EtaShortTerm(f64),
    #[error("wander sigma must be positive, got {0}")]
    Sigma(f64),
    #[error("combined setup/path transmissivity must be in (0, 1], got {0}")]
    PathTransmissivity(f64),
}

/// Short-term transmissivity of a perfectly aligned beam and its
/// quadratic-expansion value `2 a_R²/w_st²` (exact in the far field and
/// the argument of the shape functionals everywhere).
pub fn eta_short_term(a_r: f64, w_st: f64) -> (f64, f64) {
    debug_assert!(a_r > 0.0 && w_st > 0.0);
    let far = 2.0 * a_r * a_r / (w_st * w_st);
    (1.0 - (-far).exp(), far)
}

/// Incomplete Weber integral
/// `Q0(x, y) = (2x)^{-1} e^x ∫_0^y t e^{-t²/4x} I0(t) dt`.
///
/// Evaluated through the scaled integrand
/// `t e^{-(t-2x)²/4x} [e^{-t} I0(t)] / 2x`, whose factors all stay
/// bounded; the exact result is that value times `e^{2x}`, which may
/// overflow to infinity for `x ≳ 350` (callers needing the bounded
/// combination `e^{-2x} Q0` should use [`weber_q0_scaled`]).
///
/// The `x → 0` limit is handled analytically: the integrand degenerates
/// to a delta-like ring and `Q0 → 1` for any positive `y` (0 at `y = 0`).
pub fn weber_q0(x: f64, y: f64) -> f64 {
    weber_q0_scaled(x, y) * (2.0 * x).exp()
}

/// `e^{-2x} Q0(x, y)`, the overflow-free combination that enters the
/// misaligned transmissivity.
pub fn weber_q0_scaled(x: f64, y: f64) -> f64 {
    assert!(x >= 0.0 && y >= 0.0, "weber_q0 domain is x, y >= 0");
    if y == 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        // limit of the concentrated integrand
        return 1.0;
    }
    let integrand = |t: f64| {
        let d = t - 2.0 * x;
        t * (-d * d / (4.0 * x)).exp() * bessel_i0_scaled(t) / (2.0 * x)
    };
    // The integrand is a Gaussian bump at t = 2x of width ~ sqrt(2x);
    // splitting at the bump edges keeps the adaptive rule efficient.
    let width = (2.0 * x).sqrt();
    let lo = (2.0 * x - 12.0 * width).max(0.0);
    let hi = (2.0 * x + 12.0 * width).min(y);
    let mut total = 0.0;
    if lo > 0.0 {
        total += quad::integrate(integrand, 0.0, lo, 1e-10);
    }
    if hi > lo {
        total += quad::integrate(integrand, lo, hi, 1e-10);
    }
    if y > hi {
        total += quad::integrate(integrand, hi, y, 1e-10);
    }
    total
}

/// Exact transmissivity of a beam whose centroid is deflected by `r` from
/// the aperture center: `η_st(r) = e^{-4r²/w²} Q0(2r²/w², 4 r a_R/w²)`.
pub fn eta_deflected_exact(r: f64, a_r: f64, w_st: f64) -> f64 {
    debug_assert!(r >= 0.0);
    if r == 0.0 {
        return eta_short_term(a_r, w_st).0;
    }
    let x = 2.0 * r * r / (w_st * w_st);
    let y = 4.0 * r * a_r / (w_st * w_st);
    weber_q0_scaled(x, y)
}

/// Shape (`γ`) and scale (`r0`) of the `η exp[-(r/r0)^γ]` misalignment
/// approximation, from the aligned transmissivity and its expansion value.
pub fn fading_shape_params(eta_st: f64, eta_st_far: f64, a_r: f64) -> (f64, f64) {
    debug_assert!(eta_st_far > 0.0 && eta_st > 0.0);
    let l0 = lambda_n(0, eta_st_far);
    let l1 = lambda_n(1, eta_st_far);
    let log_term = (2.0 * eta_st / (1.0 - l0)).ln();
    let gamma = 4.0 * eta_st_far * l1 / (1.0 - l0) / log_term;
    let r0 = a_r * log_term.powf(-1.0 / gamma);
    (gamma, r0)
}

/// Rician density of the centroid deflection distance for mean offset `d`
/// and isotropic component deviation `sigma`; reduces to the Weibull
/// (Rayleigh) form at `d = 0`.
pub fn rician_density(r: f64, d: f64, sigma: f64) -> f64 {
    debug_assert!(r >= 0.0 && sigma > 0.0);
    let s2 = sigma * sigma;
    // exponentially-scaled Bessel keeps r·d/σ² in the hundreds finite
    let z = r * d / s2;
    let dm = r - d;
    (r / s2) * (-dm * dm / (2.0 * s2)).exp() * bessel_i0_scaled(z)
}

/// Parametrized fading channel: maximum transmissivity, misalignment
/// shape, and centroid-wander scale, plus the regime flag inherited from
/// the turbulence state.
#[derive(Debug, Clone, Copy)]
pub struct FadingModel {
    /// Maximum (perfect-alignment) transmissivity `η = η_st η_eff η_atm`.
    pub eta: f64,
    /// Misalignment shape exponent.
    pub gamma: f64,
    /// Misalignment scale, m.
    pub r0: f64,
    /// Centroid-wander standard deviation, m.
    pub sigma: f64,
    /// Mean deflection of the centroid, m (0 under active tracking).
    pub d: f64,
    /// Aligned short-term transmissivity before setup/path losses.
    pub eta_st: f64,
    /// Expansion value `2 a_R²/w_st²`.
    pub eta_st_far: f64,
    pub regime: TurbulenceRegime,
}

impl FadingModel {
    /// Build the model from the beam statistics at the receiver.
    /// `eta_path` is the product of the loss factors that are independent
    /// of alignment (setup efficiency and extinction; drop the setup term
    /// for trusted-receiver accounting).
    pub fn new(
        a_r: f64,
        w_st: f64,
        sigma: f64,
        eta_path: f64,
        regime: TurbulenceRegime,
    ) -> Result<Self, FadingError> {
        // NaN inputs must fail every gate, hence the negated forms
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        {
            if !(sigma > 0.0) {
                return Err(FadingError::Sigma(sigma));
            }
            if !(eta_path > 0.0 && eta_path <= 1.0) {
                return Err(FadingError::PathTransmissivity(eta_path));
            }
        }
        let (eta_st, eta_st_far) = eta_short_term(a_r, w_st);
        if !(eta_st > 0.0 && eta_st < 1.0) {
            return Err(FadingError::EtaShortTerm(eta_st));
        }
        let (gamma, r0) = fading_shape_params(eta_st, eta_st_far, a_r);
        Ok(Self {
            eta: eta_st * eta_path,
            gamma,
            r0,
            sigma,
            d: 0.0,
            eta_st,
            eta_st_far,
            regime,
        })
    }

    /// Weibull-exponent concentration `c = r0²/(2σ²)`; large values mean
    /// the transmissivity is pinned near `η`.
    pub fn concentration(&self) -> f64 {
        self.r0 * self.r0 / (2.0 * self.sigma * self.sigma)
    }

    /// Approximate transmissivity at deflection `r` (the closed form the
    /// density is derived from), including path losses.
    pub fn tau_of_deflection(&self, r: f64) -> f64 {
        self.eta * (-(r / self.r0).powf(self.gamma)).exp()
    }

    /// Probability density `P0(τ)` of the instantaneous transmissivity on
    /// the support `(0, η]`; zero outside. The density may diverge
    /// (integrably) at the upper endpoint when `γ > 2`.
    pub fn density(&self, tau: f64) -> f64 {
        if tau <= 0.0 || tau > self.eta {
            return 0.0;
        }
        let c = self.concentration();
        let x = (self.eta / tau).ln();
        let xp = x.powf(2.0 / self.gamma - 1.0);
        self.r0 * self.r0 / (self.gamma * self.sigma * self.sigma * tau)
            * xp
            * (-c * x.powf(2.0 / self.gamma)).exp()
    }

    /// Closed-form survival function `Prob(τ ≥ t) = 1 - e^{-c ln(η/t)^{2/γ}}`.
    pub fn prob_above(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if t >= self.eta {
            return 0.0;
        }
        let c = self.concentration();
        -(-c * (self.eta / t).ln().powf(2.0 / self.gamma)).exp_m1()
    }

    /// Probability that the transmissivity falls in `[t_lo, t_hi]`.
    pub fn slot_probability(&self, t_lo: f64, t_hi: f64) -> f64 {
        debug_assert!(t_lo <= t_hi);
        (self.prob_above(t_lo) - self.prob_above(t_hi)).max(0.0)
    }

    /// Fading average `∫_0^η P0(τ) f(τ) dτ` computed in the `e^{-u}`
    /// weighted variable (see module docs).
    pub fn average<F: Fn(f64) -> f64>(&self, payload: F) -> f64 {
        self.average_above(0.0, payload)
    }

    /// `∫_{t_floor}^η P0(τ) f(τ) dτ` for `t_floor ∈ [0, η)`.
    pub fn average_above<F: Fn(f64) -> f64>(&self, t_floor: f64, payload: F) -> f64 {
        let c = self.concentration();
        let half_gamma = 0.5 * self.gamma;
        let tau_of_u = |u: f64| self.eta * (-(u / c).powf(half_gamma)).exp();
        let u_max = if t_floor <= 0.0 {
            U_CUTOFF
        } else {
            (c * (self.eta / t_floor).ln().powf(2.0 / self.gamma)).min(U_CUTOFF)
        };
        quad::integrate(
            |u| {
                let tau = if u == 0.0 { self.eta } else { tau_of_u(u) };
                (-u).exp() * payload(tau)
            },
            0.0,
            u_max,
            1e-11,
        )
    }
}
