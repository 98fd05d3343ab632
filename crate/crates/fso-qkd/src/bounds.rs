//! Capacity bounds for the fading optical channel.
//!
//! Loss-only bounds are exact: the fading average of `-log2(1-τ)` has the
//! closed form `-Δ(η,σ) log2(1-η)` with a single semi-infinite correction
//! integral `Δ`. Thermal noise turns the exact capacity into a sandwich:
//! an upper bound obtained by peeling the noise-dependent terms off the
//! integrand, and an achievable lower bound from the reverse coherent
//! information. Slow- and intermediate-detector variants substitute the
//! long-term beam statistics.

use std::f64::consts::LN_2;

use crate::beam::{fresnel_product, LinkGeometry};
use crate::fading::{eta_short_term, fading_shape_params, FadingModel};
use crate::quad;
use crate::turbulence::TurbulenceState;

/// Repeaterless bound for a pure-loss channel: `Φ(τ) = -log2(1-τ)`.
/// For `τ < 1e-3` this is `τ/ln2` to better than 0.05%.
pub fn plob(tau: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&tau));
    -(-tau).ln_1p() / LN_2
}

/// Entropic function `h(x) = (x+1) log2(x+1) - x log2 x`, continuous at 0.
pub fn entropic_h(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    ((x + 1.0) * x.ln_1p() - x * x.ln()) / LN_2
}

/// Thermal-loss repeaterless bound
/// `Φ(τ, n̄) = -log2[(1-τ) τ^{n̄/(1-τ)}] - h(n̄/(1-τ))`, zero once the
/// noise reaches the transmissivity.
pub fn plob_thermal(tau: f64, n_bar: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&tau) && n_bar >= 0.0);
    if n_bar >= tau {
        return 0.0;
    }
    if n_bar == 0.0 {
        return plob(tau);
    }
    let ratio = n_bar / (1.0 - tau);
    -((-tau).ln_1p() + ratio * tau.ln()) / LN_2 - entropic_h(ratio)
}

/// Reverse coherent information of a thermal-loss channel,
/// `-log2(1-τ) - h(n̄/(1-τ))`; may be negative.
pub fn reverse_coherent_info(tau: f64, n_bar: f64) -> f64 {
    plob(tau) - entropic_h(n_bar / (1.0 - tau))
}

// ---------------------------------------------------------------------------
// Wandering correction and loss bound
// ---------------------------------------------------------------------------

/// `η/ln(1-η)` without cancellation for small `η` (limit -1 at 0).
fn eta_over_ln1m(eta: f64) -> f64 {
    if eta < 1e-8 {
        -1.0 / (1.0 + eta * (0.5 + eta / 3.0))
    } else {
        eta / (-eta).ln_1p()
    }
}

/// Truncation point for integrands decaying as `exp(-c x^{2/γ})·e^{-x}`.
fn omega_cutoff(c: f64, gamma: f64) -> f64 {
    (45.0 / c).powf(0.5 * gamma).min(45.0)
}

/// Wandering correction factor evaluated at an arbitrary transmissivity
/// argument (the loss bound uses `η`; the thermal correction re-evaluates
/// it at `n̄`):
/// `Δ(e,σ) = 1 + [e/ln(1-e)] ∫_0^∞ dx exp(-c x^{2/γ})/(e^x - e)`.
pub fn delta_correction_at(model: &FadingModel, eta_arg: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&eta_arg));
    if model.sigma == 0.0 {
        return 1.0;
    }
    let c = model.concentration();
    if !c.is_finite() {
        return 1.0;
    }
    let exponent = 2.0 / model.gamma;
    let omega = quad::integrate(
        |x| (-c * x.powf(exponent)).exp() / (x.exp() - eta_arg),
        0.0,
        omega_cutoff(c, model.gamma),
        1e-11,
    );
    1.0 + eta_over_ln1m(eta_arg) * omega
}

/// Wandering correction `Δ(η, σ)` of the model's own transmissivity.
pub fn delta_correction(model: &FadingModel) -> f64 {
    delta_correction_at(model, model.eta)
}

/// High-loss limit of the correction factor:
/// `Λ = 1 - ∫_0^∞ exp(-c x^{2/γ} - x) dx`.
pub fn lambda_correction(model: &FadingModel) -> f64 {
    if model.sigma == 0.0 {
        return 1.0;
    }
    let c = model.concentration();
    if !c.is_finite() {
        return 1.0;
    }
    let exponent = 2.0 / model.gamma;
    1.0 - quad::integrate(
        |x| (-c * x.powf(exponent) - x).exp(),
        0.0,
        omega_cutoff(c, model.gamma),
        1e-11,
    )
}

/// Secret-key / entanglement capacity of the fading lossy channel:
/// `-Δ(η,σ) log2(1-η)`. Both an upper bound and (by convexity of the
/// instantaneous capacities) an achievable rate.
pub fn loss_bound(model: &FadingModel) -> f64 {
    -delta_correction(model) * (-model.eta).ln_1p() / LN_2
}

// ---------------------------------------------------------------------------
// Thermal sandwich
// ---------------------------------------------------------------------------

/// `g(n̄) = n̄ log2 n̄ / (1-n̄) + h(n̄)`, the per-mode entropic weight of
/// the thermal correction.
fn thermal_g(n_bar: f64) -> f64 {
    if n_bar == 0.0 {
        return 0.0;
    }
    n_bar * n_bar.ln() / LN_2 / (1.0 - n_bar) + entropic_h(n_bar)
}

/// Thermal correction `𝒯 = 𝒩(n̄,η,σ) g(n̄) - Δ(n̄,σ) log2(1-n̄)` with
/// `𝒩` the fading mass above `n̄`. For `n̄ ≥ η` the correction swallows
/// the whole loss bound.
pub fn thermal_correction(model: &FadingModel, n_bar: f64) -> f64 {
    debug_assert!(n_bar >= 0.0);
    if n_bar == 0.0 {
        return 0.0;
    }
    if n_bar >= model.eta {
        return loss_bound(model);
    }
    let mass_above = model.prob_above(n_bar);
    mass_above * thermal_g(n_bar) - delta_correction_at(model, n_bar) * (-n_bar).ln_1p() / LN_2
}

/// Upper bound in the presence of `n̄` thermal photons per mode:
/// `loss_bound - 𝒯(n̄, η, σ)`, clamped at zero (0 whenever `n̄ ≥ η`).
pub fn thermal_upper(model: &FadingModel, n_bar: f64) -> f64 {
    if n_bar >= model.eta {
        return 0.0;
    }
    (loss_bound(model) - thermal_correction(model, n_bar)).max(0.0)
}

/// Achievable lower bound: `loss_bound - h(n̄/(1-η))`, clamped at zero.
pub fn thermal_lower(model: &FadingModel, n_bar: f64) -> f64 {
    (loss_bound(model) - entropic_h(n_bar / (1.0 - model.eta))).max(0.0)
}

/// Tighter achievable rate from averaging the reverse coherent
/// information over the fading density. Clamped at zero.
pub fn thermal_lower_quadrature(model: &FadingModel, n_bar: f64) -> f64 {
    model.average(|tau| reverse_coherent_info(tau, n_bar)).max(0.0)
}

/// Which detector/noise scenario a [`BoundResult`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    LossOnly,
    Thermal,
    Slow,
    Intermediate,
}

/// Assembled upper/lower capacity estimates at one channel configuration.
#[derive(Debug, Clone, Copy)]
pub struct BoundResult {
    pub upper: f64,
    pub lower: f64,
    pub kind: BoundKind,
    /// Wandering correction factor `Δ(η, σ)`.
    pub delta_factor: f64,
    /// Thermal correction `𝒯` subtracted from the loss bound (0 for
    /// loss-only results); kept unclamped so that
    /// `loss - 𝒯 < 0 = upper` identifies clamping.
    pub thermal_correction: f64,
    /// True when the raw upper bound went negative and was clamped.
    pub clamped: bool,
}

/// Loss bound plus the thermal sandwich at `n̄` photons per mode.
pub fn thermal_sandwich(model: &FadingModel, n_bar: f64) -> BoundResult {
    let loss = loss_bound(model);
    let correction = thermal_correction(model, n_bar);
    let upper = thermal_upper(model, n_bar);
    let lower = thermal_lower(model, n_bar);
    BoundResult {
        upper,
        lower,
        kind: if n_bar > 0.0 { BoundKind::Thermal } else { BoundKind::LossOnly },
        delta_factor: delta_correction(model),
        thermal_correction: correction,
        clamped: loss - correction < 0.0 || n_bar >= model.eta,
    }
}

// ---------------------------------------------------------------------------
// Detector-speed variants
// ---------------------------------------------------------------------------

/// Upper bound for a detector too slow to resolve any wandering: the
/// whole dynamics averages into one channel of spot size
/// `w_slow² = w_st² + σ_TB² + σ_P²`.
pub fn slow_detector_bound(
    a_r: f64,
    turb: &TurbulenceState,
    eta_eff: f64,
    eta_atm: f64,
) -> f64 {
    let w_slow2 = turb.w_st * turb.w_st + turb.sigma_tb * turb.sigma_tb + turb.sigma_p * turb.sigma_p;
    let eta_slow = eta_eff * eta_atm * (1.0 - (-2.0 * a_r * a_r / w_slow2).exp());
    plob(eta_slow)
}

/// Upper bound for a detector resolving pointing drift but not the
/// turbulence-induced wander: a fading channel built on the long-term
/// spot size with `σ_P` as the only wandering source.
pub fn intermediate_detector_bound(
    a_r: f64,
    turb: &TurbulenceState,
    eta_eff: f64,
    eta_atm: f64,
) -> f64 {
    let (eta_lt, far) = eta_short_term(a_r, turb.w_lt);
    if turb.sigma_p == 0.0 {
        return plob(eta_lt * eta_eff * eta_atm);
    }
    let (gamma, r0) = fading_shape_params(eta_lt, far, a_r);
    let model = FadingModel {
        eta: eta_lt * eta_eff * eta_atm,
        gamma,
        r0,
        sigma: turb.sigma_p,
        d: 0.0,
        eta_st: eta_lt,
        eta_st_far: far,
        regime: turb.regime,
    };
    loss_bound(&model)
}

// ---------------------------------------------------------------------------
// Maximum secure distance
// ---------------------------------------------------------------------------

/// Distance at which the diffraction-limited collimated link stops
/// beating `n̄` thermal photons: the root of `2 f_0R(z) = -ln(1-n̄)`.
/// `None` means unbounded (no thermal noise). Solved by bisection.
pub fn max_secure_distance(geom: &LinkGeometry, n_bar: f64) -> Option<f64> {
    if n_bar <= 0.0 {
        return None;
    }
    let target = -(-n_bar).ln_1p();
    let excess = |z: f64| 2.0 * fresnel_product(&geom.at_distance(z)) - target;
    let mut lo = 1e-3;
    let mut hi = 1.0;
    while excess(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Some(f64::INFINITY);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Achievable protocol rates
// ---------------------------------------------------------------------------

/// Asymptotic rate of the biased squeezed-state protocol over a pure-loss
/// channel. Per sifted symbol the mutual information and the leaked
/// Holevo term combine so that the modulation variance cancels, leaving
/// `[p² + (1-p)²] Φ(τ)`: half the loss capacity unbiased, all of it in
/// the fully-biased limit.
pub fn squeezed_rate(p: f64, tau: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    (p * p + (1.0 - p) * (1.0 - p)) * plob(tau)
}

/// Large-modulation rate of the coherent-state homodyne protocol over a
/// thermal-loss channel:
/// `Φ(τ) - h(n̄/(1-τ)) + (1/2) log2(1 - τ/(2n̄+1))`.
/// Reduces to `Φ(τ)/2` exactly at `n̄ = 0`.
pub fn coherent_rate(tau: f64, n_bar: f64) -> f64 {
    plob(tau) - entropic_h(n_bar / (1.0 - tau))
        + 0.5 * (-tau / (2.0 * n_bar + 1.0)).ln_1p() / LN_2
}

/// Fading average of [`squeezed_rate`].
pub fn average_squeezed_rate(model: &FadingModel, p: f64) -> f64 {
    model.average(|tau| squeezed_rate(p, tau))
}

/// Fading average of [`coherent_rate`].
pub fn average_coherent_rate(model: &FadingModel, n_bar: f64) -> f64 {
    model.average(|tau| coherent_rate(tau, n_bar))
}
