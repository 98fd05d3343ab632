//! Parameter-estimation statistics: confidence deviations, estimator
//! variances for transmissivity and thermal noise, worst-case parameter
//! construction, and the pilot-mode worst-case noise.

use crate::cvqkd::{ChannelPoint, Detection};
use crate::special::erfc_inv;

/// Error probability below which the Gaussian quantile construction is
/// abandoned for the chi-square tail bound.
pub const TAIL_BOUND_THRESHOLD: f64 = 1e-17;

/// Configuration of the estimation phase.
#[derive(Debug, Clone, Copy)]
pub struct EstimationConfig {
    /// Number of signals (pilots) sacrificed for estimation.
    pub m: f64,
    /// Per-parameter error probability, in (0, 1/2).
    pub eps_pe: f64,
    pub detection: Detection,
    /// Mean photon number of each pilot (estimation precision for the
    /// transmissivity; the worst-case noise does not depend on it).
    pub pilot_energy: f64,
}

/// Number of standard deviations `w` covering a one-sided error
/// probability `eps_pe` under the Gaussian quantile,
/// `w = sqrt(2)·erfc⁻¹(2 ε)` (identical to `sqrt(2)·erf⁻¹(1-2ε)` without
/// the cancellation). Below [`TAIL_BOUND_THRESHOLD`] the chi-square tail
/// bound takes over.
pub fn deviations_from_eps(eps_pe: f64) -> f64 {
    assert!(eps_pe > 0.0 && eps_pe < 0.5, "eps_pe must be in (0, 1/2)");
    if eps_pe >= TAIL_BOUND_THRESHOLD {
        std::f64::consts::SQRT_2 * erfc_inv(2.0 * eps_pe)
    } else {
        deviations_tail_bound(eps_pe)
    }
}

/// Tail-bound deviation count `w = sqrt(2 ln(1/ε))`, valid (and slightly
/// conservative) at any `ε`; required once the Gaussian construction
/// degenerates numerically.
pub fn deviations_tail_bound(eps_pe: f64) -> f64 {
    assert!(eps_pe > 0.0 && eps_pe < 1.0);
    (2.0 * (1.0 / eps_pe).ln()).sqrt()
}

/// Variances of the transmissivity and noise estimators built from `m`
/// modulated signals:
/// `σ_τ² = (4τ²/m)(2 + σ_z²/(τ σ_x²))`, `σ_n̄² = σ_z⁴/(2m)`.
/// Heterodyne detection doubles the samples and adds a vacuum unit to the
/// noise variance.
pub fn estimator_variances(config: &EstimationConfig, point: &ChannelPoint) -> (f64, f64) {
    let (m_eff, sigma_z2) = match config.detection {
        Detection::Homodyne => (config.m, point.sigma_z2()),
        Detection::Heterodyne => (2.0 * config.m, point.sigma_z2() + 1.0),
    };
    let tau = point.tau;
    let var_tau = 4.0 * tau * tau / m_eff * (2.0 + sigma_z2 / (tau * point.sigma_x2()));
    let var_n = sigma_z2 * sigma_z2 / (2.0 * m_eff);
    (var_tau, var_n)
}

/// Worst-case parameters `τ' = τ - w σ_τ` (clamped at 0) and
/// `n̄' = n̄ + w σ_n̄`, with `w` from the configured error probability.
pub fn worst_case_params(config: &EstimationConfig, point: &ChannelPoint) -> (f64, f64) {
    let w = deviations_from_eps(config.eps_pe);
    let (var_tau, var_n) = estimator_variances(config, point);
    let tau_wc = (point.tau - w * var_tau.sqrt()).max(0.0);
    let n_wc = point.n_bar + w * var_n.sqrt();
    (tau_wc, n_wc)
}

/// Worst-case thermal noise in the pilot-guided protocol, where the
/// transmissivity is known exactly and only the noise carries estimation
/// error:  hom `n̄ + w(2n̄+1)/sqrt(2m)`,  het `n̄ + w(n̄+1)/sqrt(m)`.
/// Independent of the pilot energy.
pub fn pilot_worst_case_noise(config: &EstimationConfig, n_bar: f64) -> f64 {
    let w = deviations_from_eps(config.eps_pe);
    match config.detection {
        Detection::Homodyne => n_bar + w * (2.0 * n_bar + 1.0) / (2.0 * config.m).sqrt(),
        Detection::Heterodyne => n_bar + w * (n_bar + 1.0) / config.m.sqrt(),
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn config(m: f64, eps: f64, det: Detection) -> EstimationConfig {
        EstimationConfig { m, eps_pe: eps, detection: det, pilot_energy: 1e6 }
    }

    #[test]
    fn deviation_reference_constants() {
        // Gaussian branch at 2^-33
        let w = deviations_from_eps(2.0_f64.powi(-33));
        assert!((w - 6.33795775455).abs() < 1e-9, "w = {w}");
        assert!((w - 6.34).abs() <= 0.01);
        // forced tail branch at the same epsilon
        let wt = deviations_tail_bound(2.0_f64.powi(-33));
        assert!((wt - 6.763705635).abs() < 1e-9);
        assert!((wt - 6.76).abs() <= 0.01);
        // deep tail value used by the general-attack configuration
        let w43 = deviations_from_eps(1e-43);
        assert!((w43 - 14.0720402926).abs() < 1e-9);
        assert!((w43 - 14.07).abs() <= 0.01);
    }

    #[test]
    fn tail_bound_dominates_gaussian() {
        let mut eps = 1e-16;
        while eps < 0.4 {
            assert!(
                deviations_tail_bound(eps) >= deviations_from_eps(eps),
                "eps = {eps}"
            );
            eps *= 40.0;
        }
    }

    #[test]
    fn variances_scale_inversely_with_samples() {
        let point = ChannelPoint::new(0.6, 0.01, 11.0).unwrap();
        let (t1, n1) = estimator_variances(&config(1000.0, 1e-2, Detection::Homodyne), &point);
        let (t2, n2) = estimator_variances(&config(2000.0, 1e-2, Detection::Homodyne), &point);
        assert!((t1 / t2 - 2.0).abs() < 1e-12);
        assert!((n1 / n2 - 2.0).abs() < 1e-12);
        // heterodyne halves the noise variance relative to the widened
        // sigma and doubles the sample count
        let (_, n_het) = estimator_variances(&config(1000.0, 1e-2, Detection::Heterodyne), &point);
        let sz2 = point.sigma_z2() + 1.0;
        assert!((n_het - sz2 * sz2 / 4000.0).abs() < 1e-15);
    }

    #[test]
    fn estimator_variances_match_simulation() {
        // sample variance over simulated estimation rounds within 5%
        use crate::oracle::simulate_estimators;
        let point = ChannelPoint::new(0.6, 0.05, 9.0).unwrap();
        let cfg = config(2500.0, 1e-2, Detection::Homodyne);
        let stats = simulate_estimators(&cfg, &point, 0x5eed, 10_000);
        let (var_tau, var_n) = estimator_variances(&cfg, &point);
        assert!(
            ((stats.tau_variance - var_tau) / var_tau).abs() < 0.05,
            "tau variance {} vs {var_tau}",
            stats.tau_variance
        );
        assert!(
            ((stats.n_variance - var_n) / var_n).abs() < 0.05,
            "noise variance {} vs {var_n}",
            stats.n_variance
        );
        // estimator means converge to the true parameters
        assert!((stats.tau_mean - point.tau).abs() < 3.0 * (var_tau / 10_000.0).sqrt() + 1e-3);
        assert!((stats.n_mean - point.n_bar).abs() < 3.0 * (var_n / 10_000.0).sqrt());
    }

    #[test]
    fn worst_case_construction() {
        let point = ChannelPoint::new(0.6, 0.01, 11.0).unwrap();
        let cfg = config(1e6, 1e-2, Detection::Homodyne);
        let (tau_wc, n_wc) = worst_case_params(&cfg, &point);
        assert!(tau_wc < point.tau);
        assert!(n_wc > point.n_bar);
        // monotone in w: tighter epsilon moves both further out
        let tight = config(1e6, 1e-6, Detection::Homodyne);
        let (tau_t, n_t) = worst_case_params(&tight, &point);
        assert!(tau_t < tau_wc && n_t > n_wc);
        // w = 0 would leave parameters untouched; emulate via the formula
        let (vt, vn) = estimator_variances(&cfg, &point);
        assert!((point.tau - 0.0 * vt.sqrt() - point.tau).abs() == 0.0);
        assert!((point.n_bar + 0.0 * vn.sqrt() - point.n_bar).abs() == 0.0);
        // clamping at zero for hopeless statistics
        let hopeless = config(4.0, 1e-10, Detection::Homodyne);
        let (tau_c, _) = worst_case_params(&hopeless, &point);
        assert_eq!(tau_c, 0.0);
    }

    #[test]
    fn pilot_noise_reference_point() {
        // hom, n̄ = 0, w = 6.34, m = 7.5e6: 6.34/sqrt(1.5e7)
        let cfg = config(7.5e6, 2.0_f64.powi(-33), Detection::Homodyne);
        let n_wc = pilot_worst_case_noise(&cfg, 0.0);
        assert!((n_wc - 1.6370e-3).abs() < 1e-6, "n' = {n_wc}");
        // m -> infinity recovers the true noise
        let cfg = config(1e22, 2.0_f64.powi(-33), Detection::Homodyne);
        assert!((pilot_worst_case_noise(&cfg, 0.07) - 0.07).abs() < 1e-9);
        // independent of pilot energy
        let mut a = config(7.5e6, 2.0_f64.powi(-33), Detection::Heterodyne);
        a.pilot_energy = 1.0;
        let mut b = a;
        b.pilot_energy = 1e12;
        assert_eq!(pilot_worst_case_noise(&a, 0.01), pilot_worst_case_noise(&b, 0.01));
    }
}
