//! Asymptotic rates of Gaussian-modulated coherent-state protocols over a
//! thermal-loss channel: mutual information, the shared two-mode
//! covariance matrix, its symplectic spectrum, and the eavesdropper's
//! Holevo bound for homodyne and heterodyne readout.

use std::f64::consts::LN_2;

use thiserror::Error;

use crate::bounds::entropic_h;

/// Modulation cap: beyond this the squared variance loses too much
/// precision to be worth evaluating, so construction refuses.
pub const MU_MAX: f64 = 1e8;

/// Receiver measurement choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

impl Detection {
    pub fn as_str(&self) -> &'static str {
        match self {
            Detection::Homodyne => "hom",
            Detection::Heterodyne => "het",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CvqkdError {
    #[error("transmissivity must be in (0, 1], got {0}")]
    Tau(f64),
    #[error("thermal photon number must be nonnegative, got {0}")]
    NBar(f64),
    #[error("modulation variance must be in [1, {MU_MAX}], got {0}")]
    Mu(f64),
    #[error("covariance matrix is unphysical (discriminant {0})")]
    InvalidCm(f64),
}

/// One operating point of the thermal-loss channel plus the modulation.
#[derive(Debug, Clone, Copy)]
pub struct ChannelPoint {
    /// Channel transmissivity.
    pub tau: f64,
    /// Thermal photons per mode referred to the channel output.
    pub n_bar: f64,
    /// Variance of the average thermal state at the transmitter,
    /// `μ = 2 n̄_T + 1`.
    pub mu: f64,
}

impl ChannelPoint {
    pub fn new(tau: f64, n_bar: f64, mu: f64) -> Result<Self, CvqkdError> {
        // NaN inputs must fail every gate, hence the negated forms
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(CvqkdError::Tau(tau));
            }
            if !(n_bar >= 0.0) {
                return Err(CvqkdError::NBar(n_bar));
            }
            if !((1.0..=MU_MAX).contains(&mu)) {
                return Err(CvqkdError::Mu(mu));
            }
        }
        Ok(Self { tau, n_bar, mu })
    }

    /// Modulation variance `σ_x² = μ - 1`.
    pub fn sigma_x2(&self) -> f64 {
        self.mu - 1.0
    }

    /// Output noise quadrature variance `σ_z² = 2 n̄ + 1`.
    pub fn sigma_z2(&self) -> f64 {
        2.0 * self.n_bar + 1.0
    }

    /// Receiver block variance `b = τ(μ-1) + 2n̄ + 1` (always positive).
    pub fn b(&self) -> f64 {
        self.tau * (self.mu - 1.0) + 2.0 * self.n_bar + 1.0
    }
}

/// Two-mode covariance matrix in the standard form
/// `[[a·I, c·Z], [c·Z, b·I]]`.
#[derive(Debug, Clone, Copy)]
pub struct TwoModeCm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Covariance matrix shared by transmitter and receiver after the
/// channel: `a = μ`, `b = τ(μ-1) + 2n̄ + 1`, `c = sqrt(τ(μ²-1))`.
pub fn shared_cm(point: &ChannelPoint) -> TwoModeCm {
    TwoModeCm {
        a: point.mu,
        b: point.b(),
        c: (point.tau * (point.mu * point.mu - 1.0)).sqrt(),
    }
}

/// Symplectic eigenvalues of a standard-form two-mode covariance matrix:
/// `ν±² = (Δ ± sqrt(Δ² - 4 detV))/2` with `Δ = a² + b² - 2c²` and
/// `detV = (ab - c²)²`. Discriminants negative beyond -1e-12 (relative)
/// are rejected as unphysical.
pub fn symplectic_eigenvalues(cm: &TwoModeCm) -> Result<(f64, f64), CvqkdError> {
    let delta = cm.a * cm.a + cm.b * cm.b - 2.0 * cm.c * cm.c;
    let det = cm.a * cm.b - cm.c * cm.c;
    let mut disc = delta * delta - 4.0 * det * det;
    let scale = (delta * delta).max(1.0);
    if disc < 0.0 {
        if disc > -1e-12 * scale {
            disc = 0.0;
        } else {
            return Err(CvqkdError::InvalidCm(disc));
        }
    }
    let root = disc.sqrt();
    let mut nu2 = [0.5 * (delta + root), 0.5 * (delta - root)];
    for v in &mut nu2 {
        if *v < 0.0 {
            if *v > -1e-12 * scale.sqrt() {
                *v = 0.0;
            } else {
                return Err(CvqkdError::InvalidCm(*v));
            }
        }
    }
    Ok((nu2[0].sqrt(), nu2[1].sqrt()))
}

/// Entropy of a thermal mode with symplectic eigenvalue `ν ≥ 1`:
/// `h'(ν) = h((ν-1)/2)`.
fn h_of_nu(nu: f64) -> f64 {
    entropic_h(0.5 * (nu.max(1.0) - 1.0))
}

/// Transmitter-receiver mutual information per channel use.
pub fn mutual_info(point: &ChannelPoint, detection: Detection) -> f64 {
    let snr = match detection {
        Detection::Homodyne => point.tau * point.sigma_x2() / point.sigma_z2(),
        Detection::Heterodyne => point.tau * point.sigma_x2() / (1.0 + point.sigma_z2()),
    };
    let info = snr.ln_1p() / LN_2;
    match detection {
        Detection::Homodyne => 0.5 * info,
        Detection::Heterodyne => info,
    }
}

/// Eavesdropper's Holevo information on the receiver's outcome (reverse
/// reconciliation).
///
/// Conditioned on a heterodyne outcome the transmitter mode is left in a
/// single-mode Gaussian state, so one symplectic value
/// `μ - τ(μ²-1)/(b+1)` carries its entropy; the homodyne conditional
/// value is the usual `sqrt(μ² - μτ(μ²-1)/b)`.
pub fn holevo_bound(point: &ChannelPoint, detection: Detection) -> Result<f64, CvqkdError> {
    let cm = shared_cm(point);
    let (nu_plus, nu_minus) = symplectic_eigenvalues(&cm)?;
    let mu = point.mu;
    let tau = point.tau;
    let b = point.b();
    let nu_cond = match detection {
        Detection::Homodyne => (mu * mu - mu * tau * (mu * mu - 1.0) / b).sqrt(),
        Detection::Heterodyne => mu - tau * (mu * mu - 1.0) / (b + 1.0),
    };
    Ok(h_of_nu(nu_plus) + h_of_nu(nu_minus) - h_of_nu(nu_cond))
}

/// A rate that is clamped at zero for reporting but keeps its raw value
/// for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct ClampedRate {
    pub raw: f64,
}

impl ClampedRate {
    pub fn value(&self) -> f64 {
        self.raw.max(0.0)
    }

    pub fn is_clamped(&self) -> bool {
        self.raw < 0.0
    }
}

/// Asymptotic secret-key rate `β I - χ`, clamped at zero.
pub fn asymptotic_rate(
    point: &ChannelPoint,
    beta: f64,
    detection: Detection,
) -> Result<ClampedRate, CvqkdError> {
    let raw = beta * mutual_info(point, detection) - holevo_bound(point, detection)?;
    Ok(ClampedRate { raw })
}

/// Large-modulation limit of the homodyne rate at perfect reconciliation
/// (equals the coherent-state protocol rate over the thermal-loss
/// channel).
pub fn hom_rate_asymptotic(tau: f64, n_bar: f64) -> f64 {
    crate::bounds::coherent_rate(tau, n_bar)
}

/// Large-modulation limit of the heterodyne rate at perfect
/// reconciliation:
/// `log2[τ / (e (1-τ)(n̄+1))] - h(n̄/(1-τ)) + h((n̄+1)/τ - 1)`.
pub fn het_rate_asymptotic(tau: f64, n_bar: f64) -> f64 {
    debug_assert!(tau > 0.0 && tau < 1.0);
    (tau / (std::f64::consts::E * (1.0 - tau) * (n_bar + 1.0))).ln() / LN_2
        - entropic_h(n_bar / (1.0 - tau))
        + entropic_h((n_bar + 1.0) / tau - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;

    fn brute_force_symplectic(cm: &TwoModeCm) -> (f64, f64) {
        // Moduli of the eigenvalues of i·Ω·V through dense 4x4 symmetric
        // eigendecompositions: i·Ω·V is similar to i·V^{1/2}·Ω·V^{1/2},
        // whose square is the negated symmetric matrix -(V^{1/2}ΩV^{1/2})²
        // with eigenvalues ν² (each doubled).
        let v = Matrix4::new(
            cm.a, 0.0, cm.c, 0.0, //
            0.0, cm.a, 0.0, -cm.c, //
            cm.c, 0.0, cm.b, 0.0, //
            0.0, -cm.c, 0.0, cm.b,
        );
        let omega = Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        );
        let eig_v = nalgebra::SymmetricEigen::new(v);
        let mut sqrt_d = Matrix4::zeros();
        for i in 0..4 {
            sqrt_d[(i, i)] = eig_v.eigenvalues[i].sqrt();
        }
        let v_half = eig_v.eigenvectors * sqrt_d * eig_v.eigenvectors.transpose();
        let t = v_half * omega * v_half; // real antisymmetric
        let m2 = -(t * t); // symmetric PSD, eigenvalues ν² twice each
        let sym = 0.5 * (m2 + m2.transpose()); // scrub rounding asymmetry
        let mut nu2: Vec<f64> = nalgebra::SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .map(|&x| x.max(0.0).sqrt())
            .collect();
        nu2.sort_by(|x, y| y.partial_cmp(x).unwrap());
        (nu2[0], nu2[2])
    }

    #[test]
    fn symplectic_vacuum_and_tmsv() {
        let (p, m) = symplectic_eigenvalues(&TwoModeCm { a: 1.0, b: 1.0, c: 0.0 }).unwrap();
        assert!((p - 1.0).abs() < 1e-14 && (m - 1.0).abs() < 1e-14);
        // pure two-mode squeezed vacuum has both eigenvalues at 1
        let mu = 7.3;
        let cm = TwoModeCm { a: mu, b: mu, c: (mu * mu - 1.0_f64).sqrt() };
        let (p, m) = symplectic_eigenvalues(&cm).unwrap();
        assert!((p - 1.0).abs() < 1e-9, "p = {p}");
        assert!((m - 1.0).abs() < 1e-9, "m = {m}");
    }

    #[test]
    fn symplectic_matches_dense_eigensolver() {
        // deterministic pseudo-random physical CMs from channel triples
        let mut worst = 0.0_f64;
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let tau = 0.02 + 0.96 * next();
            let n_bar = 2.0 * next();
            let mu = 1.0 + 60.0 * next();
            let point = ChannelPoint::new(tau, n_bar, mu).unwrap();
            let cm = shared_cm(&point);
            let (p, m) = symplectic_eigenvalues(&cm).unwrap();
            let (bp, bm) = brute_force_symplectic(&cm);
            worst = worst.max((p - bp).abs()).max((m - bm).abs());
            assert!(m >= 1.0 - 1e-12, "physicality violated: {m}");
        }
        assert!(worst < 1e-10, "worst deviation {worst}");
    }

    #[test]
    fn invalid_cm_rejected() {
        // c too large for the diagonal: negative discriminant far past
        // the tolerance
        let cm = TwoModeCm { a: 1.0, b: 1.0, c: 1.8 };
        assert!(matches!(symplectic_eigenvalues(&cm), Err(CvqkdError::InvalidCm(_))));
    }

    #[test]
    fn mutual_info_reference_points() {
        let p = ChannelPoint::new(0.5, 0.01, 1.0).unwrap();
        assert_eq!(mutual_info(&p, Detection::Homodyne), 0.0); // no modulation
        let p = ChannelPoint::new(1e-9, 0.0, 20.0).unwrap();
        assert!(mutual_info(&p, Detection::Heterodyne) < 1e-7); // tau -> 0
        let p = ChannelPoint::new(1.0, 0.0, 3.0).unwrap();
        let want = 0.5 * 3.0_f64.log2();
        assert!((mutual_info(&p, Detection::Homodyne) - want).abs() < 1e-12);
    }

    #[test]
    fn holevo_vanishes_when_eve_decoupled() {
        // lossless noiseless channel: nothing leaks
        let p = ChannelPoint::new(1.0 - 1e-12, 0.0, 25.0).unwrap();
        let chi = holevo_bound(&p, Detection::Homodyne).unwrap();
        assert!(chi.abs() < 1e-6, "chi = {chi}");
        // no modulation: nothing to learn
        let p = ChannelPoint::new(0.5, 0.0, 1.0).unwrap();
        let chi = holevo_bound(&p, Detection::Heterodyne).unwrap();
        assert!(chi.abs() < 1e-9, "chi = {chi}");
    }

    #[test]
    fn holevo_high_modulation_approximation() {
        // ν- ≈ 1 + 2n̄/(1-τ), ν+ ≈ (1-τ)μ to 1% at μ = 1e5
        let tau = 0.4;
        let n_bar = 0.05;
        let p = ChannelPoint::new(tau, n_bar, 1e5).unwrap();
        let cm = shared_cm(&p);
        let (nu_p, nu_m) = symplectic_eigenvalues(&cm).unwrap();
        assert!(((nu_m - (1.0 + 2.0 * n_bar / (1.0 - tau))) / nu_m).abs() < 0.01);
        assert!(((nu_p - (1.0 - tau) * 1e5) / nu_p).abs() < 0.01);
    }

    #[test]
    fn rates_approach_asymptotic_closed_forms() {
        let tau = 0.43;
        let n_bar = 2.4e-3;
        let p = ChannelPoint::new(tau, n_bar, 1e5).unwrap();
        let hom = asymptotic_rate(&p, 1.0, Detection::Homodyne).unwrap().value();
        let want_hom = hom_rate_asymptotic(tau, n_bar);
        assert!(((hom - want_hom) / want_hom).abs() < 0.01, "{hom} vs {want_hom}");
        let het = asymptotic_rate(&p, 1.0, Detection::Heterodyne).unwrap().value();
        let want_het = het_rate_asymptotic(tau, n_bar);
        assert!(((het - want_het) / want_het).abs() < 0.01, "{het} vs {want_het}");
    }

    #[test]
    fn zero_beta_clamps() {
        let p = ChannelPoint::new(0.4, 0.01, 12.0).unwrap();
        let r = asymptotic_rate(&p, 0.0, Detection::Heterodyne).unwrap();
        assert!(r.raw <= 0.0);
        assert!(r.is_clamped());
        assert_eq!(r.value(), 0.0);
    }

    #[test]
    fn rate_degrades_with_noise() {
        let mut prev = f64::INFINITY;
        for n_bar in [0.0, 1e-3, 1e-2, 5e-2] {
            let p = ChannelPoint::new(0.5, n_bar, 30.0).unwrap();
            let r = asymptotic_rate(&p, 0.98, Detection::Heterodyne).unwrap().raw;
            assert!(r <= prev, "rate increased with noise at n̄ = {n_bar}");
            prev = r;
        }
    }

    #[test]
    fn mu_cap_enforced() {
        assert!(matches!(ChannelPoint::new(0.5, 0.0, 1e9), Err(CvqkdError::Mu(_))));
    }
}
