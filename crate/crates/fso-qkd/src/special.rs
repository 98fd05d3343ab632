//! Scalar special functions shared across the crate.
//!
//! Everything is `f64`-only and allocation-free. Modified Bessel functions
//! are provided in the exponentially-scaled form `e^{-x} I_n(x)` so callers
//! can work with arguments in the hundreds without overflow; the inverse
//! error function is a rational estimate polished by Newton steps on the
//! fully-accurate `erf`/`erfc` primitives.

use std::f64::consts::PI;

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function, accurate for large `x` where `1 - erf(x)`
/// would cancel.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Natural log of the Gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln C(n, k)` for real `n ≥ k ≥ 0`, via log-Gamma so that binomials of
/// counts around 1e7..1e9 stay finite.
pub fn ln_binomial(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

// ---------------------------------------------------------------------------
// Inverse error function
// ---------------------------------------------------------------------------

/// Inverse of `erfc` on (0, 2).
///
/// The start value comes from the Acklam rational approximation to the
/// normal quantile; two Newton iterations on `erfc` bring the result to
/// full double precision. Works for arguments down to ~1e-300 (no
/// catastrophic cancellation: the small-argument branch never forms
/// `1 - q`).
pub fn erfc_inv(q: f64) -> f64 {
    assert!(q > 0.0 && q < 2.0, "erfc_inv domain is (0, 2), got {q}");
    if q > 1.0 {
        return -erfc_inv(2.0 - q);
    }
    // erfc(t) = q  <=>  t = -probit(q/2)/sqrt(2)
    let mut t = -probit_acklam(q / 2.0) / std::f64::consts::SQRT_2;
    for _ in 0..3 {
        let err = erfc(t) - q;
        if err == 0.0 {
            break;
        }
        // d erfc/dt = -2/sqrt(pi) e^{-t^2}
        let deriv = -2.0 / PI.sqrt() * (-t * t).exp();
        let step = err / deriv;
        t -= step;
        if step.abs() <= 1e-16 * t.abs().max(1.0) {
            break;
        }
    }
    t
}

/// Inverse error function on (-1, 1).
///
/// For `|y| >= 0.5` the complement `1 - |y|` is exact in IEEE arithmetic
/// (Sterbenz), so the tail is delegated to [`erfc_inv`] without precision
/// loss; the central branch refines with Newton on `erf`.
pub fn erf_inv(y: f64) -> f64 {
    assert!(y > -1.0 && y < 1.0, "erf_inv domain is (-1, 1), got {y}");
    if y < 0.0 {
        return -erf_inv(-y);
    }
    if y >= 0.5 {
        return erfc_inv(1.0 - y);
    }
    let mut t = probit_acklam(0.5 * (y + 1.0)) / std::f64::consts::SQRT_2;
    for _ in 0..3 {
        let err = erf(t) - y;
        if err == 0.0 {
            break;
        }
        let deriv = 2.0 / PI.sqrt() * (-t * t).exp();
        let step = err / deriv;
        t -= step;
        if step.abs() <= 1e-16 * t.abs().max(1e-300) {
            break;
        }
    }
    t
}

/// Acklam's rational approximation to the standard normal quantile,
/// |relative error| < 1.15e-9 over (0, 1). Used only as a Newton seed.
#[allow(clippy::excessive_precision)]
fn probit_acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -probit_acklam(1.0 - p)
    }
}

// ---------------------------------------------------------------------------
// Scaled modified Bessel functions
// ---------------------------------------------------------------------------

/// `e^{-x} I_0(x)` for `x >= 0`.
///
/// Power series below the crossover (all terms positive, no cancellation),
/// Hankel asymptotic expansion above.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 50.0 {
        (-x).exp() * bessel_series(0, x)
    } else {
        bessel_asymptotic(0, x)
    }
}

/// `e^{-x} I_1(x)` for `x >= 0`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 50.0 {
        (-x).exp() * bessel_series(1, x)
    } else {
        bessel_asymptotic(1, x)
    }
}

/// `Λ_n(x) = e^{-2x} I_n(2x)`, the misalignment-shape factor combination.
pub fn lambda_n(order: u8, x: f64) -> f64 {
    match order {
        0 => bessel_i0_scaled(2.0 * x),
        1 => bessel_i1_scaled(2.0 * x),
        _ => panic!("lambda_n supports orders 0 and 1"),
    }
}

/// Ascending series for I_nu, nu = 0 or 1. Converges well below x ~ 60.
fn bessel_series(nu: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    // leading factor (x/2)^nu / nu!
    let mut term = if nu == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu as f64));
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion for `e^{-x} I_nu(x)`, large x.
fn bessel_asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut term = 1.0_f64;
    let mut sum = term;
    for k in 1..30 {
        let kf = k as f64;
        let next = term * ((2.0 * kf - 1.0).powi(2) - mu) / (8.0 * x * kf);
        if next.abs() >= term.abs() {
            break; // divergent tail of the asymptotic series
        }
        term = next;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn scaled_bessel_reference_values() {
        // mpmath, 17 digits
        let cases_i0 = [
            (0.5, 0.64503527044915007),
            (2.0, 0.30850832255367104),
            (10.0, 0.12783333716342861),
            (50.0, 0.056561626647454193),
            (100.0, 0.039944379299096683),
            (500.0, 0.017845706500153167),
        ];
        let cases_i1 = [
            (0.5, 0.1564208031848717),
            (2.0, 0.21526928924893766),
            (10.0, 0.12126268138445552),
            (50.0, 0.0559931238928954),
            (100.0, 0.039744153025130253),
            (500.0, 0.017827851852898056),
        ];
        for (x, want) in cases_i0 {
            assert!(
                rel_close(bessel_i0_scaled(x), want, 1e-13),
                "i0e({x}) = {} want {want}",
                bessel_i0_scaled(x)
            );
        }
        for (x, want) in cases_i1 {
            assert!(
                rel_close(bessel_i1_scaled(x), want, 1e-13),
                "i1e({x}) = {} want {want}",
                bessel_i1_scaled(x)
            );
        }
    }

    #[test]
    fn bessel_branch_crossover_is_continuous() {
        for x in [49.999_f64, 50.0, 50.001, 55.0] {
            let series = (-x).exp() * bessel_series(0, x);
            let asym = bessel_asymptotic(0, x);
            assert!(rel_close(series, asym, 1e-12), "x={x}: {series} vs {asym}");
        }
    }

    #[test]
    fn lambda_ordering() {
        // Λ0(x) > Λ1(x) > 0 for x > 0
        for x in [1e-4, 0.1, 1.0, 5.0, 40.0] {
            let l0 = lambda_n(0, x);
            let l1 = lambda_n(1, x);
            assert!(l0 > l1 && l1 > 0.0, "x={x}: Λ0={l0} Λ1={l1}");
        }
    }

    #[test]
    fn erf_inv_reference_values() {
        let cases = [
            (0.1, 0.088855990494257687),
            (0.5, 0.47693627620446987),
            (0.9, 1.1630871536766741),
            (0.999, 2.3267537655135247),
        ];
        for (y, want) in cases {
            assert!(
                rel_close(erf_inv(y), want, 1e-12),
                "erf_inv({y}) = {} want {want}",
                erf_inv(y)
            );
        }
        assert!((erf_inv(-0.5) + 0.47693627620446987).abs() < 1e-12);
    }

    #[test]
    fn erf_inv_roundtrip_to_1e10() {
        // accuracy requirement on (0, 1 - 1e-16)
        let mut y = 1e-12;
        while y < 1.0 - 1e-16 {
            let x = erf_inv(y);
            let back = erf(x);
            assert!(
                (back - y).abs() <= 1e-10 * y.max(1e-12),
                "roundtrip failed at y={y}: erf(erf_inv)={back}"
            );
            y = if y < 0.9 { y * 3.7 } else { 1.0 - (1.0 - y) / 4.0 };
        }
    }

    #[test]
    fn erfc_inv_deep_tail() {
        for q in [1e-10, 1e-43, 1e-100, 1e-250] {
            let t = erfc_inv(q);
            let back = erfc(t);
            assert!(
                rel_close(back, q, 1e-9),
                "erfc(erfc_inv({q})) = {back}"
            );
        }
    }

    #[test]
    fn ln_binomial_small_counts() {
        assert!((ln_binomial(5.0, 4.0) - 5.0_f64.ln()).abs() < 1e-12);
        assert!((ln_binomial(10.0, 3.0) - 120.0_f64.ln()).abs() < 1e-12);
    }
}
