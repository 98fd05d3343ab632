//! Deterministic adaptive quadrature.
//!
//! A 15-point Gauss-Kronrod rule drives a globally-adaptive bisection
//! scheme: the segment with the largest error estimate is split until the
//! summed error meets the requested tolerance. Everything is sequential
//! and seed-free, so repeated runs are bit-identical.

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

const MAX_SEGMENTS: usize = 4096;

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol` (with an
/// absolute floor `abs_tol`).
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, abs_error: 0.0, converged: true };
    }

    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }

    let eval = |lo: f64, hi: f64| {
        let (value, error) = gk15(&f, lo, hi);
        Seg { a: lo, b: hi, value, error }
    };

    // start from a uniform pre-split so narrow features cannot hide
    // between the nodes of a single panel
    const PRESPLIT: usize = 8;
    let mut segs: Vec<Seg> = (0..PRESPLIT)
        .map(|i| {
            let lo = a + (b - a) * i as f64 / PRESPLIT as f64;
            let hi = a + (b - a) * (i + 1) as f64 / PRESPLIT as f64;
            eval(lo, hi)
        })
        .collect();
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if err <= tol {
            return QuadResult { value: total, abs_error: err, converged: true };
        }
        if segs.len() >= MAX_SEGMENTS {
            return QuadResult { value: total, abs_error: err, converged: false };
        }
        // split the worst segment (first index wins ties: deterministic)
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            if s.error > segs[worst].error {
                worst = i;
            }
        }
        let Seg { a: lo, b: hi, .. } = segs[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine precision
            let total: f64 = segs.iter().map(|s| s.value).sum();
            let err: f64 = segs.iter().map(|s| s.error).sum();
            return QuadResult { value: total, abs_error: err, converged: err <= tol };
        }
        segs[worst] = eval(lo, mid);
        segs.push(eval(mid, hi));
    }
}

/// Convenience wrapper returning only the value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    adaptive(f, a, b, rel_tol, 1e-300).value
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.abs();

    let mut fv = [0.0_f64; 15];
    fv[7] = f_center;

    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for (j, &w) in WGK.iter().enumerate().take(7) {
        res_asc += w * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    // QUADPACK error rescaling
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}
