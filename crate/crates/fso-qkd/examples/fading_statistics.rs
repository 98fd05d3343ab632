//! The fading channel in detail: misalignment shape parameters, the
//! transmissivity density and its survival function, and a Monte Carlo
//! cross-check of the analytic statistics.
//!
//! ```bash
//! cargo run --release --example fading_statistics
//! ```

use fso_qkd::beam::{Curvature, LinkGeometry};
use fso_qkd::fading::{eta_deflected_exact, FadingModel};
use fso_qkd::oracle::fading_ks_run;
use fso_qkd::turbulence::{cn2_hufnagel_valley, short_long_term, TurbulenceInput};

fn main() {
    let geom = LinkGeometry::new(
        800e-9, 630.0, 30.0, 0.05, Curvature::Collimated, Some(0.10), 0.05,
    )
    .unwrap();
    let cn2 = cn2_hufnagel_valley(30.0, 57.0, 2.75e-14);
    let turb = short_long_term(&geom, TurbulenceInput::StructureConstant(cn2), 1e-6);
    let fading =
        FadingModel::new(geom.rx_aperture, turb.w_st, turb.sigma, 0.5 * 0.99686, turb.regime)
            .unwrap();

    println!("day-time link at 630 m:");
    println!("  eta (max transmissivity) = {:.5}", fading.eta);
    println!("  shape gamma = {:.4}, scale r0 = {:.2} mm", fading.gamma, fading.r0 * 1e3);
    println!("  wander sigma = {:.2} mm\n", fading.sigma * 1e3);

    println!("misalignment transmissivity, exact vs shape approximation:");
    println!("{:>9} {:>12} {:>12} {:>10}", "r [mm]", "exact", "approx", "rel err");
    for i in 0..=6 {
        let r = 0.05 * i as f64 / 6.0;
        let exact = eta_deflected_exact(r, geom.rx_aperture, turb.w_st);
        let approx = fading.eta_st * (-(r / fading.r0).powf(fading.gamma)).exp();
        println!(
            "{:>9.1} {:>12.6} {:>12.6} {:>10.2e}",
            r * 1e3,
            exact,
            approx,
            ((approx - exact) / exact).abs()
        );
    }

    println!("\ntransmissivity distribution:");
    println!("{:>12} {:>14} {:>14}", "tau/eta", "density", "P(tau >= t)");
    for f in [0.5, 0.8, 0.9, 0.95, 0.99, 0.999] {
        let t = f * fading.eta;
        println!("{:>12.3} {:>14.4e} {:>14.6}", f, fading.density(t), fading.prob_above(t));
    }

    let norm = fading.average(|_| 1.0);
    println!("\nnormalization of the density (quadrature): {norm:.9}");

    let run = fading_ks_run(&fading, 7, 1_000_000);
    println!(
        "Kolmogorov-Smirnov distance, 1e6 sampled centroids vs analytic CDF: {:.5}",
        run.value
    );
}
