//! Turbulence quantities for the night and day profiles: structure
//! constant, coherence length, Rytov variance with its weak-turbulence
//! horizon, and the short/long-term spot sizes along the path.
//!
//! ```bash
//! cargo run --release --example turbulence_profile
//! ```

use fso_qkd::beam::{Curvature, LinkGeometry};
use fso_qkd::turbulence::{
    cn2_hufnagel_valley, coherence_length, rytov_variance, short_long_term, TurbulenceInput,
};

fn horizon(cn2: f64, wavelength: f64) -> f64 {
    // root of the Rytov variance hitting 1, by bisection
    let (mut lo, mut hi) = (1.0, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rytov_variance(cn2, wavelength, mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn main() {
    let geom = LinkGeometry::new(
        800e-9, 630.0, 30.0, 0.05, Curvature::Collimated, Some(0.10), 0.05,
    )
    .unwrap();

    for (label, wind, ground) in [("night", 21.0, 1.7e-14), ("day", 57.0, 2.75e-14)] {
        let cn2 = cn2_hufnagel_valley(geom.altitude, wind, ground);
        println!("== {label}: Cn² = {cn2:.3e} m^-2/3 at h = {} m", geom.altitude);
        println!(
            "   weak-turbulence horizon (rytov = 1): {:.0} m",
            horizon(cn2, geom.wavelength)
        );
        println!(
            "{:>8} {:>10} {:>10} {:>10} {:>10} {:>12} {:>22}",
            "z [m]", "rho0 [cm]", "rytov", "w_st [cm]", "w_lt [cm]", "sigma [mm]", "regime"
        );
        for z in [100.0, 200.0, 400.0, 630.0, 1000.0, 1500.0] {
            let g = geom.at_distance(z);
            let st = short_long_term(&g, TurbulenceInput::StructureConstant(cn2), 1e-6);
            println!(
                "{:>8.0} {:>10.3} {:>10.4} {:>10.4} {:>10.4} {:>12.3} {:>22}",
                z,
                coherence_length(cn2, g.wavelength, z) * 100.0,
                st.rytov_var,
                st.w_st * 100.0,
                st.w_lt * 100.0,
                st.sigma * 1000.0,
                st.regime.as_str(),
            );
        }
        println!();
    }
}
