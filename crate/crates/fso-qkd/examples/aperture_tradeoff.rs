//! Receiver-aperture trade-off in day-light: a larger telescope catches
//! more beam but also more sky, so the thermal upper bound peaks at an
//! intermediate aperture.
//!
//! ```bash
//! cargo run --release --example aperture_tradeoff
//! ```

use fso_qkd::bounds::thermal_sandwich;
use fso_qkd::environment::eta_atm;
use fso_qkd::fading::FadingModel;
use fso_qkd::scenario::Scenario;
use fso_qkd::turbulence::{short_long_term, TurbulenceInput};

fn main() {
    let scenario = Scenario::day();
    let z = 630.0;
    let cn2 = scenario.cn2();
    let atm = eta_atm(&scenario.extinction, scenario.altitude, z);
    // background photons quoted for the 5 cm receiver, scaled with area
    let n_ref = 0.5 * 4.8e-3;

    println!("day-time link at {z} m, aperture sweep:");
    println!("{:>10} {:>10} {:>12} {:>12} {:>12}", "a_R [cm]", "eta", "n_bar", "UB [bit]", "LB [bit]");
    let mut best = (0.0_f64, 0.0_f64);
    for i in 0..29 {
        let a_r = 0.01 + (0.15 - 0.01) * i as f64 / 28.0;
        let geom = scenario.geometry().at_distance(z).with_rx_aperture(a_r);
        let turb = short_long_term(
            &geom,
            TurbulenceInput::StructureConstant(cn2),
            scenario.pointing_jitter,
        );
        let n_bar = n_ref * (a_r / 0.05) * (a_r / 0.05);
        let fading =
            FadingModel::new(a_r, turb.w_st, turb.sigma, 0.5 * atm, turb.regime).unwrap();
        let s = thermal_sandwich(&fading, n_bar);
        if s.upper > best.1 {
            best = (a_r, s.upper);
        }
        println!(
            "{:>10.2} {:>10.4} {:>12.4e} {:>12.5} {:>12.5}",
            a_r * 100.0,
            fading.eta,
            n_bar,
            s.upper,
            s.lower
        );
    }
    println!("\noptimal aperture ≈ {:.1} cm (upper bound {:.4} bits/use)", best.0 * 100.0, best.1);
}
