//! Capacity bounds along the link: the night-time loss capacity and the
//! day-time thermal sandwich, plus the wandering correction factor that
//! separates them from the no-fading ceiling.
//!
//! ```bash
//! cargo run --release --example capacity_bounds
//! ```

use fso_qkd::bounds::{delta_correction, loss_bound, thermal_sandwich};
use fso_qkd::environment::{eta_atm, n_background, ExtinctionModel, NoiseModel};
use fso_qkd::fading::FadingModel;
use fso_qkd::scenario::Scenario;
use fso_qkd::turbulence::{short_long_term, TurbulenceInput};

fn main() {
    for scenario in [Scenario::night(), Scenario::day()] {
        let ext = ExtinctionModel::clear_800nm();
        let cn2 = scenario.cn2();
        println!("== {} (Cn² = {cn2:.3e}, B = {:.1e})", scenario.name, scenario.sky_brightness);
        println!(
            "{:>8} {:>9} {:>9} {:>11} {:>11} {:>11} {:>22}",
            "z [m]", "eta", "delta", "loss [bit]", "UB [bit]", "LB [bit]", "regime"
        );
        for z in [100.0, 200.0, 400.0, 630.0, 800.0, 1000.0] {
            let geom = scenario.geometry().at_distance(z);
            let turb = short_long_term(
                &geom,
                TurbulenceInput::StructureConstant(cn2),
                scenario.pointing_jitter,
            );
            let atm = eta_atm(&ext, geom.altitude, z);
            let noise = NoiseModel {
                sky_brightness: scenario.sky_brightness,
                filter_nm: 1.0,
                gate: 10e-9,
                fov: 1e-10,
                rx_aperture: geom.rx_aperture,
                eta_eff: 0.5,
                n_ex: 0.0,
            };
            let n_bar = 0.5 * n_background(&noise, geom.wavelength);
            let fading = FadingModel::new(
                geom.rx_aperture,
                turb.w_st,
                turb.sigma,
                0.5 * atm,
                turb.regime,
            )
            .unwrap();
            let sandwich = thermal_sandwich(&fading, n_bar);
            println!(
                "{:>8.0} {:>9.4} {:>9.5} {:>11.5} {:>11.5} {:>11.5} {:>22}",
                z,
                fading.eta,
                delta_correction(&fading),
                loss_bound(&fading),
                sandwich.upper,
                sandwich.lower,
                turb.regime.as_str(),
            );
        }
        println!();
    }
    println!("Night-time noise is negligible, so the sandwich collapses onto the loss bound;");
    println!("day-time it opens up and eventually pinches the capacity to zero.");
}
