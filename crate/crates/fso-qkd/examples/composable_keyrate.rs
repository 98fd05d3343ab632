//! Composable finite-size key rates along the day-time link, optimized
//! over modulation and post-selection threshold, against collective and
//! general attacks — with the thermal upper bound for scale.
//!
//! ```bash
//! cargo run --release --example composable_keyrate
//! ```

use fso_qkd::bounds::thermal_upper;
use fso_qkd::environment::eta_atm;
use fso_qkd::estimation::{pilot_worst_case_noise, EstimationConfig};
use fso_qkd::fading::FadingModel;
use fso_qkd::finite_size::{composite_epsilon, optimize_rate, ProtocolConfig};
use fso_qkd::scenario::Scenario;
use fso_qkd::turbulence::{short_long_term, TurbulenceInput};

fn main() {
    let scenario = Scenario::day();
    let cn2 = scenario.cn2();
    // background photons per mode for this receiver in cloudy day-light
    let n_bar = 0.5 * 4.8e-3;

    let coll = ProtocolConfig::collective_default();
    let gen = ProtocolConfig::general_default();
    println!(
        "collective config: N = {:.0e}, pilots {:.0e}, eps = {:.3e}",
        coll.n_total,
        coll.m,
        composite_epsilon(&coll).eps
    );
    println!(
        "general config:    p_ec = {}, eps = {:.3e}, energy-test fraction {}\n",
        gen.p_ec,
        composite_epsilon(&gen).eps,
        gen.f_et
    );

    println!(
        "{:>7} {:>10} | {:>11} {:>8} {:>9} | {:>11} {:>11} | {:>9}",
        "z [m]", "UB [bit]", "R_coll", "mu*", "th*/eta", "R_gen", "eps'", "UB/R"
    );
    for z in [200.0, 300.0, 400.0, 500.0, 600.0, 800.0, 1000.0] {
        let geom = scenario.geometry().at_distance(z);
        let turb = short_long_term(
            &geom,
            TurbulenceInput::StructureConstant(cn2),
            scenario.pointing_jitter,
        );
        let atm = eta_atm(&scenario.extinction, geom.altitude, z);
        let fading =
            FadingModel::new(geom.rx_aperture, turb.w_st, turb.sigma, 0.5 * atm, turb.regime)
                .unwrap();

        let noise_wc = |cfg: &ProtocolConfig| {
            pilot_worst_case_noise(
                &EstimationConfig {
                    m: cfg.m,
                    eps_pe: cfg.eps_pe,
                    detection: cfg.detection,
                    pilot_energy: 1e6,
                },
                n_bar,
            )
        };

        let oc = optimize_rate(&coll, &fading, noise_wc(&coll)).unwrap();
        let og = optimize_rate(&gen, &fading, noise_wc(&gen)).unwrap();
        let ub = thermal_upper(&fading, n_bar);
        let (mu, th) = oc.argmax.unwrap_or((f64::NAN, f64::NAN));
        let eps_prime = og
            .breakdown
            .and_then(|b| b.epsilon.eps_prime)
            .unwrap_or(f64::NAN);
        println!(
            "{:>7.0} {:>10.4} | {:>11.5} {:>8.1} {:>9.5} | {:>11.5} {:>11.3e} | {:>9.2}",
            z,
            ub,
            oc.rate,
            mu,
            th / fading.eta,
            og.rate,
            eps_prime,
            ub / oc.rate
        );
    }
    println!("\nThe optimized composable rate tracks the ultimate thermal bound within one order");
    println!("of magnitude until the weak-turbulence horizon shuts the day-time link down.");
}
