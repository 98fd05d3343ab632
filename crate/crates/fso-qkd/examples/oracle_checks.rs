//! The validation oracles at work: geometric overlap quadrature against
//! the Weber-integral transmissivity, and estimator coverage against its
//! confidence target.
//!
//! ```bash
//! cargo run --release --example oracle_checks
//! ```

use fso_qkd::cvqkd::{ChannelPoint, Detection};
use fso_qkd::estimation::EstimationConfig;
use fso_qkd::fading::eta_deflected_exact;
use fso_qkd::oracle::{estimator_coverage, overlap_oracle};

fn main() {
    let (a_r, w_st) = (0.05, 0.0505);
    println!("displaced-beam transmissivity, Weber integral vs polar quadrature:");
    println!("{:>9} {:>14} {:>14} {:>10}", "r [mm]", "weber", "quadrature", "rel diff");
    for i in 0..=6 {
        let r = 0.15 * i as f64 / 6.0;
        let weber = eta_deflected_exact(r, a_r, w_st);
        let quad = overlap_oracle(r, a_r, w_st, 1601);
        println!(
            "{:>9.1} {:>14.6e} {:>14.6e} {:>10.1e}",
            r * 1e3,
            weber,
            quad,
            ((weber - quad) / weber.max(1e-300)).abs()
        );
    }

    println!("\nworst-case noise coverage (eps_pe = 1e-2, m = 400, 100k trials):");
    let cfg = EstimationConfig {
        m: 400.0,
        eps_pe: 1e-2,
        detection: Detection::Heterodyne,
        pilot_energy: 1e6,
    };
    let point = ChannelPoint::new(0.43, 2.4e-3, 20.0).unwrap();
    let run = estimator_coverage(&cfg, &point, 2024, 100_000);
    println!(
        "  failure frequency {:.5} ± {:.5}  (must stay at or below the 1e-2 target)",
        run.value, run.ci95
    );
}
