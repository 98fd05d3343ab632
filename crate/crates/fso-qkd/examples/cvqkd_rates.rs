//! Asymptotic CV-QKD rates at a fixed channel point: mutual information,
//! Holevo leakage, and the modulation dependence for homodyne and
//! heterodyne readout.
//!
//! ```bash
//! cargo run --release --example cvqkd_rates
//! ```

use fso_qkd::cvqkd::{
    asymptotic_rate, het_rate_asymptotic, holevo_bound, hom_rate_asymptotic, mutual_info,
    shared_cm, symplectic_eigenvalues, ChannelPoint, Detection,
};

fn main() {
    let tau = 0.43;
    let n_bar = 2.4e-3;
    let beta = 0.98;

    println!("thermal-loss channel: tau = {tau}, n_bar = {n_bar}, beta = {beta}\n");
    println!(
        "{:>8} {:>10} {:>10} {:>10} | {:>10} {:>10} {:>10}",
        "mu", "I_hom", "chi_hom", "R_hom", "I_het", "chi_het", "R_het"
    );
    for mu in [2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1000.0, 1e5] {
        let p = ChannelPoint::new(tau, n_bar, mu).unwrap();
        let row: Vec<f64> = [Detection::Homodyne, Detection::Heterodyne]
            .iter()
            .flat_map(|&d| {
                vec![
                    mutual_info(&p, d),
                    holevo_bound(&p, d).unwrap(),
                    asymptotic_rate(&p, beta, d).unwrap().value(),
                ]
            })
            .collect();
        println!(
            "{:>8.0} {:>10.4} {:>10.4} {:>10.4} | {:>10.4} {:>10.4} {:>10.4}",
            mu, row[0], row[1], row[2], row[3], row[4], row[5]
        );
    }

    println!(
        "\nlarge-modulation closed forms at beta = 1: hom {:.4}, het {:.4} bits/use",
        hom_rate_asymptotic(tau, n_bar),
        het_rate_asymptotic(tau, n_bar)
    );

    let p = ChannelPoint::new(tau, n_bar, 20.0).unwrap();
    let cm = shared_cm(&p);
    let (nu_p, nu_m) = symplectic_eigenvalues(&cm).unwrap();
    println!(
        "\nshared state at mu = 20: CM (a, b, c) = ({:.3}, {:.3}, {:.3}), nu± = ({:.4}, {:.6})",
        cm.a, cm.b, cm.c, nu_p, nu_m
    );
}
