//! Diffraction-only link budget: spot size, aperture transmissivity, and
//! the distance-dependent rate ceiling for collimated vs focused beams.
//!
//! ```bash
//! cargo run --release --example beam_budget
//! ```

use fso_qkd::beam::{
    diffraction_bound_collimated, diffraction_bound_focused, eta_diffraction, fresnel_product,
    rayleigh_range, spot_size, Curvature, LinkGeometry,
};

fn main() {
    let geom = LinkGeometry::new(
        800e-9, // wavelength
        0.0,    // distance placeholder, varied below
        30.0,   // altitude
        0.05,   // waist
        Curvature::Collimated,
        Some(0.10),
        0.05, // receiver aperture
    )
    .unwrap();

    println!("800 nm collimated beam, w0 = a_R = 5 cm");
    println!("Rayleigh range: {:.1} m\n", rayleigh_range(&geom));

    println!(
        "{:>9} {:>10} {:>10} {:>12} {:>14} {:>14}",
        "z [m]", "w_z [cm]", "eta_d", "f_0R", "U_coll [bit]", "U_foc [bit]"
    );
    for z in [100.0, 300.0, 1000.0, 3000.0, 9817.0, 30000.0, 100000.0] {
        let g = geom.at_distance(z);
        println!(
            "{:>9.0} {:>10.3} {:>10.6} {:>12.4e} {:>14.5} {:>14.5}",
            z,
            spot_size(&g) * 100.0,
            eta_diffraction(&g),
            fresnel_product(&g),
            diffraction_bound_collimated(&g),
            diffraction_bound_focused(&g),
        );
    }
    println!("\nFocusing always wins, but only matters once z approaches the Rayleigh range.");
}
