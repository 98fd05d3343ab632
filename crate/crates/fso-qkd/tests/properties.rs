//! Property tests over randomized link configurations.

use fso_qkd::beam::{spot_size, Curvature, LinkGeometry};
use fso_qkd::bounds::{
    entropic_h, loss_bound, plob, plob_thermal, thermal_lower, thermal_upper,
};
use fso_qkd::cvqkd::{shared_cm, symplectic_eigenvalues, ChannelPoint};
use fso_qkd::fading::FadingModel;
use fso_qkd::turbulence::{short_long_term, TurbulenceInput};
use proptest::prelude::*;

fn geometry(z: f64, waist: f64, a_r: f64) -> LinkGeometry {
    LinkGeometry::new(800e-9, z, 30.0, waist, Curvature::Collimated, None, a_r).unwrap()
}

fn fading_for(z: f64, waist: f64, a_r: f64, cn2: f64, jitter: f64) -> Option<FadingModel> {
    let geom = geometry(z, waist, a_r);
    let st = short_long_term(&geom, TurbulenceInput::StructureConstant(cn2), jitter);
    FadingModel::new(a_r, st.w_st, st.sigma, 0.5, st.regime).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spot_size_never_shrinks_collimated(
        z1 in 0.0..5000.0_f64,
        dz in 0.0..5000.0_f64,
        waist in 0.005..0.2_f64,
    ) {
        let g1 = geometry(z1, waist, 0.05);
        let g2 = geometry(z1 + dz, waist, 0.05);
        prop_assert!(spot_size(&g2) >= spot_size(&g1) - 1e-15);
    }

    #[test]
    fn transmissivities_stay_in_unit_interval(
        z in 10.0..3000.0_f64,
        waist in 0.01..0.1_f64,
        a_r in 0.005..0.3_f64,
        cn2 in 1e-16..5e-14_f64,
        jitter in 1e-8..5e-6_f64,
    ) {
        if let Some(m) = fading_for(z, waist, a_r, cn2, jitter) {
            prop_assert!(m.eta > 0.0 && m.eta <= 1.0);
            prop_assert!(m.eta_st > 0.0 && m.eta_st < 1.0);
            // survival function is a probability and decreasing
            let p_mid = m.prob_above(0.5 * m.eta);
            let p_hi = m.prob_above(0.9 * m.eta);
            prop_assert!((0.0..=1.0).contains(&p_mid));
            prop_assert!(p_hi <= p_mid + 1e-15);
        }
    }

    #[test]
    fn bound_ordering_holds_everywhere(
        z in 50.0..1200.0_f64,
        a_r in 0.01..0.15_f64,
        cn2 in 1e-15..3e-14_f64,
        jitter in 1e-7..3e-6_f64,
        n_bar in 0.0..0.02_f64,
    ) {
        if let Some(m) = fading_for(z, 0.05, a_r, cn2, jitter) {
            let loss = loss_bound(&m);
            let ub = thermal_upper(&m, n_bar);
            let lb = thermal_lower(&m, n_bar);
            prop_assert!(lb <= ub + 1e-9, "LB {lb} > UB {ub}");
            prop_assert!(ub <= loss + 1e-9, "UB {ub} > loss {loss}");
            prop_assert!(lb >= 0.0 && ub >= 0.0);
            // the no-wander capacity caps the faded one
            prop_assert!(loss <= plob(m.eta) + 1e-9);
        }
    }

    #[test]
    fn thermal_plob_below_lossless_plob(
        tau in 0.01..0.99_f64,
        n_bar in 0.0..0.5_f64,
    ) {
        let thermal = plob_thermal(tau, n_bar);
        prop_assert!(thermal >= 0.0);
        prop_assert!(thermal <= plob(tau) + 1e-12);
    }

    #[test]
    fn entropic_h_monotone_nonnegative(x in 0.0..50.0_f64, dx in 0.0..10.0_f64) {
        prop_assert!(entropic_h(x) >= 0.0);
        prop_assert!(entropic_h(x + dx) >= entropic_h(x) - 1e-12);
    }

    #[test]
    fn channel_states_are_physical(
        tau in 0.001..1.0_f64,
        n_bar in 0.0..3.0_f64,
        mu in 1.0..1000.0_f64,
    ) {
        let point = ChannelPoint::new(tau, n_bar, mu).unwrap();
        let (nu_p, nu_m) = symplectic_eigenvalues(&shared_cm(&point)).unwrap();
        prop_assert!(nu_m >= 1.0 - 1e-12, "nu- = {nu_m}");
        prop_assert!(nu_p >= nu_m);
    }

    #[test]
    fn slot_probabilities_partition(
        z in 100.0..1000.0_f64,
        slots in 2usize..40,
    ) {
        if let Some(m) = fading_for(z, 0.05, 0.05, 2.06e-14, 1e-6) {
            let step = m.eta / slots as f64;
            let mut total = 0.0;
            for k in 1..=slots {
                let hi = if k == slots { m.eta } else { k as f64 * step };
                total += m.slot_probability((k - 1) as f64 * step, hi);
            }
            prop_assert!((total - 1.0).abs() < 1e-9, "sum = {total}");
        }
    }
}
