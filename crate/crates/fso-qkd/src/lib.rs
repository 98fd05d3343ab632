//! Free-space optical quantum link modelling.
//!
//! This crate computes what a line-of-sight optical quantum channel can
//! deliver: the beam geometry and diffraction loss, atmospheric
//! extinction and background thermal noise, turbulence-induced fading
//! statistics, ultimate secret-key and entanglement capacity bounds, and
//! composable finite-size CV-QKD key rates for pilot-guided
//! coherent-state protocols. Every analytic result has an independent
//! Monte Carlo or brute-force oracle in [`oracle`] and the test suite.
//!
//! The crate is a library first: see the `examples/` directory for one
//! runnable walkthrough per capability (beam budgets, turbulence
//! profiles, fading statistics, capacity bounds, aperture trade-offs,
//! CV-QKD rates, composable key rates, scenario pipelines). A thin CLI
//! binary (`fso-qkd`) exposes the scenario pipeline as `run`, `validate`
//! and `presets` subcommands producing plot-ready CSV.
//!
//! ```
//! use fso_qkd::beam::{Curvature, LinkGeometry};
//! use fso_qkd::turbulence::{short_long_term, TurbulenceInput};
//! use fso_qkd::fading::FadingModel;
//! use fso_qkd::bounds;
//!
//! // 800 nm collimated beam, 5 cm optics, 500 m day-time link
//! let geom = LinkGeometry::new(
//!     800e-9, 500.0, 30.0, 0.05, Curvature::Collimated, Some(0.10), 0.05,
//! ).unwrap();
//! let cn2 = fso_qkd::turbulence::cn2_hufnagel_valley(30.0, 57.0, 2.75e-14);
//! let turb = short_long_term(&geom, TurbulenceInput::StructureConstant(cn2), 1e-6);
//! let fading = FadingModel::new(
//!     geom.rx_aperture, turb.w_st, turb.sigma, 0.5, turb.regime,
//! ).unwrap();
//! let capacity = bounds::loss_bound(&fading);
//! assert!(capacity > 0.5 && capacity < 1.5);
//! ```

pub mod beam;
pub mod bounds;
pub mod cvqkd;
pub mod environment;
pub mod estimation;
pub mod fading;
pub mod finite_size;
pub mod oracle;
pub mod quad;
pub mod scenario;
pub mod special;
pub mod turbulence;

pub use beam::{Curvature, LinkGeometry};
pub use bounds::BoundResult;
pub use cvqkd::{ChannelPoint, Detection};
pub use environment::{ExtinctionModel, NoiseModel};
pub use fading::FadingModel;
pub use finite_size::{Attack, ProtocolConfig};
pub use scenario::Scenario;
pub use turbulence::{TurbulenceRegime, TurbulenceState};
