//! Gaussian-beam geometry: spot-size propagation, Rayleigh range, Fresnel
//! number products, and the diffraction-limited transmissivity and rate
//! bounds of a line-of-sight optical link.
//!
//! Spot sizes are *field* spot sizes (1/e radius of the field amplitude,
//! 1/e² of intensity) throughout.

use std::f64::consts::LN_2;

use thiserror::Error;

/// Wavefront curvature at the transmitter.
///
/// Collimated beams get an explicit variant instead of a large sentinel
/// radius, so `(1 - z/R0)` never suffers catastrophic cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curvature {
    Collimated,
    /// Finite phase-front radius of curvature in meters (positive =
    /// convergent, negative = divergent). Zero is rejected.
    Radius(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("wavelength must be positive, got {0}")]
    Wavelength(f64),
    #[error("distance must be nonnegative, got {0}")]
    Distance(f64),
    #[error("altitude must be nonnegative, got {0}")]
    Altitude(f64),
    #[error("beam waist must be positive, got {0}")]
    Waist(f64),
    #[error("receiver aperture must be positive, got {0}")]
    RxAperture(f64),
    #[error("curvature radius of zero is undefined")]
    ZeroCurvature,
}

/// Geometry of a single line-of-sight link. All lengths in meters.
#[derive(Debug, Clone, Copy)]
pub struct LinkGeometry {
    /// Carrier wavelength.
    pub wavelength: f64,
    /// Propagation distance transmitter -> receiver.
    pub distance: f64,
    /// Common altitude of the two stations above sea level.
    pub altitude: f64,
    /// Field spot size of the beam at the transmitter.
    pub waist: f64,
    /// Phase-front curvature at the transmitter.
    pub curvature: Curvature,
    /// Transmitter aperture radius, if known. Only used for the
    /// "aperture at least twice the waist" advisory check.
    pub tx_aperture: Option<f64>,
    /// Receiver aperture radius.
    pub rx_aperture: f64,
}

impl LinkGeometry {
    pub fn new(
        wavelength: f64,
        distance: f64,
        altitude: f64,
        waist: f64,
        curvature: Curvature,
        tx_aperture: Option<f64>,
        rx_aperture: f64,
    ) -> Result<Self, GeometryError> {
        // NaN inputs must fail every gate, hence the negated forms
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        {
            if !(wavelength > 0.0) {
                return Err(GeometryError::Wavelength(wavelength));
            }
            if !(distance >= 0.0) {
                return Err(GeometryError::Distance(distance));
            }
            if !(altitude >= 0.0) {
                return Err(GeometryError::Altitude(altitude));
            }
            if !(waist > 0.0) {
                return Err(GeometryError::Waist(waist));
            }
            if !(rx_aperture > 0.0) {
                return Err(GeometryError::RxAperture(rx_aperture));
            }
        }
        if curvature == Curvature::Radius(0.0) {
            return Err(GeometryError::ZeroCurvature);
        }
        Ok(Self { wavelength, distance, altitude, waist, curvature, tx_aperture, rx_aperture })
    }

    /// Optical wavenumber `k = 2π/λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Same geometry at a different propagation distance.
    pub fn at_distance(&self, z: f64) -> Self {
        Self { distance: z, ..*self }
    }

    /// Same geometry with a different receiver aperture.
    pub fn with_rx_aperture(&self, a_r: f64) -> Self {
        Self { rx_aperture: a_r, ..*self }
    }

    /// True when the transmitter aperture is known to be too small to
    /// keep its own truncation of the Gaussian profile negligible; the
    /// safe choice is an aperture of at least twice the waist.
    pub fn tx_aperture_undersized(&self) -> bool {
        matches!(self.tx_aperture, Some(a_t) if a_t < 2.0 * self.waist)
    }
}

/// Rayleigh range `z_R = π w0² / λ`, the near/far-field crossover scale.
pub fn rayleigh_range(geom: &LinkGeometry) -> f64 {
    std::f64::consts::PI * geom.waist * geom.waist / geom.wavelength
}

/// Field spot size after propagating `geom.distance`:
/// `w_z² = w0²[(1 - z/R0)² + (z/z_R)²]`, with the first bracket equal to 1
/// for a collimated beam.
pub fn spot_size(geom: &LinkGeometry) -> f64 {
    let z = geom.distance;
    let zr = rayleigh_range(geom);
    let curvature_term = match geom.curvature {
        Curvature::Collimated => 1.0,
        Curvature::Radius(r0) => 1.0 - z / r0,
    };
    geom.waist * (curvature_term * curvature_term + (z / zr) * (z / zr)).sqrt()
}

/// Diffraction-limited transmissivity of a sharp circular receiver
/// aperture: `η_d = 1 - exp(-2 a_R²/w_z²)`.
pub fn eta_diffraction(geom: &LinkGeometry) -> f64 {
    let w = spot_size(geom);
    1.0 - (-2.0 * geom.rx_aperture * geom.rx_aperture / (w * w)).exp()
}

/// Fresnel number product of beam and receiver,
/// `f_0R = [π w0 a_R / (λ z)]²`. Requires `z > 0`.
pub fn fresnel_product(geom: &LinkGeometry) -> f64 {
    assert!(geom.distance > 0.0, "Fresnel product needs a positive distance");
    let v = std::f64::consts::PI * geom.waist * geom.rx_aperture
        / (geom.wavelength * geom.distance);
    v * v
}

/// Diffraction-limited upper bound on secret bits per mode for the
/// geometry as configured: `(2/ln2) (a_R/w_z)²`.
pub fn diffraction_bound(geom: &LinkGeometry) -> f64 {
    let w = spot_size(geom);
    2.0 / LN_2 * (geom.rx_aperture / w) * (geom.rx_aperture / w)
}

/// The same bound for the optimal focused beam (`R0 = z`), which reduces
/// to `2 f_0R / ln 2`.
pub fn diffraction_bound_focused(geom: &LinkGeometry) -> f64 {
    2.0 * fresnel_product(geom) / LN_2
}

/// The same bound for a collimated beam, any distance:
/// `(2/ln2) a_R² / (w0² [1 + z²/z_R²])`.
pub fn diffraction_bound_collimated(geom: &LinkGeometry) -> f64 {
    let zr = rayleigh_range(geom);
    let z = geom.distance;
    2.0 / LN_2 * geom.rx_aperture * geom.rx_aperture
        / (geom.waist * geom.waist * (1.0 + z * z / (zr * zr)))
}
