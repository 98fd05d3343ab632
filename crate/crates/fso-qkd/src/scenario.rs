//! Scenario ingestion, sweep evaluation, and CSV emission.
//!
//! Scenarios are flat `key = value` text with dotted section prefixes and
//! units carried in the key names (`geometry.distance_m`,
//! `noise.gate_ns`), chosen for diff-friendliness over nested formats.
//! Two presets (`night`, `day`) expand to a complete 800 nm / 5 cm link
//! description that individual keys may then override.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::beam::{self, Curvature, LinkGeometry};
use crate::bounds;
use crate::cvqkd::Detection;
use crate::environment::{self, ExtinctionModel, NoiseModel};
use crate::estimation::{pilot_worst_case_noise, EstimationConfig};
use crate::fading::FadingModel;
use crate::finite_size::{
    collective_rate_threshold, general_attack_rate, lattice_rate, optimize_rate, Attack,
    ProtocolConfig,
};
use crate::oracle;
use crate::turbulence::{self, short_long_term, TurbulenceInput, TurbulenceRegime};

/// CSV schema identifier emitted in run summaries; bump when columns
/// change.
pub const CSV_SCHEMA: &str = "v1";

// ---------------------------------------------------------------------------
// Scenario description
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Link distance, m.
    Distance,
    /// Receiver aperture radius, m.
    RxAperture,
    /// Modulation variance (dimensionless).
    Modulation,
    /// Threshold transmissivity as a fraction of the maximum.
    ThresholdFraction,
    /// Lattice slot count.
    LatticeSlots,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::Distance => "z",
            SweepVariable::RxAperture => "a_r",
            SweepVariable::Modulation => "mu",
            SweepVariable::ThresholdFraction => "eta_th",
            SweepVariable::LatticeSlots => "m_slots",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.from];
        }
        (0..self.points)
            .map(|i| self.from + (self.to - self.from) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// Per-protocol evaluation settings layered on the finite-size config.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolSettings {
    pub config: ProtocolConfig,
    /// Fixed modulation used when the sweep pins the other knob.
    pub mu: f64,
    /// Fixed threshold fraction used when the sweep pins the other knob.
    pub eta_th_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    // geometry
    pub wavelength: f64,
    pub distance: f64,
    pub altitude: f64,
    pub waist: f64,
    pub curvature: Curvature,
    pub tx_aperture: Option<f64>,
    pub rx_aperture: f64,
    // environment
    pub extinction: ExtinctionModel,
    pub sky_brightness: f64,
    /// Direct background photons per mode at the configured aperture;
    /// bypasses the radiance formula and rescales with the aperture area
    /// when the aperture is swept.
    pub background_photons: Option<f64>,
    pub filter_nm: f64,
    pub gate: f64,
    pub fov: f64,
    pub eta_eff: f64,
    pub n_ex: f64,
    // turbulence
    pub cn2_override: Option<f64>,
    pub hv_ground: f64,
    pub wind: f64,
    pub pointing_jitter: f64,
    // accounting
    pub trusted_setup: bool,
    pub collective: ProtocolSettings,
    pub general: ProtocolSettings,
    // sweep + output
    pub sweep: Sweep,
    pub output: Option<String>,
    pub oracle_check: bool,
    pub oracle_samples: u64,
}

impl Scenario {
    /// Night-time preset: clear sky, low wind, distance sweep to 2 km.
    pub fn night() -> Self {
        Self::preset_base("night", 1e-6, 1.7e-14, 21.0, 2000.0)
    }

    /// Day-time preset: cloudy-sky radiance, high wind, distance sweep
    /// capped near the weak-turbulence horizon (1 km).
    pub fn day() -> Self {
        Self::preset_base("day", 1e-1, 2.75e-14, 57.0, 1000.0)
    }

    fn preset_base(name: &str, brightness: f64, hv_ground: f64, wind: f64, z_max: f64) -> Self {
        let collective = ProtocolSettings {
            config: ProtocolConfig::collective_default(),
            mu: 20.0,
            eta_th_fraction: 0.8,
        };
        let general = ProtocolSettings {
            config: ProtocolConfig::general_default(),
            mu: 20.0,
            eta_th_fraction: 0.8,
        };
        Scenario {
            name: name.to_string(),
            wavelength: 800e-9,
            distance: 630.0,
            altitude: 30.0,
            waist: 0.05,
            curvature: Curvature::Collimated,
            tx_aperture: Some(0.10),
            rx_aperture: 0.05,
            extinction: ExtinctionModel::clear_800nm(),
            sky_brightness: brightness,
            background_photons: None,
            filter_nm: 1.0,
            gate: 10e-9,
            fov: 1e-10,
            eta_eff: 0.5,
            n_ex: 0.0,
            cn2_override: None,
            hv_ground,
            wind,
            pointing_jitter: 1e-6,
            trusted_setup: false,
            collective,
            general,
            sweep: Sweep { variable: SweepVariable::Distance, from: 50.0, to: z_max, points: 40 },
            output: None,
            oracle_check: false,
            oracle_samples: 100_000,
        }
    }

    /// Structure constant at the configured altitude.
    pub fn cn2(&self) -> f64 {
        self.cn2_override
            .unwrap_or_else(|| turbulence::cn2_hufnagel_valley(self.altitude, self.wind, self.hv_ground))
    }

    pub fn geometry(&self) -> LinkGeometry {
        LinkGeometry {
            wavelength: self.wavelength,
            distance: self.distance,
            altitude: self.altitude,
            waist: self.waist,
            curvature: self.curvature,
            tx_aperture: self.tx_aperture,
            rx_aperture: self.rx_aperture,
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("scenario invariant violated: {0}")]
    Invariant(String),
}

impl Scenario {
    /// Parse scenario text. A `preset = night|day` line (anywhere) is
    /// applied first; every other key then overrides it in file order.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut preset: Option<(&str, usize, usize)> = None;
        for (idx, raw) in text.lines().enumerate() {
            if let Some((key, value, col)) = split_line(raw, idx + 1)? {
                if key == "preset" {
                    if let Some((prev, line, _)) = preset {
                        if prev != value {
                            return Err(ScenarioError::Parse {
                                line: idx + 1,
                                col,
                                message: format!(
                                    "conflicting presets {prev:?} (line {line}) and {value:?}"
                                ),
                            });
                        }
                    }
                    preset = Some((value, idx + 1, col));
                }
            }
        }
        let mut scenario = match preset {
            None => Scenario::night(),
            Some(("night", _, _)) => Scenario::night(),
            Some(("day", _, _)) => Scenario::day(),
            Some((other, line, col)) => {
                return Err(ScenarioError::Parse {
                    line,
                    col,
                    message: format!("unknown preset {other:?} (expected night or day)"),
                })
            }
        };

        for (idx, raw) in text.lines().enumerate() {
            let Some((key, value, vcol)) = split_line(raw, idx + 1)? else { continue };
            if key == "preset" {
                continue;
            }
            scenario
                .apply(key, value)
                .map_err(|message| ScenarioError::Parse { line: idx + 1, col: vcol, message })?;
        }
        scenario.check()?;
        Ok(scenario)
    }

    fn check(&self) -> Result<(), ScenarioError> {
        LinkGeometry::new(
            self.wavelength,
            self.distance,
            self.altitude,
            self.waist,
            self.curvature,
            self.tx_aperture,
            self.rx_aperture,
        )
        .map_err(|e| ScenarioError::Invariant(e.to_string()))?;
        if !(self.eta_eff > 0.0 && self.eta_eff <= 1.0) {
            return Err(ScenarioError::Invariant(format!(
                "noise.eta_eff must be in (0, 1], got {}",
                self.eta_eff
            )));
        }
        if self.sweep.points == 0 {
            return Err(ScenarioError::Invariant("sweep.points must be at least 1".into()));
        }
        if self.sweep.variable == SweepVariable::LatticeSlots
            && (self.sweep.from < 2.0 || self.sweep.to < 2.0)
        {
            return Err(ScenarioError::Invariant("lattice sweeps need at least 2 slots".into()));
        }
        Ok(())
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        let f = || -> Result<f64, String> {
            value.parse::<f64>().map_err(|_| format!("expected a number, got {value:?}"))
        };
        let b = || -> Result<bool, String> {
            match value {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(format!("expected true or false, got {value:?}")),
            }
        };
        let det = || -> Result<Detection, String> {
            match value {
                "het" => Ok(Detection::Heterodyne),
                "hom" => Ok(Detection::Homodyne),
                _ => Err(format!("expected het or hom, got {value:?}")),
            }
        };
        match key {
            "geometry.wavelength_m" => self.wavelength = f()?,
            "geometry.wavelength_um" => self.wavelength = f()? * 1e-6,
            "geometry.wavelength_nm" => self.wavelength = f()? * 1e-9,
            "geometry.distance_m" => self.distance = f()?,
            "geometry.distance_km" => self.distance = f()? * 1e3,
            "geometry.altitude_m" => self.altitude = f()?,
            "geometry.altitude_km" => self.altitude = f()? * 1e3,
            "geometry.waist_m" => self.waist = f()?,
            "geometry.waist_cm" => self.waist = f()? * 1e-2,
            "geometry.waist_mm" => self.waist = f()? * 1e-3,
            "geometry.rx_aperture_m" => self.rx_aperture = f()?,
            "geometry.rx_aperture_cm" => self.rx_aperture = f()? * 1e-2,
            "geometry.rx_aperture_mm" => self.rx_aperture = f()? * 1e-3,
            "geometry.tx_aperture_m" => self.tx_aperture = Some(f()?),
            "geometry.tx_aperture_cm" => self.tx_aperture = Some(f()? * 1e-2),
            "geometry.collimated" => {
                if b()? {
                    self.curvature = Curvature::Collimated;
                }
            }
            "geometry.curvature_m" => self.curvature = Curvature::Radius(f()?),
            "extinction.alpha0_per_m" => self.extinction.alpha0 = f()?,
            "extinction.scale_height_m" => self.extinction.scale_height = f()?,
            "extinction.scale_height_km" => self.extinction.scale_height = f()? * 1e3,
            "noise.sky_brightness" => self.sky_brightness = f()?,
            "noise.background_photons" => self.background_photons = Some(f()?),
            "noise.filter_nm" => self.filter_nm = f()?,
            "noise.gate_ns" => self.gate = f()? * 1e-9,
            "noise.gate_s" => self.gate = f()?,
            "noise.fov_sr" => self.fov = f()?,
            "noise.eta_eff" => self.eta_eff = f()?,
            "noise.n_ex" => self.n_ex = f()?,
            "turbulence.cn2" => self.cn2_override = Some(f()?),
            "turbulence.hv_a" => self.hv_ground = f()?,
            "turbulence.wind_mps" => self.wind = f()?,
            "turbulence.pointing_urad" => self.pointing_jitter = f()? * 1e-6,
            "turbulence.pointing_rad" => self.pointing_jitter = f()?,
            "trusted_setup" => self.trusted_setup = b()?,
            "sweep.variable" => {
                self.sweep.variable = match value {
                    "z" => SweepVariable::Distance,
                    "a_r" => SweepVariable::RxAperture,
                    "mu" => SweepVariable::Modulation,
                    "eta_th" => SweepVariable::ThresholdFraction,
                    "m_slots" => SweepVariable::LatticeSlots,
                    _ => return Err(format!("unknown sweep variable {value:?}")),
                }
            }
            "sweep.from" => self.sweep.from = f()?,
            "sweep.from_m" => self.sweep.from = f()?,
            "sweep.from_km" => self.sweep.from = f()? * 1e3,
            "sweep.from_cm" => self.sweep.from = f()? * 1e-2,
            "sweep.to" => self.sweep.to = f()?,
            "sweep.to_m" => self.sweep.to = f()?,
            "sweep.to_km" => self.sweep.to = f()? * 1e3,
            "sweep.to_cm" => self.sweep.to = f()? * 1e-2,
            "sweep.points" => {
                self.sweep.points =
                    value.parse::<usize>().map_err(|_| format!("expected a count, got {value:?}"))?
            }
            "output.path" => self.output = Some(value.to_string()),
            "oracle.check" => self.oracle_check = b()?,
            "oracle.samples" => {
                self.oracle_samples =
                    value.parse::<u64>().map_err(|_| format!("expected a count, got {value:?}"))?
            }
            _ => {
                if let Some(rest) = key.strip_prefix("collective.") {
                    return apply_protocol(&mut self.collective, rest, f, b, det);
                }
                if let Some(rest) = key.strip_prefix("general.") {
                    return apply_protocol(&mut self.general, rest, f, b, det);
                }
                return Err(format!("unknown key {key:?}"));
            }
        }
        Ok(())
    }
}

fn apply_protocol(
    settings: &mut ProtocolSettings,
    key: &str,
    f: impl Fn() -> Result<f64, String>,
    b: impl Fn() -> Result<bool, String>,
    det: impl Fn() -> Result<Detection, String>,
) -> Result<(), String> {
    let cfg = &mut settings.config;
    match key {
        "n_total" => cfg.n_total = f()?,
        "m" => cfg.m = f()?,
        "m_fraction" => cfg.m = f()? * cfg.n_total,
        "alphabet" => cfg.d = f()?,
        "beta" => cfg.beta = f()?,
        "p_ec" => cfg.p_ec = f()?,
        "eps_s" => cfg.eps_s = f()?,
        "eps_h" => cfg.eps_h = f()?,
        "eps_cor" => cfg.eps_cor = f()?,
        "eps_pe" => cfg.eps_pe = f()?,
        "f_et" => cfg.f_et = f()?,
        "d_t" => cfg.d_t = Some(f()?),
        "d_r" => cfg.d_r = Some(f()?),
        "detection" => cfg.detection = det()?,
        "pilot" => cfg.pilot = b()?,
        "mu_max" => cfg.mu_max = f()?,
        "mu" => settings.mu = f()?,
        "eta_th_fraction" => settings.eta_th_fraction = f()?,
        _ => return Err(format!("unknown protocol key {key:?}")),
    }
    Ok(())
}

/// Split one line into `(key, value, value_column)`; `None` for blanks
/// and comments.
fn split_line(raw: &str, line: usize) -> Result<Option<(&str, &str, usize)>, ScenarioError> {
    let content = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    if content.trim().is_empty() {
        return Ok(None);
    }
    let eq = content.find('=').ok_or(ScenarioError::Parse {
        line,
        col: content.len() - content.trim_start().len() + 1,
        message: "expected `key = value`".into(),
    })?;
    let key = content[..eq].trim();
    let value_raw = &content[eq + 1..];
    let value = value_raw.trim();
    if key.is_empty() || value.is_empty() {
        return Err(ScenarioError::Parse {
            line,
            col: eq + 1,
            message: "expected `key = value`".into(),
        });
    }
    let vcol = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
    Ok(Some((key, value, vcol)))
}

/// Canonical text of the named preset, round-trippable through
/// [`Scenario::parse`].
pub fn preset_text(name: &str) -> Option<String> {
    let s = match name {
        "night" => Scenario::night(),
        "day" => Scenario::day(),
        _ => return None,
    };
    let mut t = String::new();
    let _ = writeln!(t, "# {} link preset: 800 nm collimated beam, 5 cm optics", s.name);
    let _ = writeln!(t, "preset = {}", s.name);
    let _ = writeln!(t);
    let _ = writeln!(t, "geometry.wavelength_nm = 800");
    let _ = writeln!(t, "geometry.waist_cm = 5");
    let _ = writeln!(t, "geometry.rx_aperture_cm = 5");
    let _ = writeln!(t, "geometry.tx_aperture_cm = 10");
    let _ = writeln!(t, "geometry.altitude_m = 30");
    let _ = writeln!(t, "geometry.distance_m = 630");
    let _ = writeln!(t, "geometry.collimated = true");
    let _ = writeln!(t);
    let _ = writeln!(t, "extinction.alpha0_per_m = 5e-6");
    let _ = writeln!(t, "extinction.scale_height_m = 6600");
    let _ = writeln!(t);
    let _ = writeln!(t, "turbulence.hv_a = {:e}", s.hv_ground);
    let _ = writeln!(t, "turbulence.wind_mps = {}", s.wind);
    let _ = writeln!(t, "turbulence.pointing_urad = 1");
    let _ = writeln!(t);
    let _ = writeln!(t, "noise.sky_brightness = {:e}", s.sky_brightness);
    let _ = writeln!(t, "noise.filter_nm = 1");
    let _ = writeln!(t, "noise.gate_ns = 10");
    let _ = writeln!(t, "noise.fov_sr = 1e-10");
    let _ = writeln!(t, "noise.eta_eff = 0.5");
    let _ = writeln!(t, "noise.n_ex = 0");
    let _ = writeln!(t);
    let _ = writeln!(t, "collective.n_total = 5e7");
    let _ = writeln!(t, "collective.m_fraction = 0.15");
    let _ = writeln!(t, "collective.alphabet = 32");
    let _ = writeln!(t, "collective.beta = 0.98");
    let _ = writeln!(t, "collective.p_ec = 0.9");
    let _ = writeln!(t, "collective.eps_s = 1.1641532182693481e-10   # 2^-33");
    let _ = writeln!(t, "collective.eps_h = 1.1641532182693481e-10");
    let _ = writeln!(t, "collective.eps_cor = 1.1641532182693481e-10");
    let _ = writeln!(t, "collective.eps_pe = 1.1641532182693481e-10");
    let _ = writeln!(t, "collective.detection = het");
    let _ = writeln!(t, "collective.pilot = true");
    let _ = writeln!(t);
    let _ = writeln!(t, "general.p_ec = 0.1");
    let _ = writeln!(t, "general.eps_s = 1e-43");
    let _ = writeln!(t, "general.eps_h = 1e-43");
    let _ = writeln!(t, "general.eps_cor = 1e-43");
    let _ = writeln!(t, "general.eps_pe = 1e-43");
    let _ = writeln!(t, "general.f_et = 0.9");
    let _ = writeln!(t);
    let _ = writeln!(t, "sweep.variable = z");
    let _ = writeln!(t, "sweep.from_m = {}", s.sweep.from);
    let _ = writeln!(t, "sweep.to_m = {}", s.sweep.to);
    let _ = writeln!(t, "sweep.points = {}", s.sweep.points);
    Some(t)
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// All intermediate quantities at one sweep point.
#[derive(Debug, Clone, Copy)]
pub struct LinkPoint {
    pub sweep_value: f64,
    pub eta_d: f64,
    pub eta_st: f64,
    pub eta: f64,
    pub sigma: f64,
    pub rytov: f64,
    pub n_bar: f64,
    pub regime: TurbulenceRegime,
    pub delta: f64,
    pub loss_bound: f64,
    pub thermal_upper: f64,
    pub thermal_lower: f64,
    pub rate_collective: f64,
    pub rate_general: f64,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub mc_ks: Option<f64>,
}

/// Channel-level quantities shared by the bound and rate computations.
pub struct ChannelSnapshot {
    pub geometry: LinkGeometry,
    pub turbulence: turbulence::TurbulenceState,
    pub eta_atm: f64,
    pub n_bar_background: f64,
    pub n_bar: f64,
    pub fading: FadingModel,
}

/// Build the channel snapshot for the scenario at the given geometry
/// (sweeps pass modified geometries).
pub fn channel_snapshot(
    scenario: &Scenario,
    geom: &LinkGeometry,
) -> Result<ChannelSnapshot, ScenarioError> {
    let turb = short_long_term(
        geom,
        TurbulenceInput::StructureConstant(scenario.cn2()),
        scenario.pointing_jitter,
    );
    let eta_atm = environment::eta_atm(&scenario.extinction, geom.altitude, geom.distance);
    let noise = NoiseModel {
        sky_brightness: scenario.sky_brightness,
        filter_nm: scenario.filter_nm,
        gate: scenario.gate,
        fov: scenario.fov,
        rx_aperture: geom.rx_aperture,
        eta_eff: scenario.eta_eff,
        n_ex: scenario.n_ex,
    };
    let n_bar_background = match scenario.background_photons {
        Some(nb) => {
            let ratio = geom.rx_aperture / scenario.rx_aperture;
            nb * ratio * ratio
        }
        None => environment::n_background(&noise, geom.wavelength),
    };
    // Trusted-setup accounting keeps the receiver losses and its own noise
    // out of the channel: only the path transmissivity faces the
    // eavesdropper, while the detected background is attenuated the same
    // way in both models.
    let (eta_path, n_bar) = if scenario.trusted_setup {
        (eta_atm, scenario.eta_eff * n_bar_background)
    } else {
        (scenario.eta_eff * eta_atm, scenario.eta_eff * n_bar_background + scenario.n_ex)
    };
    let fading = FadingModel::new(geom.rx_aperture, turb.w_st, turb.sigma, eta_path, turb.regime)
        .map_err(|e| ScenarioError::Invariant(e.to_string()))?;
    Ok(ChannelSnapshot {
        geometry: *geom,
        turbulence: turb,
        eta_atm,
        n_bar_background,
        n_bar,
        fading,
    })
}

fn worst_case_noise(settings: &ProtocolSettings, n_bar: f64) -> f64 {
    let est = EstimationConfig {
        m: settings.config.m,
        eps_pe: settings.config.eps_pe,
        detection: settings.config.detection,
        pilot_energy: 1e6,
    };
    pilot_worst_case_noise(&est, n_bar)
}

fn composable_rates(
    scenario: &Scenario,
    snap: &ChannelSnapshot,
    sweep: SweepVariable,
    value: f64,
    allow_strong: bool,
) -> (f64, f64, f64, f64) {
    let mut coll = scenario.collective;
    coll.config.attack = Attack::Collective;
    coll.config.allow_strong = allow_strong;
    let mut gen = scenario.general;
    gen.config.attack = Attack::General;
    gen.config.allow_strong = allow_strong;
    let eps = crate::finite_size::composite_epsilon(&coll.config).eps;
    let n_wc_coll = worst_case_noise(&coll, snap.n_bar);
    let n_wc_gen = worst_case_noise(&gen, snap.n_bar);
    let eta = snap.fading.eta;

    let (rate_c, rate_g, eps_prime) = match sweep {
        SweepVariable::Distance | SweepVariable::RxAperture => {
            let rc = optimize_rate(&coll.config, &snap.fading, n_wc_coll)
                .map(|o| o.rate)
                .unwrap_or(0.0);
            let og = optimize_rate(&gen.config, &snap.fading, n_wc_gen).ok();
            let rg = og.as_ref().map(|o| o.rate).unwrap_or(0.0);
            let ep = og
                .as_ref()
                .and_then(|o| o.breakdown.as_ref())
                .and_then(|b| b.epsilon.eps_prime)
                .unwrap_or(f64::NAN);
            (rc, rg, ep)
        }
        SweepVariable::Modulation => {
            let rc = collective_rate_threshold(
                &coll.config,
                &snap.fading,
                n_wc_coll,
                value,
                coll.eta_th_fraction * eta,
            );
            let rg = general_attack_rate(
                &gen.config,
                &snap.fading,
                n_wc_gen,
                value,
                gen.eta_th_fraction * eta,
            );
            let ep = rg.as_ref().ok().and_then(|b| b.epsilon.eps_prime).unwrap_or(f64::NAN);
            (rc.map(|b| b.value()).unwrap_or(0.0), rg.map(|b| b.value()).unwrap_or(0.0), ep)
        }
        SweepVariable::ThresholdFraction => {
            let rc = collective_rate_threshold(
                &coll.config,
                &snap.fading,
                n_wc_coll,
                coll.mu,
                value * eta,
            );
            let rg =
                general_attack_rate(&gen.config, &snap.fading, n_wc_gen, gen.mu, value * eta);
            let ep = rg.as_ref().ok().and_then(|b| b.epsilon.eps_prime).unwrap_or(f64::NAN);
            (rc.map(|b| b.value()).unwrap_or(0.0), rg.map(|b| b.value()).unwrap_or(0.0), ep)
        }
        SweepVariable::LatticeSlots => {
            let slots = value.round().max(2.0) as usize;
            let rc = lattice_rate(&coll.config, &snap.fading, n_wc_coll, coll.mu, slots)
                .unwrap_or(0.0);
            let rg = lattice_rate(&gen.config, &snap.fading, n_wc_gen, gen.mu, slots)
                .unwrap_or(0.0);
            // lattice security is dominated by the most populated slot;
            // report the threshold-equivalent blow-up at the top slot
            let top = general_attack_rate(
                &gen.config,
                &snap.fading,
                n_wc_gen,
                gen.mu,
                eta * (slots as f64 - 1.0) / slots as f64,
            );
            let ep = top.ok().and_then(|b| b.epsilon.eps_prime).unwrap_or(f64::NAN);
            (rc, rg, ep)
        }
    };
    (rate_c, rate_g, eps, eps_prime)
}

/// Evaluate one sweep point.
pub fn evaluate_point(
    scenario: &Scenario,
    value: f64,
    allow_strong: bool,
    seed: u64,
    index: usize,
) -> Result<LinkPoint, ScenarioError> {
    let mut geom = scenario.geometry();
    match scenario.sweep.variable {
        SweepVariable::Distance => geom.distance = value,
        SweepVariable::RxAperture => geom.rx_aperture = value,
        _ => {}
    }
    let snap = channel_snapshot(scenario, &geom)?;
    let delta = bounds::delta_correction(&snap.fading);
    let loss = bounds::loss_bound(&snap.fading);
    let sandwich = bounds::thermal_sandwich(&snap.fading, snap.n_bar);
    let (rate_c, rate_g, eps, eps_prime) =
        composable_rates(scenario, &snap, scenario.sweep.variable, value, allow_strong);
    let mc_ks = scenario.oracle_check.then(|| {
        oracle::fading_ks_run(
            &snap.fading,
            seed.wrapping_add(index as u64),
            scenario.oracle_samples,
        )
        .value
    });
    Ok(LinkPoint {
        sweep_value: value,
        eta_d: beam::eta_diffraction(&geom),
        eta_st: snap.fading.eta_st,
        eta: snap.fading.eta,
        sigma: snap.fading.sigma,
        rytov: snap.turbulence.rytov_var,
        n_bar: snap.n_bar,
        regime: snap.turbulence.regime,
        delta,
        loss_bound: loss,
        thermal_upper: sandwich.upper,
        thermal_lower: sandwich.lower,
        rate_collective: rate_c,
        rate_general: rate_g,
        epsilon: eps,
        epsilon_prime: eps_prime,
        mc_ks,
    })
}

// ---------------------------------------------------------------------------
// Run and validate
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(
        "strong turbulence at sweep point {index} ({variable} = {value}): \
         rytov variance {rytov:.3} breaches the weak-regime condition; \
         pass --override-regime to evaluate anyway"
    )]
    Regime { index: usize, variable: &'static str, value: f64, rytov: f64 },
}

pub struct RunOutput {
    pub csv: String,
    pub points: Vec<LinkPoint>,
    pub warnings: Vec<String>,
}

fn scenario_warnings(scenario: &Scenario) -> Vec<String> {
    let mut warnings = Vec::new();
    if scenario.geometry().tx_aperture_undersized() {
        warnings.push(format!(
            "transmitter aperture {:.4} m is below twice the waist ({:.4} m); \
             its own diffraction is not negligible",
            scenario.tx_aperture.unwrap_or(0.0),
            2.0 * scenario.waist
        ));
    }
    warnings
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Evaluate the sweep and render the CSV artifact. Deterministic for a
/// fixed `(scenario, seed)` regardless of thread count.
pub fn run_scenario(
    scenario: &Scenario,
    override_regime: bool,
    seed: u64,
) -> Result<RunOutput, RunError> {
    let values = scenario.sweep.values();
    let points: Result<Vec<LinkPoint>, ScenarioError> = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| evaluate_point(scenario, v, override_regime, seed, i))
        .collect();
    let points = points?;

    if !override_regime {
        if let Some((index, p)) =
            points.iter().enumerate().find(|(_, p)| p.regime == TurbulenceRegime::Strong)
        {
            return Err(RunError::Regime {
                index,
                variable: scenario.sweep.variable.as_str(),
                value: p.sweep_value,
                rytov: p.rytov,
            });
        }
    }

    let mut csv = String::new();
    csv.push_str(
        "sweep_variable,sweep_value,eta_d,eta_st,eta,sigma_m,delta,loss_bound,\
         thermal_upper,thermal_lower,rate_collective,rate_general,epsilon,epsilon_prime,regime",
    );
    if scenario.oracle_check {
        csv.push_str(",mc_ks");
    }
    csv.push_str("\r\n");
    for p in &points {
        let mut row = vec![
            scenario.sweep.variable.as_str().to_string(),
            fmt17(p.sweep_value),
            fmt17(p.eta_d),
            fmt17(p.eta_st),
            fmt17(p.eta),
            fmt17(p.sigma),
            fmt17(p.delta),
            fmt17(p.loss_bound),
            fmt17(p.thermal_upper),
            fmt17(p.thermal_lower),
            fmt17(p.rate_collective),
            fmt17(p.rate_general),
            fmt17(p.epsilon),
            fmt17(p.epsilon_prime),
            p.regime.as_str().to_string(),
        ];
        if let Some(ks) = p.mc_ks {
            row.push(fmt17(ks));
        }
        csv.push_str(&row.join(","));
        csv.push_str("\r\n");
    }

    Ok(RunOutput { csv, points, warnings: scenario_warnings(scenario) })
}

/// Human-readable run summary.
pub fn summarize(scenario: &Scenario, out: &RunOutput) -> String {
    let mut counts = [0usize; 4];
    for p in &out.points {
        let i = match p.regime {
            TurbulenceRegime::WeakYura => 0,
            TurbulenceRegime::WeakNumericalWarn => 1,
            TurbulenceRegime::NegligibleWander => 2,
            TurbulenceRegime::Strong => 3,
        };
        counts[i] += 1;
    }
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {} ({} sweep, {} points, schema {})",
        scenario.name, scenario.sweep.variable.as_str(), out.points.len(), CSV_SCHEMA);
    let _ = writeln!(
        s,
        "regimes: weak-yura {}, weak-numerical-warn {}, negligible-wander {}, strong {}",
        counts[0], counts[1], counts[2], counts[3]
    );
    for w in &out.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

/// Validation report: typed-input checks and per-point regime
/// classification, no rates.
pub struct ValidationReport {
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub strong_points: Vec<usize>,
}

pub fn validate_scenario(scenario: &Scenario) -> Result<ValidationReport, ScenarioError> {
    let mut lines = Vec::new();
    let warnings = scenario_warnings(scenario);
    let mut strong_points = Vec::new();
    for (i, v) in scenario.sweep.values().iter().enumerate() {
        let mut geom = scenario.geometry();
        match scenario.sweep.variable {
            SweepVariable::Distance => geom.distance = *v,
            SweepVariable::RxAperture => geom.rx_aperture = *v,
            _ => {}
        }
        let snap = channel_snapshot(scenario, &geom)?;
        if snap.turbulence.regime == TurbulenceRegime::Strong {
            strong_points.push(i);
        }
        lines.push(format!(
            "point {i}: {} = {:.6e}  regime={}  rytov={:.4e}  eta={:.4e}  sigma={:.3e} m",
            scenario.sweep.variable.as_str(),
            v,
            snap.turbulence.regime.as_str(),
            snap.turbulence.rytov_var,
            snap.fading.eta,
            snap.fading.sigma,
        ));
    }
    Ok(ValidationReport { lines, warnings, strong_points })
}
