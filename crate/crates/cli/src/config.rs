//! JSON run configuration with named scenario overlays.
//!
//! A config file is merged key by key over the built-in defaults, then any
//! `--scenario a,b` overlays are merged in order. Unknown keys are errors.
//! CLI units: Hz, degrees, seconds, metres.

use std::collections::BTreeMap;
use std::path::Path;

use odf_core::units::{amu_to_kg, deg_to_rad, hz_to_rad_s};
use odf_core::{
    BeamGeometry, DriftModel, MountGeometry, OdfDrive, PathNoiseModel, ThermalState, TrapIonConfig,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub ion_mass_amu: f64,
    pub omega_com_hz: f64,
    pub n_ions: u32,
    pub crystal_radius_m: f64,
    pub omega_rot_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub delta_ac_hz: f64,
    pub mu_hz: f64,
    pub tau_s: f64,
    pub gamma_per_s: f64,
    pub gamma_raman_per_s: Option<f64>,
    pub gamma_elastic_per_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsSection {
    pub laser_wavelength_m: f64,
    pub theta_odf_deg: f64,
    pub theta_eit_deg: f64,
    pub tilt_error_deg: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSection {
    pub n_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub drift_rate_deg_per_h: f64,
    pub drift_jitter_deg: f64,
    pub drift_duration_s: f64,
    pub drift_dt_s: f64,
    /// Static tilt the probe is calibrated at, degrees.
    pub probe_tilt_deg: f64,
    pub path_slow_amplitude_m: f64,
    pub path_slow_cutoff_hz: f64,
    pub path_fast_amplitude_m: f64,
    pub path_target_rms_m: f64,
    pub path_duration_s: f64,
    pub path_rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub shots: u32,
    pub thermometry_points: usize,
    pub thermometry_half_width_hz: f64,
    pub precession_points: usize,
    pub decay_points: usize,
    pub decay_max_tau_s: f64,
    /// Detunings δ/2π used for force extraction; each runs at τ = 2π/δ.
    pub detunings_hz: Vec<f64>,
    pub theta_list_deg: Vec<f64>,
    pub n_bar_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub trap: TrapSection,
    pub drive: DriveSection,
    pub beams: BeamsSection,
    pub thermal: ThermalSection,
    pub stability: StabilitySection,
    pub scan: ScanSection,
    /// Partial configs merged over the base by `--scenario`.
    pub scenarios: BTreeMap<String, Value>,
}

/// Built-in defaults as JSON, so files and overlays merge against them.
pub fn default_value() -> Value {
    json!({
        "trap": {
            "ion_mass_amu": 9.012,
            "omega_com_hz": 1.1e6,
            "n_ions": 100,
            "crystal_radius_m": 150e-6,
            "omega_rot_hz": 180e3
        },
        "drive": {
            "delta_ac_hz": 5e3,
            "mu_hz": 1.102e6,
            "tau_s": 500e-6,
            "gamma_per_s": 100.0,
            "gamma_raman_per_s": null,
            "gamma_elastic_per_s": null
        },
        "beams": {
            "laser_wavelength_m": 313.1e-9,
            "theta_odf_deg": 28.0,
            "theta_eit_deg": 18.0,
            "tilt_error_deg": 0.0,
            "theta_min_deg": 12.0,
            "theta_max_deg": 36.0
        },
        "thermal": { "n_bar": 1.27 },
        "stability": {
            "drift_rate_deg_per_h": 0.002,
            "drift_jitter_deg": 2e-4,
            "drift_duration_s": 6000.0,
            "drift_dt_s": 10.0,
            "probe_tilt_deg": 1.0,
            "path_slow_amplitude_m": 20e-9,
            "path_slow_cutoff_hz": 0.05,
            "path_fast_amplitude_m": 5e-9,
            "path_target_rms_m": 12e-9,
            "path_duration_s": 300.0,
            "path_rate_hz": 100.0
        },
        "scan": {
            "shots": 500,
            "thermometry_points": 30,
            "thermometry_half_width_hz": 3e3,
            "precession_points": 40,
            "decay_points": 20,
            "decay_max_tau_s": 5e-3,
            "detunings_hz": [2e3],
            "theta_list_deg": [14.0, 16.0, 18.0, 20.0, 22.0, 24.0, 26.0, 28.0],
            "n_bar_list": [0.0, 1.27, 10.7]
        },
        "scenarios": {
            "doppler": { "thermal": { "n_bar": 10.7 } },
            "eit": { "thermal": { "n_bar": 1.27 } },
            "thermometry": {
                "trap": { "n_ions": 30, "omega_com_hz": 1.098e6 },
                "drive": { "delta_ac_hz": 2e3, "tau_s": 200e-6 },
                "beams": { "theta_odf_deg": 14.0 }
            }
        }
    })
}

/// Recursive merge: objects merge per key, everything else replaces.
pub fn merge(base: &mut Value, overlay: &Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

fn decode(value: Value, origin: &str) -> Result<Config, CliError> {
    serde_path_to_error::deserialize(value)
        .map_err(|e| CliError::Input(format!("{origin}: at `{}`: {}", e.path(), e.inner())))
}

impl Config {
    /// Defaults, overlaid by `path` (if any) and then by each scenario.
    pub fn load(path: Option<&Path>, scenarios: &[String]) -> Result<Self, CliError> {
        let mut value = default_value();
        let origin = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                let file: Value = serde_json::from_str(&text)
                    .map_err(|e| CliError::Input(format!("{}: invalid JSON: {e}", p.display())))?;
                // type-check the file on its own so errors name the file's keys
                let mut probe = default_value();
                merge(&mut probe, &file);
                decode(probe, &p.display().to_string())?;
                merge(&mut value, &file);
                p.display().to_string()
            }
            None => "built-in defaults".to_string(),
        };
        let base = decode(value.clone(), &origin)?;
        for name in scenarios {
            let overlay = base.scenarios.get(name).ok_or_else(|| {
                let known: Vec<&str> = base.scenarios.keys().map(String::as_str).collect();
                CliError::Input(format!(
                    "unknown scenario `{name}` (known: {})",
                    known.join(", ")
                ))
            })?;
            merge(&mut value, overlay);
            decode(value.clone(), &format!("{origin}, scenario `{name}`"))?;
        }
        let cfg = decode(value, &origin)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// A copy with further scenarios applied.
    pub fn with_scenarios(&self, names: &[&str]) -> Result<Self, CliError> {
        let mut value = serde_json::to_value(self).expect("config serialises");
        for name in names {
            let overlay = self
                .scenarios
                .get(*name)
                .ok_or_else(|| CliError::Input(format!("unknown scenario `{name}`")))?;
            merge(&mut value, overlay);
        }
        let cfg = decode(value, "scenario overlay")?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.trap_config().validate().map_err(CliError::from)?;
        self.drive().validate().map_err(CliError::from)?;
        self.geometry().validate().map_err(CliError::from)?;
        ThermalState::new(self.thermal.n_bar).map_err(CliError::from)?;
        if self.scan.shots == 0 {
            return Err(CliError::Input("scan.shots must be >= 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical (sorted-key, compact) JSON form.
    pub fn digest(&self) -> String {
        let canonical =
            serde_json::to_string(&serde_json::to_value(self).expect("config serialises"))
                .expect("value serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn trap_config(&self) -> TrapIonConfig {
        TrapIonConfig {
            ion_mass: amu_to_kg(self.trap.ion_mass_amu),
            omega_com: hz_to_rad_s(self.trap.omega_com_hz),
            n_ions: self.trap.n_ions,
            crystal_radius: self.trap.crystal_radius_m,
            omega_rot: hz_to_rad_s(self.trap.omega_rot_hz),
        }
    }

    pub fn drive(&self) -> OdfDrive {
        let d = &self.drive;
        let base = OdfDrive {
            delta_ac: hz_to_rad_s(d.delta_ac_hz),
            mu: hz_to_rad_s(d.mu_hz),
            tau: d.tau_s,
            gamma: d.gamma_per_s,
            gamma_raman: None,
            gamma_elastic: None,
        };
        match (d.gamma_raman_per_s, d.gamma_elastic_per_s) {
            (Some(r), Some(e)) => base.with_scattering(r, e),
            _ => base,
        }
    }

    pub fn geometry(&self) -> BeamGeometry {
        BeamGeometry {
            laser_wavelength: self.beams.laser_wavelength_m,
            theta_odf: deg_to_rad(self.beams.theta_odf_deg),
            theta_eit: deg_to_rad(self.beams.theta_eit_deg),
            tilt_error: deg_to_rad(self.beams.tilt_error_deg),
        }
    }

    pub fn mount(&self) -> MountGeometry {
        MountGeometry {
            theta_min_deg: self.beams.theta_min_deg,
            theta_max_deg: self.beams.theta_max_deg,
            ..Default::default()
        }
    }

    pub fn thermal(&self) -> ThermalState {
        ThermalState {
            n_bar: self.thermal.n_bar,
        }
    }

    pub fn drift_model(&self, seed: u64) -> DriftModel {
        DriftModel {
            linear_rate: self.stability.drift_rate_deg_per_h,
            rms_jitter: self.stability.drift_jitter_deg,
            seed,
        }
    }

    pub fn path_noise_model(&self, seed: u64) -> PathNoiseModel {
        let s = &self.stability;
        PathNoiseModel {
            slow_amplitude: s.path_slow_amplitude_m,
            slow_cutoff: s.path_slow_cutoff_hz,
            fast_amplitude: s.path_fast_amplitude_m,
            target_rms: s.path_target_rms_m,
            seed,
        }
    }
}
