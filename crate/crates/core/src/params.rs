//! Configuration values shared by every module, plus the three elementary
//! operations on them: detuning, ground-state extent and thermal extent.

use crate::error::{Error, Result};
use crate::units::{amu_to_kg, hz_to_rad_s, BE9_MASS_AMU, HBAR};

/// The trapped-ion substrate: species mass, COM mode and crystal size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapIonConfig {
    /// Ion mass, kg.
    pub ion_mass: f64,
    /// Axial centre-of-mass mode frequency, rad/s.
    pub omega_com: f64,
    pub n_ions: u32,
    /// Crystal radius, m.
    pub crystal_radius: f64,
    /// Crystal rotation frequency, rad/s. Only used by the tilt probe.
    pub omega_rot: f64,
}

impl Default for TrapIonConfig {
    fn default() -> Self {
        Self {
            ion_mass: amu_to_kg(BE9_MASS_AMU),
            omega_com: hz_to_rad_s(1.1e6),
            n_ions: 100,
            crystal_radius: 150e-6,
            omega_rot: hz_to_rad_s(180e3),
        }
    }
}

impl TrapIonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ion_mass > 0.0) {
            return Err(Error::domain("ion_mass", "must be > 0"));
        }
        if !(self.omega_com > 0.0) {
            return Err(Error::domain("omega_com", "must be > 0"));
        }
        if self.n_ions < 1 {
            return Err(Error::domain("n_ions", "must be >= 1"));
        }
        if !(self.crystal_radius >= 0.0) {
            return Err(Error::domain("crystal_radius", "must be >= 0"));
        }
        Ok(())
    }

    pub fn with_omega_com(self, omega_com: f64) -> Self {
        Self { omega_com, ..self }
    }
}

/// Mean occupation of the COM mode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThermalState {
    pub n_bar: f64,
}

impl ThermalState {
    pub fn new(n_bar: f64) -> Result<Self> {
        if !(n_bar >= 0.0) || !n_bar.is_finite() {
            return Err(Error::domain(
                "n_bar",
                format!("must be finite and >= 0, got {n_bar}"),
            ));
        }
        Ok(Self { n_bar })
    }
}

/// The applied ODF interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdfDrive {
    /// AC-Stark coupling rate |δ_AC| per beam pair, rad/s. A calibration input.
    pub delta_ac: f64,
    /// Beat frequency μ of the two ODF beams, rad/s.
    pub mu: f64,
    /// Duration of one echo arm, s.
    pub tau: f64,
    /// Total off-resonant decoherence rate Γ, 1/s.
    pub gamma: f64,
    pub gamma_raman: Option<f64>,
    pub gamma_elastic: Option<f64>,
}

impl Default for OdfDrive {
    fn default() -> Self {
        Self {
            delta_ac: hz_to_rad_s(5e3),
            mu: hz_to_rad_s(1.102e6),
            tau: 500e-6,
            gamma: 100.0,
            gamma_raman: None,
            gamma_elastic: None,
        }
    }
}

impl OdfDrive {
    /// Sets Γ from its Raman and elastic Rayleigh parts, Γ = (Γ_Ram + Γ_el)/2.
    pub fn with_scattering(self, gamma_raman: f64, gamma_elastic: f64) -> Self {
        Self {
            gamma: 0.5 * (gamma_raman + gamma_elastic),
            gamma_raman: Some(gamma_raman),
            gamma_elastic: Some(gamma_elastic),
            ..self
        }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::domain("tau", "must be > 0"));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::domain("gamma", "must be >= 0"));
        }
        if !(self.delta_ac >= 0.0) {
            return Err(Error::domain("delta_ac", "must be >= 0"));
        }
        if let (Some(r), Some(e)) = (self.gamma_raman, self.gamma_elastic) {
            let expected = 0.5 * (r + e);
            let scale = expected.abs().max(f64::MIN_POSITIVE);
            if ((self.gamma - expected) / scale).abs() > 1e-12 {
                return Err(Error::domain(
                    "gamma",
                    format!(
                        "{} != (gamma_raman + gamma_elastic)/2 = {expected}",
                        self.gamma
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Signed detuning δ = μ − ω_COM, rad/s.
pub fn detuning(drive: &OdfDrive, cfg: &TrapIonConfig) -> f64 {
    drive.mu - cfg.omega_com
}

/// Ground-state extent z₀ = √(ħ/(2Mω_COM)) of the COM mode, m.
pub fn ground_state_extent(cfg: &TrapIonConfig) -> Result<f64> {
    zero_point_extent(cfg.ion_mass, cfg.omega_com)
}

pub(crate) fn zero_point_extent(mass: f64, omega: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::domain("ion_mass", "must be > 0"));
    }
    if !(omega > 0.0) {
        return Err(Error::domain("omega_com", "must be > 0"));
    }
    Ok((HBAR / (2.0 * mass * omega)).sqrt())
}

/// Thermal mean-square extent ⟨ẑ²⟩ = z₀²(2n̄+1), m².
pub fn thermal_extent_sq(cfg: &TrapIonConfig, state: &ThermalState) -> Result<f64> {
    if !(state.n_bar >= 0.0) {
        return Err(Error::domain("n_bar", "must be >= 0"));
    }
    let z0 = ground_state_extent(cfg)?;
    Ok(z0 * z0 * (2.0 * state.n_bar + 1.0))
}
