//! CODATA 2018 constants and the handful of unit conversions used at the
//! configuration and CLI boundary.

use std::f64::consts::PI;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Mass of a ⁹Be⁺ ion in atomic mass units.
pub const BE9_MASS_AMU: f64 = 9.012;

/// Constants bundled as a value, for callers that want to carry them around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub atomic_mass_unit: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: Self = Self {
        hbar: HBAR,
        atomic_mass_unit: AMU,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn hz_to_rad_s(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn rad_s_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

pub fn khz_to_rad_s(f: f64) -> f64 {
    hz_to_rad_s(f * 1e3)
}

pub fn rad_s_to_khz(w: f64) -> f64 {
    rad_s_to_hz(w) * 1e-3
}

pub fn deg_to_rad(d: f64) -> f64 {
    d.to_radians()
}

pub fn rad_to_deg(r: f64) -> f64 {
    r.to_degrees()
}

/// Yoctonewton (1e-24 N) to newton.
pub fn yn_to_n(f: f64) -> f64 {
    f * 1e-24
}

pub fn n_to_yn(f: f64) -> f64 {
    f * 1e24
}

pub fn amu_to_kg(m: f64) -> f64 {
    m * AMU
}
