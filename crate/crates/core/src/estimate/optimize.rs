//! Beam angle maximising F₀/Γ at fixed |δ_AC| and Γ.

use crate::beamgeom::{BeamGeometry, MountGeometry};
use crate::error::{Error, Result};
use crate::params::{OdfDrive, ThermalState, TrapIonConfig};
use crate::spinmotion::force_magnitude;
use crate::units::rad_to_deg;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search of F₀(θ)/Γ over `window` = (θ_min, θ_max) in rad.
///
/// F₀ ∝ δk e^{−δk²⟨z²⟩/2} has a single maximum in θ, so the ratio is
/// unimodal on any window; a boundary optimum is returned as the boundary.
/// The window must lie within the mount's mechanical limits.
/// Returns (θ* in rad, F₀/Γ at θ* in N s).
pub fn optimize_theta(
    geom: &BeamGeometry,
    cfg: &TrapIonConfig,
    drive: &OdfDrive,
    state: &ThermalState,
    window: (f64, f64),
    mount: &MountGeometry,
) -> Result<(f64, f64)> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InfeasibleWindow(format!(
            "theta_min = {:.4} deg must be below theta_max = {:.4} deg",
            rad_to_deg(lo),
            rad_to_deg(hi)
        )));
    }
    for v in [lo, hi] {
        let d = rad_to_deg(v);
        if !(d >= mount.theta_min_deg - 1e-12 && d <= mount.theta_max_deg + 1e-12) {
            return Err(Error::AngleOutOfRange {
                value_deg: d,
                min_deg: mount.theta_min_deg,
                max_deg: mount.theta_max_deg,
            });
        }
    }
    if !(drive.gamma > 0.0) {
        return Err(Error::domain("gamma", "ratio needs gamma > 0"));
    }
    let ratio = |theta: f64| -> Result<f64> {
        let g = BeamGeometry {
            theta_odf: theta,
            ..*geom
        };
        Ok(force_magnitude(&g, drive, cfg, state)?.f0 / drive.gamma)
    };

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (ratio(c)?, ratio(d)?);
    while b - a > 1e-12 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = ratio(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = ratio(d)?;
        }
    }
    let mut best = (0.5 * (a + b), ratio(0.5 * (a + b))?);
    for edge in [lo, hi] {
        let r = ratio(edge)?;
        if r > best.1 {
            best = (edge, r);
        }
    }
    Ok(best)
}
