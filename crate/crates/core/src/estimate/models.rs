//! The three fit models with analytic gradients.

use std::f64::consts::TAU;

use crate::beamgeom::{delta_k, BeamGeometry};
use crate::error::{Error, Result};
use crate::params::{zero_point_extent, OdfDrive, TrapIonConfig};
use crate::spinmotion::echo_kernels;
use crate::units::HBAR;

/// A scalar model f(p; x) with its parameter gradient.
pub trait FitModel {
    fn names(&self) -> &'static [&'static str];
    fn value(&self, p: &[f64], x: f64) -> Result<f64>;
    /// Writes ∂f/∂p into `grad` and returns f.
    fn gradient(&self, p: &[f64], x: f64, grad: &mut [f64]) -> Result<f64>;
    /// Clamps `p` onto the feasible set; true when anything moved.
    fn project(&self, _p: &mut [f64]) -> bool {
        false
    }
}

fn clamp_nonnegative(v: &mut f64) -> bool {
    if *v < 0.0 {
        *v = 0.0;
        true
    } else {
        false
    }
}

/// Spin-echo thermometry P↑(μ/2π) with parameters (ω_COM/2π in Hz, n̄).
///
/// Everything that sets F₀ except n̄ and the mode frequency is held fixed.
#[derive(Debug, Clone, Copy)]
pub struct ThermometryModel {
    pub geom: BeamGeometry,
    pub drive: OdfDrive,
    pub cfg: TrapIonConfig,
}

struct ThermoTerms {
    p: f64,
    d_f: f64,
    d_nbar: f64,
}

impl ThermometryModel {
    fn terms(&self, p: &[f64], mu_hz: f64) -> Result<ThermoTerms> {
        let (f_com, n_bar) = (p[0], p[1]);
        let omega = TAU * f_com;
        let tau = self.drive.tau;
        let dk = delta_k(&self.geom);
        let z0 = zero_point_extent(self.cfg.ion_mass, omega)?;
        let eta2 = dk * dk * z0 * z0;
        let occ = 2.0 * n_bar + 1.0;

        let f0 = HBAR * self.drive.delta_ac.abs() * dk * (-0.5 * eta2 * occ).exp();
        let a = f0 * z0 / (2.0 * HBAR) * tau;
        let a2 = a * a;
        // logarithmic derivatives of A = Ωτ
        let dlna_dn = -eta2;
        let dlna_dw = (eta2 * occ - 1.0) / (2.0 * omega);

        let x = (TAU * mu_hz - omega) * tau;
        let k = echo_kernels(x);

        let chi = a2 * k.h;
        let dchi_dn = 2.0 * a2 * k.h * dlna_dn;
        let dchi_dw = 2.0 * a2 * k.h * dlna_dw - a2 * k.dh * tau;

        let m = self.cfg.n_ions as i32 - 1;
        let cos4 = (4.0 * chi).cos();
        let c_ss = cos4.powi(m);
        let dcss_dchi = if m == 0 {
            0.0
        } else {
            -4.0 * m as f64 * cos4.powi(m - 1) * (4.0 * chi).sin()
        };

        let ln_csm = -2.0 * a2 * k.g * occ;
        let c_sm = ln_csm.exp();
        let dlncsm_dn = -4.0 * a2 * k.g * (occ * dlna_dn + 1.0);
        let dlncsm_dw = -2.0 * occ * (2.0 * a2 * k.g * dlna_dw - a2 * k.dg * tau);

        let decay = (-2.0 * self.drive.gamma * tau).exp();
        let prob = 0.5 * (1.0 - decay * c_ss * c_sm);
        let dp = |dchi: f64, dlncsm: f64| -0.5 * decay * c_sm * (dcss_dchi * dchi + c_ss * dlncsm);
        Ok(ThermoTerms {
            p: prob,
            d_f: TAU * dp(dchi_dw, dlncsm_dw),
            d_nbar: dp(dchi_dn, dlncsm_dn),
        })
    }
}

impl FitModel for ThermometryModel {
    fn names(&self) -> &'static [&'static str] {
        &["omega_com_hz", "n_bar"]
    }

    fn value(&self, p: &[f64], x: f64) -> Result<f64> {
        Ok(self.terms(p, x)?.p)
    }

    fn gradient(&self, p: &[f64], x: f64, grad: &mut [f64]) -> Result<f64> {
        let t = self.terms(p, x)?;
        grad[0] = t.d_f;
        grad[1] = t.d_nbar;
        Ok(t.p)
    }

    fn project(&self, p: &mut [f64]) -> bool {
        clamp_nonnegative(&mut p[1])
    }
}

/// Mean-field precession P↑(θ₁) with parameter J̄ (rad/s).
#[derive(Debug, Clone, Copy)]
pub struct PrecessionModel {
    pub gamma: f64,
    pub tau: f64,
}

impl FitModel for PrecessionModel {
    fn names(&self) -> &'static [&'static str] {
        &["j_bar"]
    }

    fn value(&self, p: &[f64], theta: f64) -> Result<f64> {
        let decay = (-2.0 * self.gamma * self.tau).exp();
        Ok(0.5 * (1.0 + decay * theta.sin() * (4.0 * p[0] * self.tau * theta.cos()).sin()))
    }

    fn gradient(&self, p: &[f64], theta: f64, grad: &mut [f64]) -> Result<f64> {
        let decay = (-2.0 * self.gamma * self.tau).exp();
        let arg = 4.0 * p[0] * self.tau * theta.cos();
        grad[0] = 2.0 * decay * theta.sin() * arg.cos() * self.tau * theta.cos();
        Ok(0.5 * (1.0 + decay * theta.sin() * arg.sin()))
    }
}

/// Far-detuned decay P↑(τ) with parameter Γ (1/s).
#[derive(Debug, Clone, Copy, Default)]
pub struct DecayModel;

impl FitModel for DecayModel {
    fn names(&self) -> &'static [&'static str] {
        &["gamma"]
    }

    fn value(&self, p: &[f64], tau: f64) -> Result<f64> {
        Ok(0.5 * (1.0 - (-2.0 * p[0] * tau).exp()))
    }

    fn gradient(&self, p: &[f64], tau: f64, grad: &mut [f64]) -> Result<f64> {
        let e = (-2.0 * p[0] * tau).exp();
        grad[0] = tau * e;
        Ok(0.5 * (1.0 - e))
    }

    fn project(&self, p: &mut [f64]) -> bool {
        clamp_nonnegative(&mut p[0])
    }
}

pub(crate) fn check_thermometry_inputs(model: &ThermometryModel) -> Result<()> {
    model.drive.validate()?;
    model.geom.validate()?;
    if model.cfg.n_ions == 0 {
        return Err(Error::domain("n_ions", "must be >= 1"));
    }
    Ok(())
}
