//! Spin-motion physics: ODF force magnitude with the Debye-Waller factor, the
//! uniform Ising coupling, phase-space loops of the driven COM mode and the
//! two echo lineshapes (motional thermometry and mean-field precession).
//!
//! # Loop conventions
//!
//! With Ω = F₀z₀/(2ħ) and x = δτ, one ODF arm displaces the COM mode by
//! α_arm = (Ω/δ)(1 − e^{ix}) and accumulates the geometric phase
//! χ_arm = Ω²(τ − sin(x)/δ)/δ = Ω²τ²(x − sin x)/x². The echo π pulse negates
//! the force in the second arm, so the net displacement is
//! α_total = α_arm(1 − e^{ix}) and the sequence phase is
//! χ_seq = Ω²τ²(2x − 4 sin x + sin 2x)/x², which includes the cross term
//! between the arms.
//!
//! At loop closure (x = 2πk) the cross term vanishes and
//! χ_arm = J̄τ/2 with J̄ = F₀²/(4ħMω_COM δ), so χ_seq = J̄τ. The coupling `J`
//! in the thermometry lineshape is χ_seq at any detuning.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::beamgeom::{delta_k, BeamGeometry};
use crate::error::{Error, Result};
use crate::params::{
    detuning, ground_state_extent, thermal_extent_sq, zero_point_extent, OdfDrive, ThermalState,
    TrapIonConfig,
};
use crate::units::HBAR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionStrengths {
    /// Spin-dependent force magnitude F₀, N.
    pub f0: f64,
    pub debye_waller: f64,
    /// Lamb-Dicke parameter η = δk z₀.
    pub lamb_dicke: f64,
    /// Uniform pairwise coupling J̄, rad/s; `None` on exact resonance.
    pub j_bar: Option<f64>,
    /// F₀/Γ in N s; `None` when Γ = 0.
    pub f0_over_gamma: Option<f64>,
}

/// Debye-Waller suppression exp(−δk²⟨z²⟩/2).
pub fn debye_waller(delta_k: f64, extent_sq: f64) -> f64 {
    (-0.5 * delta_k * delta_k * extent_sq).exp()
}

/// F₀ = ħ|δ_AC|δk exp(−δk²⟨z²⟩/2) together with the derived strengths.
pub fn force_magnitude(
    geom: &BeamGeometry,
    drive: &OdfDrive,
    cfg: &TrapIonConfig,
    state: &ThermalState,
) -> Result<InteractionStrengths> {
    let dk = delta_k(geom);
    let z0 = ground_state_extent(cfg)?;
    let dw = debye_waller(dk, thermal_extent_sq(cfg, state)?);
    let f0 = HBAR * drive.delta_ac.abs() * dk * dw;
    let delta = detuning(drive, cfg);
    Ok(InteractionStrengths {
        f0,
        debye_waller: dw,
        lamb_dicke: dk * z0,
        j_bar: j_bar(f0, cfg, delta).ok(),
        f0_over_gamma: (drive.gamma > 0.0).then(|| f0 / drive.gamma),
    })
}

/// Analytic dF₀/dθ_ODF at fixed |δ_AC|, N/rad.
pub fn force_angle_derivative(
    geom: &BeamGeometry,
    drive: &OdfDrive,
    cfg: &TrapIonConfig,
    state: &ThermalState,
) -> Result<f64> {
    let dk = delta_k(geom);
    let s = thermal_extent_sq(cfg, state)?;
    let dk_dtheta = geom.wavenumber() * (0.5 * geom.theta_odf).cos();
    Ok(HBAR * drive.delta_ac.abs() * debye_waller(dk, s) * (1.0 - dk * dk * s) * dk_dtheta)
}

/// Beam angle maximising F₀ at fixed power, if it lies below 180°.
///
/// F₀ ∝ δk exp(−δk²⟨z²⟩/2) peaks at δk = 1/√⟨z²⟩.
pub fn turnover_angle(
    geom: &BeamGeometry,
    cfg: &TrapIonConfig,
    state: &ThermalState,
) -> Result<Option<f64>> {
    let s = thermal_extent_sq(cfg, state)?;
    let half_sin = 1.0 / (s.sqrt() * 2.0 * geom.wavenumber());
    Ok((half_sin < 1.0).then(|| 2.0 * half_sin.asin()))
}

/// Uniform Ising coupling J̄ = F₀²/(4ħMω_COM δ), rad/s.
pub fn j_bar(f0: f64, cfg: &TrapIonConfig, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::Resonance);
    }
    Ok(f0 * f0 / (4.0 * HBAR * cfg.ion_mass * cfg.omega_com * delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoSequence {
    SingleArm,
    SpinEcho,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopPhases {
    /// Net spin-dependent displacement after the sequence, in units of z₀.
    pub alpha_total: Complex64,
    /// Geometric phase of one arm, rad.
    pub chi_arm: f64,
    /// Geometric phase of the whole sequence, rad. Equals `chi_arm` for a
    /// single arm and J̄τ for a closed spin-echo loop.
    pub chi_sequence: f64,
}

/// (x − sin x)/x², series below |x| = 0.05.
fn arm_phase_kernel(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        x * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0)
    } else {
        (x - x.sin()) / (x * x)
    }
}

/// Echo-sequence kernels evaluated at x = δτ:
/// g = |α_total|²/(Ωτ)² = 16 sin⁴(x/2)/x² and h = χ_seq/(Ωτ)², with their
/// x-derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EchoKernels {
    pub g: f64,
    pub dg: f64,
    pub h: f64,
    pub dh: f64,
}

pub(crate) fn echo_kernels(x: f64) -> EchoKernels {
    let (g, dg) = if x == 0.0 {
        (0.0, 0.0)
    } else {
        let s = (0.5 * x).sin();
        let c = (0.5 * x).cos();
        let s3 = s * s * s;
        (
            16.0 * s3 * s / (x * x),
            32.0 * s3 * c / (x * x) - 32.0 * s3 * s / (x * x * x),
        )
    };
    let (h, dh) = if x.abs() < 0.1 {
        let x2 = x * x;
        let h = x * (-2.0 / 3.0 + x2 * (7.0 / 30.0 + x2 * (-31.0 / 1260.0 + x2 * 127.0 / 90720.0)));
        let dh = -2.0 / 3.0 + x2 * (0.7 + x2 * (-31.0 / 252.0 + x2 * 127.0 / 12960.0));
        (h, dh)
    } else {
        let num = 2.0 * x - 4.0 * x.sin() + (2.0 * x).sin();
        let dnum = 2.0 - 4.0 * x.cos() + 2.0 * (2.0 * x).cos();
        (num / (x * x), dnum / (x * x) - 2.0 * num / (x * x * x))
    };
    EchoKernels { g, dg, h, dh }
}

/// Ω = F₀z₀/(2ħ), rad/s.
fn drive_rate(f0: f64, z0: f64) -> f64 {
    f0 * z0 / (2.0 * HBAR)
}

/// Phase-space loop of the COM mode driven at detuning `delta` for arms of
/// length `tau`. Exact resonance uses the analytic δ → 0 limits.
pub fn loop_phases(
    f0: f64,
    cfg: &TrapIonConfig,
    delta: f64,
    tau: f64,
    sequence: EchoSequence,
) -> Result<LoopPhases> {
    if !(tau > 0.0) {
        return Err(Error::domain("tau", "must be > 0"));
    }
    let omega_tau = drive_rate(f0, ground_state_extent(cfg)?) * tau;
    Ok(loop_phases_scaled(omega_tau, delta * tau, sequence))
}

fn loop_phases_scaled(omega_tau: f64, x: f64, sequence: EchoSequence) -> LoopPhases {
    // 1 − e^{ix} and (1 − e^{ix})/x without cancellation
    let half = (0.5 * x).sin();
    let one_minus = Complex64::new(2.0 * half * half, -x.sin());
    let per_x = if x == 0.0 {
        Complex64::new(0.0, -1.0)
    } else {
        one_minus / x
    };
    let alpha_arm = per_x * omega_tau;
    let chi_arm = omega_tau * omega_tau * arm_phase_kernel(x);
    match sequence {
        EchoSequence::SingleArm => LoopPhases {
            alpha_total: alpha_arm,
            chi_arm,
            chi_sequence: chi_arm,
        },
        EchoSequence::SpinEcho => LoopPhases {
            alpha_total: alpha_arm * one_minus,
            chi_arm,
            chi_sequence: omega_tau * omega_tau * echo_kernels(x).h,
        },
    }
}

/// Spin-echo P↑ for a mode of frequency `mode_freq` driven by force `f0` at
/// beat frequency `mu`.
pub(crate) fn echo_probability(
    f0: f64,
    mass: f64,
    mode_freq: f64,
    mu: f64,
    drive: &OdfDrive,
    n_bar: f64,
    n_ions: u32,
) -> Result<f64> {
    let z0 = zero_point_extent(mass, mode_freq)?;
    let omega_tau = drive_rate(f0, z0) * drive.tau;
    let lp = loop_phases_scaled(
        omega_tau,
        (mu - mode_freq) * drive.tau,
        EchoSequence::SpinEcho,
    );
    let c_ss = (4.0 * lp.chi_sequence).cos().powi(n_ions as i32 - 1);
    let c_sm = (-2.0 * lp.alpha_total.norm_sqr() * (2.0 * n_bar + 1.0)).exp();
    let decay = (-2.0 * drive.gamma * drive.tau).exp();
    Ok(0.5 * (1.0 - decay * c_ss * c_sm))
}

/// Motional-thermometry lineshape P↑(μ) of the spin-echo sequence around
/// the COM mode, for each beat frequency in `mu_grid` (rad/s).
pub fn thermometry_lineshape(
    geom: &BeamGeometry,
    drive: &OdfDrive,
    cfg: &TrapIonConfig,
    state: &ThermalState,
    mu_grid: &[f64],
) -> Result<Vec<f64>> {
    drive.validate()?;
    let f0 = force_magnitude(geom, drive, cfg, state)?.f0;
    mu_grid
        .iter()
        .map(|&mu| {
            echo_probability(
                f0,
                cfg.ion_mass,
                cfg.omega_com,
                mu,
                drive,
                state.n_bar,
                cfg.n_ions,
            )
        })
        .collect()
}

/// Mean-field precession P↑(θ₁) = ½(1 + e^{−2Γτ} sin θ₁ sin(2J̄ cos θ₁ · 2τ)).
pub fn precession_lineshape(j_bar: f64, gamma: f64, tau: f64, theta1_grid: &[f64]) -> Vec<f64> {
    let decay = (-2.0 * gamma * tau).exp();
    theta1_grid
        .iter()
        .map(|&t| 0.5 * (1.0 + decay * t.sin() * (4.0 * j_bar * tau * t.cos()).sin()))
        .collect()
}

/// Far-detuned decoherence P↑(τ) = ½(1 − e^{−2Γτ}).
pub fn decay_lineshape(gamma: f64, tau_grid: &[f64]) -> Vec<f64> {
    tau_grid
        .iter()
        .map(|&t| 0.5 * (1.0 - (-2.0 * gamma * t).exp()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    /// rad
    pub theta_odf: f64,
    pub f0: f64,
    pub gamma: f64,
    pub ratio: f64,
}

/// F₀ and F₀/Γ across beam angles at fixed |δ_AC| and Γ.
pub fn ratio_curve(
    thetas: &[f64],
    geom: &BeamGeometry,
    drive: &OdfDrive,
    cfg: &TrapIonConfig,
    state: &ThermalState,
) -> Result<Vec<RatioPoint>> {
    if !(drive.gamma > 0.0) {
        return Err(Error::domain("gamma", "ratio needs gamma > 0"));
    }
    thetas
        .iter()
        .map(|&theta_odf| {
            let g = BeamGeometry { theta_odf, ..*geom };
            let f0 = force_magnitude(&g, drive, cfg, state)?.f0;
            Ok(RatioPoint {
                theta_odf,
                f0,
                gamma: drive.gamma,
                ratio: f0 / drive.gamma,
            })
        })
        .collect()
}

/// Closed-loop arm duration τ = 2π|k|/|δ| for detuning `delta`.
pub fn closure_time(delta: f64, loops: u32) -> f64 {
    TAU * loops as f64 / delta.abs()
}
