//! Synthetic experiments: shot-noise-limited scans of the echo lineshapes and
//! the two stability time series (beam-angle drift, differential path length).
//!
//! # Random numbers
//!
//! Every generator is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`. Scans draw grid point `i` from stream `i`
//! (`set_stream(i)`), so a point's counts depend only on `(seed, i)` and the
//! points can be evaluated in any order. Time series use stream 0 for the
//! slow/drift component and stream 1 for the white component.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::beamgeom::{delta_k, BeamGeometry};
use crate::error::{Error, Result};
use crate::params::{thermal_extent_sq, OdfDrive, ThermalState, TrapIonConfig};
use crate::spinmotion::{
    debye_waller, decay_lineshape, echo_probability, precession_lineshape, thermometry_lineshape,
};
use crate::units::{deg_to_rad, hz_to_rad_s, HBAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// P↑ against beat frequency μ/2π in Hz.
    Thermometry,
    /// P↑ against tipping angle θ₁ in rad.
    Precession,
    /// Far-detuned P↑ against arm duration τ in s.
    Decay,
    /// Beam-angle drift Δθ in degrees against time in s.
    AngleDrift,
    /// Differential path length Δl in m against time in s.
    PathNoise,
    /// Tilt-probe P↑ against time in s.
    TiltProbe,
}

impl ScanKind {
    /// Whether the ordinate is a measured spin-up fraction.
    pub fn is_probability(self) -> bool {
        matches!(
            self,
            ScanKind::Thermometry | ScanKind::Precession | ScanKind::Decay | ScanKind::TiltProbe
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub kind: ScanKind,
    pub seed: Option<u64>,
    pub shots: Option<u32>,
    /// Generating parameters, SI units.
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

impl ScanMeta {
    pub fn new(kind: ScanKind) -> Self {
        Self {
            kind,
            seed: None,
            shots: None,
            parameters: BTreeMap::new(),
        }
    }
}

/// Abscissa/ordinate/σ triples plus provenance.
///
/// For probability kinds `p_up` is the measured fraction and `sigma > 0`. For
/// time series `p_up` carries the series value and `sigma` the per-sample
/// white-noise scale (may be zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDataset {
    pub abscissa: Vec<f64>,
    pub p_up: Vec<f64>,
    pub sigma: Vec<f64>,
    pub meta: ScanMeta,
}

impl ScanDataset {
    pub fn new(
        abscissa: Vec<f64>,
        p_up: Vec<f64>,
        sigma: Vec<f64>,
        meta: ScanMeta,
    ) -> Result<Self> {
        let d = Self {
            abscissa,
            p_up,
            sigma,
            meta,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.abscissa.len();
        if self.p_up.len() != n || self.sigma.len() != n {
            return Err(Error::Dataset(format!(
                "column lengths differ: abscissa {n}, p_up {}, sigma {}",
                self.p_up.len(),
                self.sigma.len()
            )));
        }
        let probability = self.meta.kind.is_probability();
        for i in 0..n {
            let (x, p, s) = (self.abscissa[i], self.p_up[i], self.sigma[i]);
            if !x.is_finite() || !p.is_finite() || !s.is_finite() {
                return Err(Error::Dataset(format!("row {i}: non-finite value")));
            }
            if probability {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Dataset(format!(
                        "row {i}: p_up = {p} outside [0, 1]"
                    )));
                }
                if !(s > 0.0) {
                    return Err(Error::Dataset(format!("row {i}: sigma = {s} must be > 0")));
                }
            } else if s < 0.0 {
                return Err(Error::Dataset(format!("row {i}: sigma = {s} must be >= 0")));
            }
        }
        Ok(())
    }

    /// Copy with rows sorted by abscissa (stable for ties).
    pub fn sorted(&self) -> Self {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.abscissa[a].total_cmp(&self.abscissa[b]));
        Self {
            abscissa: idx.iter().map(|&i| self.abscissa[i]).collect(),
            p_up: idx.iter().map(|&i| self.p_up[i]).collect(),
            sigma: idx.iter().map(|&i| self.sigma[i]).collect(),
            meta: self.meta.clone(),
        }
    }
}

/// The noiseless lineshape a scan samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanModel {
    /// Grid in μ/2π (Hz).
    Thermometry {
        geom: BeamGeometry,
        drive: OdfDrive,
        cfg: TrapIonConfig,
        state: ThermalState,
    },
    /// Grid in θ₁ (rad).
    Precession { j_bar: f64, gamma: f64, tau: f64 },
    /// Grid in τ (s).
    Decay { gamma: f64 },
}

impl ScanModel {
    pub fn kind(&self) -> ScanKind {
        match self {
            ScanModel::Thermometry { .. } => ScanKind::Thermometry,
            ScanModel::Precession { .. } => ScanKind::Precession,
            ScanModel::Decay { .. } => ScanKind::Decay,
        }
    }

    pub fn probabilities(&self, grid: &[f64]) -> Result<Vec<f64>> {
        match self {
            ScanModel::Thermometry {
                geom,
                drive,
                cfg,
                state,
            } => {
                let mu: Vec<f64> = grid.iter().map(|&f| hz_to_rad_s(f)).collect();
                thermometry_lineshape(geom, drive, cfg, state, &mu)
            }
            ScanModel::Precession { j_bar, gamma, tau } => {
                Ok(precession_lineshape(*j_bar, *gamma, *tau, grid))
            }
            ScanModel::Decay { gamma } => Ok(decay_lineshape(*gamma, grid)),
        }
    }

    fn parameters(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match self {
            ScanModel::Thermometry {
                geom,
                drive,
                cfg,
                state,
            } => {
                m.insert("theta_odf_rad".into(), geom.theta_odf);
                m.insert("laser_wavelength_m".into(), geom.laser_wavelength);
                m.insert("delta_ac_rad_s".into(), drive.delta_ac);
                m.insert("tau_s".into(), drive.tau);
                m.insert("gamma_per_s".into(), drive.gamma);
                m.insert("omega_com_rad_s".into(), cfg.omega_com);
                m.insert("ion_mass_kg".into(), cfg.ion_mass);
                m.insert("n_ions".into(), cfg.n_ions as f64);
                m.insert("n_bar".into(), state.n_bar);
            }
            ScanModel::Precession { j_bar, gamma, tau } => {
                m.insert("j_bar_rad_s".into(), *j_bar);
                m.insert("gamma_per_s".into(), *gamma);
                m.insert("tau_s".into(), *tau);
            }
            ScanModel::Decay { gamma } => {
                m.insert("gamma_per_s".into(), *gamma);
            }
        }
        m
    }
}

/// Standard error of a binomial fraction, floored at the z = 1 Wilson
/// half-width when the estimate sits on 0 or 1.
pub fn binomial_sigma(p_hat: f64, shots: u32) -> f64 {
    let n = shots as f64;
    if p_hat <= 0.0 || p_hat >= 1.0 {
        let p = p_hat.clamp(0.0, 1.0);
        ((p * (1.0 - p) / n + 0.25 / (n * n)).sqrt()) / (1.0 + 1.0 / n)
    } else {
        (p_hat * (1.0 - p_hat) / n).sqrt()
    }
}

fn point_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Binomial shot-noise scan of `model` over `grid`.
pub fn simulate_scan(
    model: &ScanModel,
    grid: &[f64],
    shots: u32,
    seed: u64,
) -> Result<ScanDataset> {
    if shots == 0 {
        return Err(Error::domain("shots", "must be >= 1"));
    }
    let truth = model.probabilities(grid)?;
    let mut p_up = Vec::with_capacity(grid.len());
    let mut sigma = Vec::with_capacity(grid.len());
    for (i, &p) in truth.iter().enumerate() {
        let mut rng = point_rng(seed, i as u64);
        let counts = Binomial::new(shots as u64, p.clamp(0.0, 1.0))
            .map_err(|e| Error::domain("p_up", e.to_string()))?
            .sample(&mut rng);
        let p_hat = counts as f64 / shots as f64;
        p_up.push(p_hat);
        sigma.push(binomial_sigma(p_hat, shots));
    }
    let meta = ScanMeta {
        kind: model.kind(),
        seed: Some(seed),
        shots: Some(shots),
        parameters: model.parameters(),
    };
    ScanDataset::new(grid.to_vec(), p_up, sigma, meta)
}

/// Noise-free dataset: exact lineshape values with the σ a `shots`-per-point
/// measurement would report.
pub fn noiseless_scan(model: &ScanModel, grid: &[f64], shots: u32) -> Result<ScanDataset> {
    if shots == 0 {
        return Err(Error::domain("shots", "must be >= 1"));
    }
    let p_up = model.probabilities(grid)?;
    let sigma = p_up.iter().map(|&p| binomial_sigma(p, shots)).collect();
    let meta = ScanMeta {
        kind: model.kind(),
        seed: None,
        shots: Some(shots),
        parameters: model.parameters(),
    };
    ScanDataset::new(grid.to_vec(), p_up, sigma, meta)
}

/// Linear beam-angle drift plus white jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftModel {
    /// degrees per hour
    pub linear_rate: f64,
    /// degrees, per sample
    pub rms_jitter: f64,
    pub seed: u64,
}

impl Default for DriftModel {
    fn default() -> Self {
        Self {
            linear_rate: 0.002,
            rms_jitter: 2e-4,
            seed: 0,
        }
    }
}

fn sample_times(duration: f64, dt: f64) -> Result<Vec<f64>> {
    if !(duration > 0.0) {
        return Err(Error::domain("duration", "must be > 0"));
    }
    if !(dt > 0.0) {
        return Err(Error::domain("dt", "must be > 0"));
    }
    let n = (duration / dt + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| k as f64 * dt).collect())
}

/// Δθ(t) = rate·t + white jitter, in degrees, sampled every `dt` seconds.
pub fn simulate_angle_drift(model: &DriftModel, duration: f64, dt: f64) -> Result<ScanDataset> {
    if !(model.rms_jitter >= 0.0) {
        return Err(Error::domain("rms_jitter", "must be >= 0"));
    }
    let t = sample_times(duration, dt)?;
    let mut rng = point_rng(model.seed, 1);
    let values: Vec<f64> = t
        .iter()
        .map(|&ti| {
            let z: f64 = StandardNormal.sample(&mut rng);
            model.linear_rate * ti / 3600.0 + model.rms_jitter * z
        })
        .collect();
    let mut meta = ScanMeta::new(ScanKind::AngleDrift);
    meta.seed = Some(model.seed);
    meta.parameters
        .insert("linear_rate_deg_per_h".into(), model.linear_rate);
    meta.parameters
        .insert("rms_jitter_deg".into(), model.rms_jitter);
    let sigma = vec![model.rms_jitter; t.len()];
    ScanDataset::new(t, values, sigma, meta)
}

/// Converts an angle-drift series into the tilt-probe signal.
///
/// The probe parks the beat note at μ = ω_r + π/τ next to the crystal
/// rotation frequency. A tilt ε of δk gives an in-plane force
/// ħ|δ_AC|δk sin(ε)·DW that drives the rotation mode; its echo P↑ follows
/// the thermometry lineshape with ω_COM replaced by ω_r. The static
/// calibration tilt is `geom.tilt_error`; the series adds Δθ to it.
pub fn tilt_probe_signal(
    drift: &ScanDataset,
    geom: &BeamGeometry,
    drive: &OdfDrive,
    cfg: &TrapIonConfig,
    state: &ThermalState,
) -> Result<ScanDataset> {
    if drift.meta.kind != ScanKind::AngleDrift {
        return Err(Error::Dataset(
            "tilt probe needs an angle-drift series".into(),
        ));
    }
    drive.validate()?;
    let dk = delta_k(geom);
    let dw = debye_waller(dk, thermal_extent_sq(cfg, state)?);
    let mu = cfg.omega_rot + PI / drive.tau;
    let p_up = drift
        .p_up
        .iter()
        .map(|&d_theta| {
            let tilt = geom.tilt_error + deg_to_rad(d_theta);
            let f_plane = HBAR * drive.delta_ac.abs() * dk * tilt.sin().abs() * dw;
            echo_probability(
                f_plane,
                cfg.ion_mass,
                cfg.omega_rot,
                mu,
                drive,
                state.n_bar,
                cfg.n_ions,
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut meta = drift.meta.clone();
    meta.kind = ScanKind::TiltProbe;
    meta.parameters
        .insert("calibration_tilt_rad".into(), geom.tilt_error);
    // noiseless conversion; report the smallest σ the validator accepts
    let sigma = vec![f64::MIN_POSITIVE; p_up.len()];
    ScanDataset::new(drift.abscissa.clone(), p_up, sigma, meta)
}

/// Slow (filtered random walk) plus fast (white) differential path noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathNoiseModel {
    /// Peak amplitude of the slow band, m.
    pub slow_amplitude: f64,
    /// Corner of the slow band's low-pass, Hz.
    pub slow_cutoff: f64,
    /// Peak amplitude of the white band, m.
    pub fast_amplitude: f64,
    /// RMS the combined series is rescaled to, m. Zero disables rescaling.
    pub target_rms: f64,
    pub seed: u64,
}

impl Default for PathNoiseModel {
    fn default() -> Self {
        Self {
            slow_amplitude: 20e-9,
            slow_cutoff: 0.05,
            fast_amplitude: 5e-9,
            target_rms: 12e-9,
            seed: 0,
        }
    }
}

pub fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

fn rescale(values: &mut [f64], target: f64) {
    let r = rms(values);
    if r > 0.0 {
        let k = target / r;
        values.iter_mut().for_each(|v| *v *= k);
    }
}

/// Δl(t) in metres sampled at `rate` Hz for `duration` seconds.
///
/// The slow band is a random walk through a first-order low-pass at
/// `slow_cutoff`, mean-removed and scaled to RMS `slow_amplitude/√2`; the
/// fast band is white with RMS `fast_amplitude/√2`. The sum is rescaled to
/// `target_rms` when that is positive.
pub fn simulate_path_noise(
    model: &PathNoiseModel,
    duration: f64,
    rate: f64,
) -> Result<ScanDataset> {
    if !(model.slow_amplitude >= 0.0 && model.fast_amplitude >= 0.0 && model.target_rms >= 0.0) {
        return Err(Error::domain("path_noise", "amplitudes must be >= 0"));
    }
    if !(model.slow_cutoff > 0.0) {
        return Err(Error::domain("slow_cutoff", "must be > 0"));
    }
    if !(rate > 0.0) {
        return Err(Error::domain("rate", "must be > 0"));
    }
    let dt = 1.0 / rate;
    let t = sample_times(duration, dt)?;
    let n = t.len();

    let mut slow = vec![0.0; n];
    if model.slow_amplitude > 0.0 {
        let mut rng = point_rng(model.seed, 0);
        let a = 1.0 - (-2.0 * PI * model.slow_cutoff * dt).exp();
        let (mut walk, mut y) = (0.0, 0.0);
        for v in slow.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            walk += z * dt.sqrt();
            y += a * (walk - y);
            *v = y;
        }
        let mean = slow.iter().sum::<f64>() / n as f64;
        slow.iter_mut().for_each(|v| *v -= mean);
        rescale(&mut slow, model.slow_amplitude / SQRT_2);
    }
    let mut values = slow;
    if model.fast_amplitude > 0.0 {
        let mut rng = point_rng(model.seed, 1);
        let scale = model.fast_amplitude / SQRT_2;
        for v in values.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += scale * z;
        }
    }
    if model.target_rms > 0.0 {
        rescale(&mut values, model.target_rms);
    }

    let mut meta = ScanMeta::new(ScanKind::PathNoise);
    meta.seed = Some(model.seed);
    meta.parameters
        .insert("slow_amplitude_m".into(), model.slow_amplitude);
    meta.parameters
        .insert("slow_cutoff_hz".into(), model.slow_cutoff);
    meta.parameters
        .insert("fast_amplitude_m".into(), model.fast_amplitude);
    meta.parameters
        .insert("target_rms_m".into(), model.target_rms);
    let sigma = vec![model.fast_amplitude / SQRT_2; n];
    ScanDataset::new(t, values, sigma, meta)
}

/// Beat-note phase (degrees) of a differential path length `delta_l` at
/// lattice wavelength `lambda_odf`.
pub fn path_phase_deg(delta_l: f64, lambda_odf: f64) -> f64 {
    360.0 * delta_l / lambda_odf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::khz_to_rad_s;

    fn precession(j_bar: f64) -> ScanModel {
        ScanModel::Precession {
            j_bar,
            gamma: 100.0,
            tau: 500e-6,
        }
    }

    fn theta_grid(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 2.0 * PI * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn large_shot_count_tracks_lineshape() {
        let model = precession(1.64e3);
        let grid = theta_grid(40);
        let truth = model.probabilities(&grid).unwrap();
        let d = simulate_scan(&model, &grid, 10_000_000, 3).unwrap();
        for (a, b) in d.p_up.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-3);
        }
    }

    #[test]
    fn scans_are_reproducible_and_order_free() {
        let model = precession(1.64e3);
        let grid = theta_grid(40);
        let a = simulate_scan(&model, &grid, 500, 42).unwrap();
        let b = simulate_scan(&model, &grid, 500, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_scan(&model, &grid, 500, 43).unwrap();
        assert_ne!(a.p_up, c.p_up);
        // the point at index 7 only depends on (seed, 7)
        let single = simulate_scan(&model, &grid[..8], 500, 42).unwrap();
        assert_eq!(single.p_up[7], a.p_up[7]);
    }

    #[test]
    fn sigma_floor_on_boundaries() {
        assert!((binomial_sigma(0.0, 500) - 1.0 / 1002.0).abs() < 1e-15);
        assert!((binomial_sigma(1.0, 500) - 1.0 / 1002.0).abs() < 1e-15);
        assert!((binomial_sigma(0.5, 100) - 0.05).abs() < 1e-15);
        let d = simulate_scan(&ScanModel::Decay { gamma: 0.0 }, &[1e-3, 2e-3], 100, 1).unwrap();
        assert!(d.sigma.iter().all(|&s| s > 0.0));
        assert!(simulate_scan(&ScanModel::Decay { gamma: 0.0 }, &[1e-3], 0, 1).is_err());
    }

    #[test]
    fn one_sigma_coverage() {
        let p_true = 0.3;
        let shots = 200;
        let model = ScanModel::Decay {
            gamma: -(1.0f64 - 2.0 * p_true).ln() / 2.0,
        };
        let mut inside = 0;
        let trials = 2000;
        for seed in 0..trials {
            let d = simulate_scan(&model, &[1.0], shots, seed).unwrap();
            if (d.p_up[0] - p_true).abs() <= d.sigma[0] {
                inside += 1;
            }
        }
        let frac = inside as f64 / trials as f64;
        assert!((0.60..=0.75).contains(&frac), "coverage {frac}");
    }

    #[test]
    fn thermometry_scan_abscissa_is_hz() {
        let cfg = TrapIonConfig::default();
        let model = ScanModel::Thermometry {
            geom: BeamGeometry::default(),
            drive: OdfDrive {
                delta_ac: khz_to_rad_s(2.0),
                tau: 200e-6,
                ..Default::default()
            },
            cfg,
            state: ThermalState { n_bar: 5.0 },
        };
        let f_com = cfg.omega_com / (2.0 * PI);
        let p = model.probabilities(&[f_com, f_com + 1e3]).unwrap();
        // exact resonance closes the echo loop; only C_ss and Γ remain
        assert!(p[1] > p[0]);
    }

    #[test]
    fn drift_examples() {
        let clean = DriftModel {
            linear_rate: 0.002,
            rms_jitter: 0.0,
            seed: 1,
        };
        let d = simulate_angle_drift(&clean, 3600.0, 60.0).unwrap();
        assert_eq!(d.len(), 61);
        assert!((d.p_up.last().unwrap() - 0.002).abs() < 1e-15);
        let d = simulate_angle_drift(&clean, 6000.0, 10.0).unwrap();
        let last = *d.p_up.last().unwrap();
        assert!((last - 0.0033).abs() < 0.00005, "{last}");
        assert!(d.p_up.iter().all(|v| v.abs() <= 6e-3));

        let flat = DriftModel {
            linear_rate: 0.0,
            rms_jitter: 0.0,
            seed: 9,
        };
        let d = simulate_angle_drift(&flat, 100.0, 1.0).unwrap();
        assert!(d.p_up.iter().all(|&v| v == 0.0));
        assert!(simulate_angle_drift(&flat, 0.0, 1.0).is_err());
        assert!(simulate_angle_drift(&flat, 10.0, 0.0).is_err());
    }

    #[test]
    fn tilt_probe_responds_to_drift() {
        let cfg = TrapIonConfig::default();
        let drive = OdfDrive {
            tau: 200e-6,
            delta_ac: khz_to_rad_s(2.0),
            ..Default::default()
        };
        let geom = BeamGeometry::default().with_tilt_error(deg_to_rad(1.0));
        let drift = simulate_angle_drift(
            &DriftModel {
                linear_rate: 0.5,
                rms_jitter: 0.0,
                seed: 0,
            },
            3600.0,
            600.0,
        )
        .unwrap();
        let probe =
            tilt_probe_signal(&drift, &geom, &drive, &cfg, &ThermalState { n_bar: 1.27 }).unwrap();
        assert_eq!(probe.meta.kind, ScanKind::TiltProbe);
        assert!(probe.p_up.windows(2).all(|w| w[1] > w[0]));
        assert!(tilt_probe_signal(&probe, &geom, &drive, &cfg, &ThermalState::default()).is_err());
    }

    #[test]
    fn path_noise_examples() {
        let phi = path_phase_deg(12e-9, 647e-9);
        assert!((phi - 6.7).abs() < 0.05, "{phi}");

        let silent = PathNoiseModel {
            slow_amplitude: 0.0,
            fast_amplitude: 0.0,
            ..Default::default()
        };
        let d = simulate_path_noise(&silent, 10.0, 100.0).unwrap();
        assert!(d.p_up.iter().all(|&v| v == 0.0));

        let m = PathNoiseModel::default();
        let a = simulate_path_noise(&m, 20.0, 100.0).unwrap();
        let b = simulate_path_noise(&m, 20.0, 100.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_noise_rms_over_seeds() {
        for seed in 0..100 {
            let m = PathNoiseModel {
                seed,
                ..Default::default()
            };
            let d = simulate_path_noise(&m, 200.0, 100.0).unwrap();
            let r = rms(&d.p_up);
            assert!((r / m.target_rms - 1.0).abs() < 0.05, "seed {seed}: {r}");
        }
    }

    #[test]
    fn dataset_validation() {
        let meta = ScanMeta::new(ScanKind::Precession);
        assert!(ScanDataset::new(vec![0.0], vec![1.2], vec![0.1], meta.clone()).is_err());
        assert!(ScanDataset::new(vec![0.0], vec![0.2], vec![0.0], meta.clone()).is_err());
        assert!(ScanDataset::new(vec![0.0, 1.0], vec![0.2], vec![0.1], meta.clone()).is_err());
        let d =
            ScanDataset::new(vec![2.0, 0.0, 1.0], vec![0.2, 0.0, 0.1], vec![0.1; 3], meta).unwrap();
        assert_eq!(d.sorted().p_up, vec![0.0, 0.1, 0.2]);
    }
}
