//! Independent reference computations used by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Geometric};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BE9_KG: f64 = 9.012 * 1.660_539_066_60e-27;

/// Spin-echo trajectory integrated on a uniform grid.
///
/// Time is in units of the arm length τ. The displacement obeys
/// dα/du = −i A s(u) e^{ixu} with s = +1 on the first arm and −1 after the
/// π pulse; the geometric phase is Im∫α* dα. Both integrals use the
/// trapezoidal rule with `steps` intervals per arm.
pub struct Trajectory {
    pub alpha_arm: Complex64,
    pub chi_arm: f64,
    pub alpha_total: Complex64,
    pub chi_total: f64,
}

pub fn integrate_echo(a: f64, x: f64, steps: usize) -> Trajectory {
    let h = 1.0 / steps as f64;
    let rate = |u: f64, s: f64| Complex64::new(0.0, -a * s) * Complex64::from_polar(1.0, x * u);
    let mut alpha = Complex64::new(0.0, 0.0);
    let mut chi = 0.0;
    let mut arm = (alpha, chi);
    for (segment, s) in [(0.0, 1.0), (1.0, -1.0)] {
        let mut d_prev = rate(segment, s);
        let mut integrand_prev = (alpha.conj() * d_prev).im;
        for k in 1..=steps {
            let u = segment + k as f64 * h;
            let d = rate(u, s);
            alpha += 0.5 * h * (d_prev + d);
            let integrand = (alpha.conj() * d).im;
            chi += 0.5 * h * (integrand_prev + integrand);
            d_prev = d;
            integrand_prev = integrand;
        }
        if segment == 0.0 {
            arm = (alpha, chi);
        }
    }
    Trajectory {
        alpha_arm: arm.0,
        chi_arm: arm.1,
        alpha_total: alpha,
        chi_total: chi,
    }
}

/// ⟨n|e^{iδk ẑ}|n⟩ = e^{−η²/2} L_n(η²) averaged over Bose-Einstein
/// distributed n, with η = δk z₀. Returns (mean, standard error).
pub fn debye_waller_mc(eta: f64, n_bar: f64, samples: usize, seed: u64) -> (f64, f64) {
    let e2 = eta * eta;
    let prefactor = (-0.5 * e2).exp();
    if n_bar == 0.0 {
        return (prefactor, 0.0);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let occupation = Geometric::new(1.0 / (n_bar + 1.0)).unwrap();
    let mut cache: Vec<f64> = vec![1.0, 1.0 - e2];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let n = occupation.sample(&mut rng) as usize;
        while cache.len() <= n {
            // (k+1) L_{k+1} = (2k+1−y) L_k − k L_{k−1}
            let k = (cache.len() - 1) as f64;
            let next = ((2.0 * k + 1.0 - e2) * cache[cache.len() - 1] - k * cache[cache.len() - 2])
                / (k + 1.0);
            cache.push(next);
        }
        let v = prefactor * cache[n];
        sum += v;
        sum_sq += v * v;
    }
    let m = sum / samples as f64;
    let var = (sum_sq / samples as f64 - m * m).max(0.0);
    (m, (var / samples as f64).sqrt())
}

/// Zero-point extent √(ħ/(2Mω)).
pub fn z0(omega: f64) -> f64 {
    (HBAR / (2.0 * BE9_KG * omega)).sqrt()
}
