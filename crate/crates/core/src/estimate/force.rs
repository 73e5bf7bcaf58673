//! F₀ from fitted couplings and its combination across detunings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::TrapIonConfig;
use crate::units::HBAR;

/// Inverse-variance combination of per-detuning force estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F0Estimate {
    /// N
    pub f0: f64,
    /// N
    pub sigma: f64,
    /// (δ in rad/s, F₀ in N, σ in N)
    pub per_detuning: Vec<(f64, f64, f64)>,
}

/// F₀ = √(4ħMω_COM δ J̄) and its first-order σ, from a fitted J̄ ± σ_J.
pub fn f0_from_jbar(
    j_bar: f64,
    sigma_j: f64,
    cfg: &TrapIonConfig,
    delta: f64,
) -> Result<(f64, f64)> {
    if !(j_bar * delta > 0.0) {
        return Err(Error::SignInconsistency { j_bar, delta });
    }
    if !(sigma_j >= 0.0) {
        return Err(Error::domain("sigma_j", "must be >= 0"));
    }
    let f0 = (4.0 * HBAR * cfg.ion_mass * cfg.omega_com * delta * j_bar).sqrt();
    Ok((f0, f0 * sigma_j / (2.0 * j_bar.abs())))
}

pub fn weighted_f0(estimates: &[(f64, f64, f64)]) -> Result<F0Estimate> {
    if estimates.is_empty() {
        return Err(Error::Empty("weighted_f0 needs at least one estimate"));
    }
    let (mut sw, mut swf) = (0.0, 0.0);
    for &(_, f, s) in estimates {
        if !(s > 0.0) {
            return Err(Error::domain("sigma", "every estimate needs sigma > 0"));
        }
        let w = 1.0 / (s * s);
        sw += w;
        swf += w * f;
    }
    Ok(F0Estimate {
        f0: swf / sw,
        sigma: sw.sqrt().recip(),
        per_detuning: estimates.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{khz_to_rad_s, yn_to_n};
    use proptest::prelude::*;

    #[test]
    fn f0_examples() {
        let cfg = TrapIonConfig::default();
        let delta = khz_to_rad_s(2.0);
        let (f0, _) = f0_from_jbar(1.64e3, 0.0, &cfg, delta).unwrap();
        assert!((f0 / yn_to_n(30.0) - 1.0).abs() < 0.01, "{f0}");
        let (f4, _) = f0_from_jbar(4.0 * 1.64e3, 0.0, &cfg, delta).unwrap();
        assert!((f4 / f0 - 2.0).abs() < 1e-12);
        let (f, s) = f0_from_jbar(1.64e3, 164.0, &cfg, delta).unwrap();
        assert!((s / f - 0.05).abs() < 1e-12);
        let (fn_, _) = f0_from_jbar(-1.64e3, 0.0, &cfg, -delta).unwrap();
        assert!((fn_ - f0).abs() < 1e-30);
        assert!(matches!(
            f0_from_jbar(1.64e3, 0.0, &cfg, -delta),
            Err(Error::SignInconsistency { .. })
        ));
        assert!(f0_from_jbar(0.0, 0.0, &cfg, delta).is_err());
    }

    #[test]
    fn weighted_examples() {
        let one = weighted_f0(&[(1.0, 30.0, 3.0)]).unwrap();
        assert_eq!((one.f0, one.sigma), (30.0, 3.0));
        let two = weighted_f0(&[(1.0, 30.0, 3.0), (2.0, 30.0, 3.0)]).unwrap();
        assert!((two.f0 - 30.0).abs() < 1e-12);
        assert!((two.sigma - 3.0 / 2f64.sqrt()).abs() < 1e-12);
        let mixed = weighted_f0(&[(1.0, 28.0, 2.0), (2.0, 34.0, 4.0)]).unwrap();
        assert!((mixed.f0 - 29.2).abs() < 1e-12);
        assert!((mixed.sigma - 1.79).abs() < 0.005);
        assert!(weighted_f0(&[]).is_err());
        assert!(weighted_f0(&[(1.0, 30.0, 0.0)]).is_err());
    }

    proptest! {
        #[test]
        fn weighted_is_order_free_and_tightens(
            entries in prop::collection::vec((1.0f64..10.0, 20.0f64..40.0, 0.5f64..5.0), 1..8),
            extra_sigma in 0.5f64..5.0,
        ) {
            let a = weighted_f0(&entries).unwrap();
            let mut rev = entries.clone();
            rev.reverse();
            let b = weighted_f0(&rev).unwrap();
            prop_assert!((a.f0 - b.f0).abs() <= 1e-12 * a.f0);
            prop_assert!((a.sigma - b.sigma).abs() <= 1e-12 * a.sigma);
            let mut more = entries.clone();
            more.push((11.0, a.f0, extra_sigma));
            let c = weighted_f0(&more).unwrap();
            prop_assert!(c.sigma < a.sigma);
        }
    }
}
