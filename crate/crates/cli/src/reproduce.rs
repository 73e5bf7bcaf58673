//! End-to-end figure drivers: simulate, fit and emit one figure's dataset.

use std::collections::BTreeMap;

use odf_core::beamgeom::{effective_wavelength, misalignment_phase};
use odf_core::estimate::{
    f0_from_jbar, fit_far_detuned_gamma, fit_precession, fit_thermometry, weighted_f0, FitModel,
    ThermometryModel,
};
use odf_core::expsim::{
    path_phase_deg, rms, simulate_angle_drift, simulate_path_noise, simulate_scan,
    tilt_probe_signal, ScanModel,
};
use odf_core::spinmotion::{force_magnitude, j_bar};
use odf_core::units::{deg_to_rad, hz_to_rad_s};
use odf_core::{BeamGeometry, FitResult};
use serde_json::json;

use crate::commands::{
    curves, decay_grid, require_converged, thermometry_grid, thermometry_model, Context,
};
use crate::output::Table;
use crate::{CliError, Figure};

const PAIR: [&str; 2] = ["doppler", "eit"];

pub(crate) fn run(ctx: &Context, figure: Figure) -> Result<(), CliError> {
    match figure {
        Figure::Fig1de => curves(ctx, "fig1de"),
        Figure::Fig3c => fig3c(ctx),
        Figure::Fig4c => fig4c(ctx),
        Figure::Fig5 => fig5(ctx),
    }
}

/// Distinct, reproducible seed per (scenario, point, repeat).
fn sub_seed(seed: u64, a: usize, b: usize, c: usize) -> u64 {
    seed ^ ((a as u64) << 48) ^ ((b as u64) << 24) ^ c as u64
}

fn fig3c(ctx: &Context) -> Result<(), CliError> {
    let mut table = Table::new(&["scenario", "mu_hz", "p_up", "sigma", "p_fit"]);
    let mut fits: BTreeMap<String, FitResult> = BTreeMap::new();
    for (i, name) in PAIR.iter().enumerate() {
        let cfg = ctx.cfg.with_scenarios(&["thermometry", name])?;
        let grid = thermometry_grid(&cfg, ctx.grid);
        let data = simulate_scan(
            &thermometry_model(&cfg),
            &grid,
            cfg.scan.shots,
            sub_seed(ctx.seed, i, 0, 0),
        )?;
        let (geom, drive, trap) = (cfg.geometry(), cfg.drive(), cfg.trap_config());
        let fit = fit_thermometry(&data, &geom, &drive, &trap, None)?;
        let model = ThermometryModel {
            geom,
            drive,
            cfg: trap,
        };
        let p = [fit.param("omega_com_hz"), fit.param("n_bar")];
        for k in 0..data.len() {
            table.push(vec![
                (*name).into(),
                data.abscissa[k].into(),
                data.p_up[k].into(),
                data.sigma[k].into(),
                model.value(&p, data.abscissa[k])?.into(),
            ]);
        }
        fits.insert(name.to_string(), fit);
    }
    let path = ctx.sink.csv("fig3c", &table, &ctx.cfg)?;
    ctx.sink.json("fig3c_fits", &fits, &ctx.cfg)?;
    eprintln!("wrote {}", path.display());
    for (name, fit) in &fits {
        eprintln!(
            "{name}: n_bar = {:.3} ± {:.3}",
            fit.param("n_bar"),
            fit.sigma("n_bar")
        );
    }
    fits.iter()
        .try_for_each(|(name, f)| require_converged(name, f))
}

fn fig4c(ctx: &Context) -> Result<(), CliError> {
    let mut table = Table::new(&[
        "scenario",
        "theta_deg",
        "f0_n",
        "f0_sigma_n",
        "gamma_per_s",
        "gamma_sigma_per_s",
        "ratio",
        "ratio_sigma",
        "ratio_theory",
    ]);
    let mut unconverged = Vec::new();
    for (s, name) in PAIR.iter().enumerate() {
        let cfg = ctx.cfg.with_scenarios(&[name])?;
        let (base_drive, trap, state) = (cfg.drive(), cfg.trap_config(), cfg.thermal());
        let thetas: Vec<f64> = match ctx.grid {
            Some(g) => g.points(),
            None => cfg.scan.theta_list_deg.clone(),
        };
        let phases: Vec<f64> = (0..cfg.scan.precession_points)
            .map(|i| std::f64::consts::TAU * i as f64 / (cfg.scan.precession_points - 1) as f64)
            .collect();
        for (t, &theta_deg) in thetas.iter().enumerate() {
            let geom = BeamGeometry {
                theta_odf: deg_to_rad(theta_deg),
                ..cfg.geometry()
            };
            let f0_true = force_magnitude(&geom, &base_drive, &trap, &state)?.f0;

            let mut per_detuning = Vec::new();
            for (d, &delta_hz) in cfg.scan.detunings_hz.iter().enumerate() {
                let delta = hz_to_rad_s(delta_hz);
                let tau = 1.0 / delta_hz.abs();
                let model = ScanModel::Precession {
                    j_bar: j_bar(f0_true, &trap, delta)?,
                    gamma: base_drive.gamma,
                    tau,
                };
                let data = simulate_scan(
                    &model,
                    &phases,
                    cfg.scan.shots,
                    sub_seed(ctx.seed, s, t, 2 * d),
                )?;
                let fit = fit_precession(&data, base_drive.gamma, tau)?;
                if !fit.converged {
                    unconverged.push(format!("{name} {theta_deg} deg precession"));
                }
                per_detuning.push((delta, fit.param("j_bar"), fit.sigma("j_bar")));
            }
            let forces = per_detuning
                .iter()
                .map(|&(delta, jb, sj)| {
                    f0_from_jbar(jb, sj, &trap, delta).map(|(f, sf)| (delta, f, sf))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let f0 = weighted_f0(&forces)?;

            let decay = simulate_scan(
                &ScanModel::Decay {
                    gamma: base_drive.gamma,
                },
                &decay_grid(&cfg, None),
                cfg.scan.shots,
                sub_seed(ctx.seed, s, t, 1),
            )?;
            let gfit = fit_far_detuned_gamma(&decay)?;
            if !gfit.converged {
                unconverged.push(format!("{name} {theta_deg} deg gamma"));
            }
            let (gamma, sg) = (gfit.param("gamma"), gfit.sigma("gamma"));
            let ratio = f0.f0 / gamma;
            let ratio_sigma = ratio * ((f0.sigma / f0.f0).powi(2) + (sg / gamma).powi(2)).sqrt();
            table.push(vec![
                (*name).into(),
                theta_deg.into(),
                f0.f0.into(),
                f0.sigma.into(),
                gamma.into(),
                sg.into(),
                ratio.into(),
                ratio_sigma.into(),
                (f0_true / base_drive.gamma).into(),
            ]);
        }
    }
    let path = ctx.sink.csv("fig4c", &table, &ctx.cfg)?;
    eprintln!("wrote {}", path.display());
    if unconverged.is_empty() {
        Ok(())
    } else {
        Err(CliError::NotConverged(unconverged.join(", ")))
    }
}

fn fig5(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let s = &cfg.stability;
    let drift = simulate_angle_drift(&cfg.drift_model(ctx.seed), s.drift_duration_s, s.drift_dt_s)?;
    let probe_geom = cfg.geometry().with_tilt_error(deg_to_rad(s.probe_tilt_deg));
    let probe = tilt_probe_signal(
        &drift,
        &probe_geom,
        &cfg.drive(),
        &cfg.trap_config(),
        &cfg.thermal(),
    )?;
    let mut a = Table::new(&["t_s", "delta_theta_deg", "p_up_probe"]);
    for i in 0..drift.len() {
        a.push(vec![
            drift.abscissa[i].into(),
            drift.p_up[i].into(),
            probe.p_up[i].into(),
        ]);
    }

    let lambda = effective_wavelength(&cfg.geometry())?;
    let noise = simulate_path_noise(
        &cfg.path_noise_model(ctx.seed),
        s.path_duration_s,
        s.path_rate_hz,
    )?;
    let mut b = Table::new(&["t_s", "delta_l_m", "phase_deg"]);
    for i in 0..noise.len() {
        b.push(vec![
            noise.abscissa[i].into(),
            noise.p_up[i].into(),
            path_phase_deg(noise.p_up[i], lambda).into(),
        ]);
    }

    // least-squares slope of the drift series, deg/h
    let n = drift.len() as f64;
    let (mt, mv) = (
        drift.abscissa.iter().sum::<f64>() / n,
        drift.p_up.iter().sum::<f64>() / n,
    );
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, v) in drift.abscissa.iter().zip(&drift.p_up) {
        sxy += (t - mt) * (v - mv);
        sxx += (t - mt) * (t - mt);
    }
    let rate = 3600.0 * sxy / sxx;
    let end_tilt = drift.p_up.last().copied().unwrap_or(0.0);
    let summary = json!({
        "drift_rate_fit_deg_per_h": rate,
        "drift_peak_deg": drift.p_up.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        "misalignment_phase_at_end_deg": misalignment_phase(
            &cfg.geometry().with_tilt_error(deg_to_rad(end_tilt)),
            cfg.trap.crystal_radius_m,
        ),
        "lambda_odf_m": lambda,
        "path_rms_m": rms(&noise.p_up),
        "phase_rms_deg": path_phase_deg(rms(&noise.p_up), lambda),
    });
    let pa = ctx.sink.csv("fig5a", &a, cfg)?;
    let pb = ctx.sink.csv("fig5b", &b, cfg)?;
    ctx.sink.json("fig5_summary", &summary, cfg)?;
    eprintln!("wrote {} and {}", pa.display(), pb.display());
    Ok(())
}
