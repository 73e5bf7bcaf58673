use odf_core::beamgeom::{
    actuators_for_angle, angle_from_actuators, delta_k, effective_wavelength, misalignment_phase,
    CHARACTERIZED_RANGE_DEG,
};
use odf_core::estimate::{fit_far_detuned_gamma, fit_precession, fit_thermometry, optimize_theta};
use odf_core::expsim::{
    simulate_angle_drift, simulate_path_noise, simulate_scan, ScanMeta, ScanModel,
};
use odf_core::params::detuning;
use odf_core::spinmotion::{force_magnitude, j_bar, ratio_curve};
use odf_core::units::{deg_to_rad, rad_to_deg};
use odf_core::{ActuatorState, BeamGeometry, FitResult, ScanDataset, ScanKind};
use serde_json::json;

use crate::config::Config;
use crate::output::{read_scan_csv, Sink, Table};
use crate::{reproduce, Cli, CliError, Command, FitKind, Grid, SimKind};

/// Resolved configuration for one invocation, with CLI overrides applied.
pub(crate) struct Context {
    pub cfg: Config,
    pub sink: Sink,
    pub seed: u64,
    pub grid: Option<Grid>,
}

fn command_line(cli: &Cli) -> String {
    match &cli.command {
        Command::Geom { .. } => "geom".to_string(),
        Command::Curves => "curves".into(),
        Command::RatioScan => "ratio-scan".into(),
        Command::Simulate { kind } => format!("simulate {kind:?}").to_lowercase(),
        Command::Fit { kind, .. } => format!("fit {kind:?}").to_lowercase(),
        Command::OptimizeAngle { .. } => "optimize-angle".into(),
        Command::Reproduce { figure } => format!("reproduce {figure:?}").to_lowercase(),
    }
}

pub(crate) fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = Config::load(cli.config.as_deref(), &cli.scenario)?;
    if let Some(theta) = cli.theta {
        cfg.beams.theta_odf_deg = theta;
    }
    if let Some(shots) = cli.shots {
        if shots == 0 {
            return Err(CliError::Input("--shots must be >= 1".into()));
        }
        cfg.scan.shots = shots;
    }
    let sink = Sink::new(&cli.out, command_line(cli), cli.seed, cli.scenario.clone())?;
    let ctx = Context {
        cfg,
        sink,
        seed: cli.seed,
        grid: cli.grid,
    };
    match &cli.command {
        Command::Geom { actuators } => geom(&ctx, actuators.as_deref()),
        Command::Curves => curves(&ctx, "curves"),
        Command::RatioScan => ratio_scan(&ctx),
        Command::Simulate { kind } => simulate(&ctx, *kind),
        Command::Fit { kind, data } => fit(&ctx, *kind, data),
        Command::OptimizeAngle { min_deg, max_deg } => optimize_angle(&ctx, *min_deg, *max_deg),
        Command::Reproduce { figure } => reproduce::run(&ctx, *figure),
    }
}

fn print_json(value: &serde_json::Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("value serialises");
    // a closed pipe on stdout is not an error; the files are already written
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn geom(ctx: &Context, actuators: Option<&std::path::Path>) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let mount = cfg.mount();
    let (geom, feasible, reason) = match actuators {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let mut de = serde_json::Deserializer::from_str(&text);
            let state: ActuatorState = serde_path_to_error::deserialize(&mut de).map_err(|e| {
                CliError::Input(format!(
                    "{}: at `{}`: {}",
                    path.display(),
                    e.path(),
                    e.inner()
                ))
            })?;
            match angle_from_actuators(&state, &mount, &cfg.geometry()) {
                Ok(g) => (Some(g), true, None),
                Err(e) => (None, false, Some(e.to_string())),
            }
        }
        None => {
            let g = cfg.geometry();
            match actuators_for_angle(g.theta_odf, &mount) {
                Ok(_) => (Some(g), true, None),
                Err(e) => (Some(g), false, Some(e.to_string())),
            }
        }
    };
    let record = match geom {
        Some(g) => {
            let theta_deg = rad_to_deg(g.theta_odf);
            json!({
                "theta_deg": theta_deg,
                "delta_k_per_m": delta_k(&g),
                "lambda_odf_m": effective_wavelength(&g).ok(),
                "tilt_error_deg": rad_to_deg(g.tilt_error),
                "phase_at_edge_deg": misalignment_phase(&g, cfg.trap.crystal_radius_m),
                "feasible": feasible,
                "reason": reason,
                "within_characterized_range":
                    (CHARACTERIZED_RANGE_DEG.0..=CHARACTERIZED_RANGE_DEG.1).contains(&theta_deg),
            })
        }
        None => json!({ "feasible": false, "reason": reason }),
    };
    print_json(&record);
    Ok(())
}

pub(crate) fn curves(ctx: &Context, stem: &str) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let thetas = ctx
        .grid
        .unwrap_or(Grid {
            start: 1.0,
            stop: 120.0,
            n: 239,
        })
        .points();
    let (drive, trap) = (cfg.drive(), cfg.trap_config());
    let delta = detuning(&drive, &trap);
    let mut table = Table::new(&["n_bar", "theta_deg", "f0_n", "jbar_rad_s"]);
    for &n_bar in &cfg.scan.n_bar_list {
        let state = odf_core::ThermalState::new(n_bar)?;
        for &t in &thetas {
            let geom = BeamGeometry {
                theta_odf: deg_to_rad(t),
                ..cfg.geometry()
            };
            let f0 = force_magnitude(&geom, &drive, &trap, &state)?.f0;
            let jb = j_bar(f0, &trap, delta)?;
            table.push(vec![n_bar.into(), t.into(), f0.into(), jb.into()]);
        }
    }
    let path = ctx.sink.csv(stem, &table, cfg)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn ratio_scan(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let grid = ctx.grid.unwrap_or(Grid {
        start: cfg.beams.theta_min_deg,
        stop: cfg.beams.theta_max_deg,
        n: 49,
    });
    let thetas: Vec<f64> = grid.points().into_iter().map(deg_to_rad).collect();
    let pts = ratio_curve(
        &thetas,
        &cfg.geometry(),
        &cfg.drive(),
        &cfg.trap_config(),
        &cfg.thermal(),
    )?;
    let mut table = Table::new(&["theta_deg", "f0_n", "gamma_per_s", "ratio"]);
    for p in pts {
        table.push(vec![
            rad_to_deg(p.theta_odf).into(),
            p.f0.into(),
            p.gamma.into(),
            p.ratio.into(),
        ]);
    }
    let path = ctx.sink.csv("ratio_scan", &table, cfg)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub(crate) fn thermometry_grid(cfg: &Config, grid: Option<Grid>) -> Vec<f64> {
    grid.unwrap_or(Grid {
        start: cfg.trap.omega_com_hz - cfg.scan.thermometry_half_width_hz,
        stop: cfg.trap.omega_com_hz + cfg.scan.thermometry_half_width_hz,
        n: cfg.scan.thermometry_points,
    })
    .points()
}

pub(crate) fn thermometry_model(cfg: &Config) -> ScanModel {
    ScanModel::Thermometry {
        geom: cfg.geometry(),
        drive: cfg.drive(),
        cfg: cfg.trap_config(),
        state: cfg.thermal(),
    }
}

pub(crate) fn precession_model(cfg: &Config) -> Result<ScanModel, CliError> {
    let (drive, trap) = (cfg.drive(), cfg.trap_config());
    let f0 = force_magnitude(&cfg.geometry(), &drive, &trap, &cfg.thermal())?.f0;
    Ok(ScanModel::Precession {
        j_bar: j_bar(f0, &trap, detuning(&drive, &trap))?,
        gamma: drive.gamma,
        tau: drive.tau,
    })
}

pub(crate) fn decay_grid(cfg: &Config, grid: Option<Grid>) -> Vec<f64> {
    grid.unwrap_or(Grid {
        start: cfg.scan.decay_max_tau_s / cfg.scan.decay_points as f64,
        stop: cfg.scan.decay_max_tau_s,
        n: cfg.scan.decay_points,
    })
    .points()
}

fn scan_table(d: &ScanDataset) -> Table {
    let mut t = Table::new(&["abscissa", "p_up", "sigma"]);
    for i in 0..d.len() {
        t.push(vec![
            d.abscissa[i].into(),
            d.p_up[i].into(),
            d.sigma[i].into(),
        ]);
    }
    t
}

fn series_table(d: &ScanDataset) -> Table {
    let mut t = Table::new(&["t_s", "value"]);
    for i in 0..d.len() {
        t.push(vec![d.abscissa[i].into(), d.p_up[i].into()]);
    }
    t
}

fn simulate(ctx: &Context, kind: SimKind) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let shots = cfg.scan.shots;
    let (stem, table) = match kind {
        SimKind::Thermometry => {
            let grid = thermometry_grid(cfg, ctx.grid);
            let d = simulate_scan(&thermometry_model(cfg), &grid, shots, ctx.seed)?;
            ("simulate_thermometry", scan_table(&d))
        }
        SimKind::Precession => {
            let grid: Vec<f64> = ctx
                .grid
                .unwrap_or(Grid {
                    start: 0.0,
                    stop: 360.0,
                    n: cfg.scan.precession_points,
                })
                .points()
                .into_iter()
                .map(deg_to_rad)
                .collect();
            let d = simulate_scan(&precession_model(cfg)?, &grid, shots, ctx.seed)?;
            ("simulate_precession", scan_table(&d))
        }
        SimKind::Decay => {
            let grid = decay_grid(cfg, ctx.grid);
            let model = ScanModel::Decay {
                gamma: cfg.drive.gamma_per_s,
            };
            let d = simulate_scan(&model, &grid, shots, ctx.seed)?;
            ("simulate_decay", scan_table(&d))
        }
        SimKind::Drift => {
            let s = &cfg.stability;
            let d =
                simulate_angle_drift(&cfg.drift_model(ctx.seed), s.drift_duration_s, s.drift_dt_s)?;
            ("simulate_drift", series_table(&d))
        }
        SimKind::Pathnoise => {
            let s = &cfg.stability;
            let d = simulate_path_noise(
                &cfg.path_noise_model(ctx.seed),
                s.path_duration_s,
                s.path_rate_hz,
            )?;
            ("simulate_pathnoise", series_table(&d))
        }
    };
    let path = ctx.sink.csv(stem, &table, cfg)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub(crate) fn require_converged(name: &str, fit: &FitResult) -> Result<(), CliError> {
    if fit.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "{name} after {} iterations, last state {:?}",
            fit.iterations, fit.params
        )))
    }
}

fn fit(ctx: &Context, kind: FitKind, data: &std::path::Path) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let (abscissa, p_up, sigma) = read_scan_csv(data)?;
    let scan_kind = match kind {
        FitKind::Thermometry => ScanKind::Thermometry,
        FitKind::Precession => ScanKind::Precession,
        FitKind::Gamma => ScanKind::Decay,
    };
    let dataset = ScanDataset::new(abscissa, p_up, sigma, ScanMeta::new(scan_kind))
        .map_err(|e| CliError::Input(format!("{}: {e}", data.display())))?;
    let drive = cfg.drive();
    let (stem, result) = match kind {
        FitKind::Thermometry => (
            "fit_thermometry",
            fit_thermometry(&dataset, &cfg.geometry(), &drive, &cfg.trap_config(), None)?,
        ),
        FitKind::Precession => (
            "fit_precession",
            fit_precession(&dataset, drive.gamma, drive.tau)?,
        ),
        FitKind::Gamma => ("fit_gamma", fit_far_detuned_gamma(&dataset)?),
    };
    ctx.sink.json(stem, &result, cfg)?;
    print_json(&serde_json::to_value(&result).expect("fit serialises"));
    require_converged(stem, &result)
}

fn optimize_angle(
    ctx: &Context,
    min_deg: Option<f64>,
    max_deg: Option<f64>,
) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let lo = min_deg.unwrap_or(cfg.beams.theta_min_deg);
    let hi = max_deg.unwrap_or(cfg.beams.theta_max_deg);
    let mount = odf_core::MountGeometry::default();
    let (theta, ratio) = optimize_theta(
        &cfg.geometry(),
        &cfg.trap_config(),
        &cfg.drive(),
        &cfg.thermal(),
        (deg_to_rad(lo), deg_to_rad(hi)),
        &mount,
    )?;
    let record = json!({
        "theta_deg": rad_to_deg(theta),
        "ratio": ratio,
        "window_deg": [lo, hi],
        "n_bar": cfg.thermal.n_bar,
        "config_digest": cfg.digest(),
    });
    ctx.sink.json("optimize_angle", &record, cfg)?;
    print_json(&record);
    Ok(())
}
