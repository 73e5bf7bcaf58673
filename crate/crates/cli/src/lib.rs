#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `odf`: command-line front end for the ODF modelling toolkit.
//!
//! Every file written goes to `--out` together with a
//! `<stem>.manifest.json` recording the command, resolved configuration,
//! its SHA-256 digest, the seed and a UTC timestamp. Exit codes: 0 success,
//! 1 input or configuration error, 2 a fit did not converge.

mod commands;
pub mod config;
pub mod output;
mod reproduce;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    NotConverged(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::NotConverged(m) => write!(f, "fit did not converge: {m}"),
        }
    }
}

impl From<odf_core::Error> for CliError {
    fn from(e: odf_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::NotConverged(_) => 2,
        }
    }
}

/// `start:stop:n`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        (0..self.n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:n, got `{s}`"));
    }
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{p}` is not a number"))
    };
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a point count", parts[2]))?;
    if n == 0 {
        return Err("point count must be >= 1".into());
    }
    let (start, stop) = (num(parts[0])?, num(parts[1])?);
    if !start.is_finite() || !stop.is_finite() {
        return Err("grid limits must be finite".into());
    }
    Ok(Grid { start, stop, n })
}

#[derive(Debug, Parser)]
#[command(
    name = "odf",
    version,
    about = "Tunable optical dipole force modelling: geometry, synthetic scans, fits and figure datasets"
)]
pub struct Cli {
    /// JSON configuration merged over the built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Comma-separated scenario overlays, applied in order.
    #[arg(long, global = true, value_delimiter = ',')]
    pub scenario: Vec<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Shots per scan point.
    #[arg(long, global = true)]
    pub shots: Option<u32>,
    /// ODF beam separation angle, degrees.
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Scan grid `start:stop:n` in the command's abscissa units.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Beam geometry record for --theta or an actuator file.
    Geom {
        /// JSON `{"mirrors": [{rotary_angle, linear_pos, tip, tilt}, ...]}`.
        #[arg(long)]
        actuators: Option<PathBuf>,
    },
    /// F0 and J_bar against beam angle for each n_bar in `scan.n_bar_list` (grid in degrees).
    Curves,
    /// F0/Gamma against beam angle at fixed |delta_AC| and Gamma (grid in degrees).
    RatioScan,
    /// Synthetic scan or stability series.
    Simulate {
        #[arg(value_enum)]
        kind: SimKind,
    },
    /// Fit a scan CSV (`abscissa,p_up,sigma`) and emit the FitResult as JSON.
    Fit {
        #[arg(value_enum)]
        kind: FitKind,
        #[arg(long)]
        data: PathBuf,
    },
    /// Beam angle maximising F0/Gamma within a window.
    OptimizeAngle {
        #[arg(long)]
        min_deg: Option<f64>,
        #[arg(long)]
        max_deg: Option<f64>,
    },
    /// Regenerate a figure's dataset end to end.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    /// P_up against mu/2pi (grid in Hz).
    Thermometry,
    /// P_up against tipping angle (grid in degrees, CSV abscissa in rad).
    Precession,
    /// Far-detuned P_up against tau (grid in s).
    Decay,
    /// Beam-angle drift series.
    Drift,
    /// Differential path-length series.
    Pathnoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    Thermometry,
    Precession,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1de,
    Fig3c,
    Fig4c,
    Fig5,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
