//! Modelling toolkit for in-situ tunable optical dipole forces (ODF) on
//! two-dimensional ion crystals in a Penning trap.
//!
//! The crate is organised bottom-up:
//!
//! * [`units`] and [`params`]: physical constants, unit conversions and the
//!   configuration values shared by everything else.
//! * [`beamgeom`]: beam-crossing geometry, the difference wave vector and the
//!   in-bore actuator kinematics.
//! * [`spinmotion`]: force magnitude with the Debye-Waller factor, the
//!   uniform Ising coupling, phase-space loops and the two echo lineshapes.
//! * [`expsim`]: seeded synthetic experiments and stability time series.
//! * [`estimate`]: weighted least-squares fits and the beam-angle optimizer.
//!
//! All quantities are SI internally with angular frequencies in rad/s.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamgeom;
pub mod error;
pub mod estimate;
pub mod expsim;
pub mod params;
pub mod spinmotion;
pub mod units;

pub use beamgeom::{ActuatorBudget, ActuatorState, BeamGeometry, MirrorActuators, MountGeometry};
pub use error::{Error, Result};
pub use estimate::{F0Estimate, FitFlag, FitResult};
pub use expsim::{DriftModel, PathNoiseModel, ScanDataset, ScanKind};
pub use params::{OdfDrive, ThermalState, TrapIonConfig};
pub use spinmotion::{EchoSequence, InteractionStrengths, LoopPhases};
