//! Beam-crossing geometry and the in-bore actuator kinematics.
//!
//! Coordinates: ẑ is the crystal rotation axis, x̂ the in-plane reference
//! direction along which both ODF beams leave the fixed prism mirrors. Beam 1
//! is steered up from below the crystal plane, beam 2 down from above, so the
//! difference wave vector k₁ − k₂ points along ẑ for a symmetric pose.
//!
//! Each in-bore mirror sits on a rotary stage (closed loop), a linear stage
//! moving it along x̂ (closed loop) and a tip/tilt mount (open loop). A mirror
//! rotation φ deflects its beam by 2φ; the linear stage sets the standoff so
//! the deflected beam still passes through the crystal centre.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{deg_to_rad, rad_to_deg};

/// Range over which the beam angle has been characterised experimentally.
/// Informational only; the hard limits live in [`MountGeometry`].
pub const CHARACTERIZED_RANGE_DEG: (f64, f64) = (14.0, 28.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Wavelength shared by both ODF beams, m.
    pub laser_wavelength: f64,
    /// Full separation angle between the two ODF beams, rad.
    pub theta_odf: f64,
    /// Fixed EIT beam separation angle, rad.
    pub theta_eit: f64,
    /// Angle between δk and the crystal rotation axis, rad.
    pub tilt_error: f64,
}

impl Default for BeamGeometry {
    fn default() -> Self {
        Self {
            laser_wavelength: 313.1e-9,
            theta_odf: deg_to_rad(28.0),
            theta_eit: deg_to_rad(18.0),
            tilt_error: 0.0,
        }
    }
}

impl BeamGeometry {
    pub fn with_theta_deg(self, theta_deg: f64) -> Self {
        Self {
            theta_odf: deg_to_rad(theta_deg),
            ..self
        }
    }

    pub fn with_tilt_error(self, tilt_error: f64) -> Self {
        Self { tilt_error, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.laser_wavelength > 0.0) {
            return Err(Error::domain("laser_wavelength", "must be > 0"));
        }
        if !(0.0..PI).contains(&self.theta_odf) {
            return Err(Error::domain("theta_odf", "must lie in [0, pi)"));
        }
        if !(self.tilt_error >= 0.0) {
            return Err(Error::domain("tilt_error", "must be >= 0"));
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.laser_wavelength
    }
}

/// Difference wave vector magnitude δk = 2k sin(θ_ODF/2), 1/m.
pub fn delta_k(geom: &BeamGeometry) -> f64 {
    2.0 * geom.wavenumber() * (0.5 * geom.theta_odf).sin()
}

/// Beat-note (lattice) wavelength λ_ODF = 2π/δk, m.
pub fn effective_wavelength(geom: &BeamGeometry) -> Result<f64> {
    if geom.theta_odf == 0.0 {
        return Err(Error::DivergentWavelength);
    }
    Ok(TAU / delta_k(geom))
}

/// Beat-note phase difference, in degrees, between the crystal centre and a
/// point `radius` away in the crystal plane caused by the tilt of δk.
pub fn misalignment_phase(geom: &BeamGeometry, radius: f64) -> f64 {
    rad_to_deg(delta_k(geom) * geom.tilt_error.sin() * radius)
}

/// Fixed mechanical layout of the mirror stack plus the travel and angle limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MountGeometry {
    /// Mirror-to-crystal distance along x̂ with the linear stage at zero, m.
    pub d_axial: f64,
    /// Height of each incoming beam above/below the crystal plane, m.
    pub d_radial: f64,
    /// Linear stage travel, m. Positions run over `[0, linear_travel]`.
    pub linear_travel: f64,
    /// Rotary stage travel, degrees, centred on the parallel reference.
    pub rotary_travel_deg: f64,
    /// Largest allowed distance between a beam and the crystal centre, m.
    pub crossing_tolerance: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
}

impl Default for MountGeometry {
    /// Lever arms chosen so that the 12°–36° window maps onto the 21 mm
    /// linear travel (0.15 mm to 20.75 mm).
    fn default() -> Self {
        Self {
            d_axial: 30.6e-3,
            d_radial: 3.2e-3,
            linear_travel: 21e-3,
            rotary_travel_deg: 100.0,
            crossing_tolerance: 10e-6,
            theta_min_deg: 12.0,
            theta_max_deg: 36.0,
        }
    }
}

/// Actuator readings for one in-bore ODF mirror.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorActuators {
    /// Closed-loop rotary offset from the parallel reference, degrees.
    pub rotary_angle: f64,
    /// Closed-loop linear stage position, m.
    pub linear_pos: f64,
    /// Open-loop out-of-plane rotation (R_z), degrees.
    pub tip: f64,
    /// Open-loop in-plane fine rotation (R_y), degrees.
    pub tilt: f64,
}

/// Actuator state of both ODF mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorState {
    pub mirrors: [MirrorActuators; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorBudget {
    /// Rotary stage repeatability, degrees.
    pub rotary_repeatability: f64,
    /// Linear stage repeatability, m.
    pub linear_repeatability: f64,
    /// Open-loop tip/tilt resolution, degrees.
    pub openloop_resolution: f64,
}

impl Default for ActuatorBudget {
    fn default() -> Self {
        Self {
            rotary_repeatability: 0.0014,
            linear_repeatability: 30e-9,
            openloop_resolution: 0.0001,
        }
    }
}

type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Launch point and unit direction of beam `index` (0 below, 1 above the plane).
fn beam_ray(index: usize, m: &MirrorActuators, mount: &MountGeometry) -> (Vec3, Vec3) {
    let deflection = 2.0 * deg_to_rad(m.rotary_angle + m.tilt);
    let out_of_plane = 2.0 * deg_to_rad(m.tip);
    let standoff = mount.d_axial - m.linear_pos;
    let side = if index == 0 { -1.0 } else { 1.0 };
    let origin = [-standoff, 0.0, side * mount.d_radial];
    let dir = [
        deflection.cos() * out_of_plane.cos(),
        out_of_plane.sin(),
        -side * deflection.sin() * out_of_plane.cos(),
    ];
    (origin, dir)
}

/// Forward kinematics: the beam geometry implied by a mirror pose.
///
/// `base` supplies the wavelength and EIT angle; θ_ODF and the tilt of δk are
/// computed from the two beam directions.
pub fn angle_from_actuators(
    state: &ActuatorState,
    mount: &MountGeometry,
    base: &BeamGeometry,
) -> Result<BeamGeometry> {
    let half_rotary = 0.5 * mount.rotary_travel_deg;
    let mut dirs = [[0.0; 3]; 2];
    for (i, m) in state.mirrors.iter().enumerate() {
        if m.rotary_angle.abs() > half_rotary {
            return Err(Error::GeometryInfeasible(format!(
                "mirror {} rotary angle {:.4} deg outside ±{half_rotary} deg travel",
                i + 1,
                m.rotary_angle
            )));
        }
        if !(0.0..=mount.linear_travel).contains(&m.linear_pos) {
            return Err(Error::GeometryInfeasible(format!(
                "mirror {} linear position {:.6} m outside [0, {}] m travel",
                i + 1,
                m.linear_pos,
                mount.linear_travel
            )));
        }
        let (origin, dir) = beam_ray(i, m, mount);
        let miss = norm(cross(origin, dir));
        if miss > mount.crossing_tolerance {
            return Err(Error::GeometryInfeasible(format!(
                "beam {} misses the crystal centre by {:.3e} m (tolerance {:.3e} m)",
                i + 1,
                miss,
                mount.crossing_tolerance
            )));
        }
        dirs[i] = dir;
    }
    let [u1, u2] = dirs;
    let theta_odf = norm(cross(u1, u2)).atan2(dot(u1, u2));
    let dk = [u1[0] - u2[0], u1[1] - u2[1], u1[2] - u2[2]];
    let tilt_error = (dk[0].hypot(dk[1])).atan2(dk[2]);

    let theta_deg = rad_to_deg(theta_odf);
    if theta_deg < mount.theta_min_deg - 1e-9 || theta_deg > mount.theta_max_deg + 1e-9 {
        return Err(Error::GeometryInfeasible(format!(
            "pose gives theta_odf = {theta_deg:.4} deg, outside the mechanical window [{}, {}] deg",
            mount.theta_min_deg, mount.theta_max_deg
        )));
    }
    Ok(BeamGeometry {
        theta_odf,
        tilt_error,
        ..*base
    })
}

/// Inverse kinematics: symmetric mirror pose producing `target_theta` (rad)
/// with both beams crossing at the crystal centre.
pub fn actuators_for_angle(target_theta: f64, mount: &MountGeometry) -> Result<ActuatorState> {
    let target_deg = rad_to_deg(target_theta);
    if !(target_deg >= mount.theta_min_deg - 1e-12 && target_deg <= mount.theta_max_deg + 1e-12) {
        return Err(Error::AngleOutOfRange {
            value_deg: target_deg,
            min_deg: mount.theta_min_deg,
            max_deg: mount.theta_max_deg,
        });
    }
    let deflection = 0.5 * target_theta;
    let standoff = mount.d_radial / deflection.tan();
    let linear_pos = mount.d_axial - standoff;
    if !(0.0..=mount.linear_travel).contains(&linear_pos) {
        return Err(Error::GeometryInfeasible(format!(
            "theta_odf = {target_deg:.4} deg needs linear position {linear_pos:.6} m, outside [0, {}] m",
            mount.linear_travel
        )));
    }
    let mirror = MirrorActuators {
        rotary_angle: rad_to_deg(0.5 * deflection),
        linear_pos,
        tip: 0.0,
        tilt: 0.0,
    };
    Ok(ActuatorState {
        mirrors: [mirror; 2],
    })
}

/// Worst-case θ_ODF error from the closed-loop repeatabilities, rad.
///
/// Each mirror's rotary error deflects its beam by twice the angle and the two
/// mirrors add linearly; the linear stage contributes its angular equivalent
/// at lever arm `d_axial`.
pub fn repeatability_to_angle_error(budget: &ActuatorBudget, mount: &MountGeometry) -> f64 {
    let rotary = 2.0 * 2.0 * deg_to_rad(budget.rotary_repeatability);
    let linear = if budget.linear_repeatability == 0.0 {
        0.0
    } else {
        (budget.linear_repeatability / mount.d_axial).atan()
    };
    rotary + linear
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at_deg(theta: f64) -> BeamGeometry {
        BeamGeometry::default().with_theta_deg(theta)
    }

    #[test]
    fn delta_k_examples() {
        assert_eq!(delta_k(&at_deg(0.0)), 0.0);
        let dk = delta_k(&at_deg(28.0));
        assert!((dk - 9.71e6).abs() < 0.01e6, "dk = {dk}");
        let lam = effective_wavelength(&at_deg(28.0)).unwrap();
        assert!((lam - 647e-9).abs() < 1e-9, "lambda_odf = {lam}");
        // 313.1 nm / (2 sin 7°) by hand
        let lam14 = effective_wavelength(&at_deg(14.0)).unwrap();
        assert!(
            (lam14 - 1.2846e-6).abs() < 0.001e-6,
            "lambda_odf(14) = {lam14}"
        );
    }

    #[test]
    fn effective_wavelength_limits() {
        assert_eq!(
            effective_wavelength(&at_deg(0.0)),
            Err(Error::DivergentWavelength)
        );
        let g = BeamGeometry {
            theta_odf: PI,
            ..Default::default()
        };
        assert!((effective_wavelength(&g).unwrap() - 0.5 * g.laser_wavelength).abs() < 1e-20);
        let g = at_deg(60.0);
        assert!((effective_wavelength(&g).unwrap() - g.laser_wavelength).abs() < 1e-20);
    }

    fn symmetric(offset_deg: f64, mount: &MountGeometry) -> ActuatorState {
        let deflection = deg_to_rad(2.0 * offset_deg);
        let m = MirrorActuators {
            rotary_angle: offset_deg,
            linear_pos: mount.d_axial - mount.d_radial / deflection.tan(),
            ..Default::default()
        };
        ActuatorState { mirrors: [m; 2] }
    }

    #[test]
    fn forward_kinematics_examples() {
        let mount = MountGeometry::default();
        let base = BeamGeometry::default();
        let g = angle_from_actuators(&symmetric(3.5, &mount), &mount, &base).unwrap();
        assert!((rad_to_deg(g.theta_odf) - 14.0).abs() < 1e-9);
        assert!(g.tilt_error < 1e-12);
        let g = angle_from_actuators(&symmetric(7.0, &mount), &mount, &base).unwrap();
        assert!((rad_to_deg(g.theta_odf) - 28.0).abs() < 1e-9);

        // A 40° pose cannot be reached: either the stage runs out of travel or
        // the crossing misses the crystal.
        let err = angle_from_actuators(&symmetric(10.0, &mount), &mount, &base).unwrap_err();
        assert!(matches!(err, Error::GeometryInfeasible(_)), "{err}");
        let mut wide = symmetric(7.0, &mount);
        wide.mirrors[0].rotary_angle = 10.0;
        wide.mirrors[1].rotary_angle = 10.0;
        assert!(matches!(
            angle_from_actuators(&wide, &mount, &base),
            Err(Error::GeometryInfeasible(_))
        ));
        // Unlimited travel, crossing at centre, still beyond the 36° window.
        let roomy = MountGeometry {
            linear_travel: 1.0,
            d_axial: 0.5,
            ..mount
        };
        let err = angle_from_actuators(&symmetric(10.0, &roomy), &roomy, &base).unwrap_err();
        assert!(err.to_string().contains("40.0000"), "{err}");
    }

    #[test]
    fn asymmetric_pose_tilts_delta_k() {
        let mount = MountGeometry::default();
        let mut s = symmetric(7.0, &mount);
        s.mirrors[0].tilt = 0.001;
        let g = angle_from_actuators(&s, &mount, &BeamGeometry::default()).unwrap();
        // in-plane: both the sum angle and the bisector move by the 2x deflection
        assert!((rad_to_deg(g.theta_odf) - 28.002).abs() < 1e-9);
        assert!((rad_to_deg(g.tilt_error) - 0.001).abs() < 1e-9);
    }

    #[test]
    fn inverse_kinematics_examples() {
        let mount = MountGeometry::default();
        let base = BeamGeometry::default();
        let s = actuators_for_angle(deg_to_rad(28.0), &mount).unwrap();
        let g = angle_from_actuators(&s, &mount, &base).unwrap();
        assert!((g.theta_odf - deg_to_rad(28.0)).abs() < 1e-12);

        match actuators_for_angle(deg_to_rad(11.0), &mount) {
            Err(e @ Error::AngleOutOfRange { .. }) => {
                let msg = e.to_string();
                assert!(msg.contains("12.0000") && msg.contains("36.0000"), "{msg}");
            }
            other => panic!("expected out-of-range, got {other:?}"),
        }
        let s = actuators_for_angle(deg_to_rad(36.0), &mount).unwrap();
        assert!(angle_from_actuators(&s, &mount, &base).is_ok());
    }

    #[test]
    fn round_trip_over_window() {
        let mount = MountGeometry::default();
        let base = BeamGeometry::default();
        for i in 0..100 {
            let theta = deg_to_rad(12.0 + 24.0 * i as f64 / 99.0);
            let s = actuators_for_angle(theta, &mount).unwrap();
            let g = angle_from_actuators(&s, &mount, &base).unwrap();
            assert!((g.theta_odf - theta).abs() < 1e-9);
        }
    }

    /// Explicit 3D construction: beams symmetric about an axis tilted by ε
    /// from ẑ towards x̂, phase = (k₁ − k₂)·r for r = radius·x̂.
    fn phase_oracle_deg(geom: &BeamGeometry, radius: f64) -> f64 {
        let k = TAU / geom.laser_wavelength;
        let h = 0.5 * geom.theta_odf;
        let e = geom.tilt_error;
        // untilted beams in the x-z plane, then rotate about ŷ by ε
        let rot = |v: [f64; 3]| {
            [
                v[0] * e.cos() + v[2] * e.sin(),
                v[1],
                -v[0] * e.sin() + v[2] * e.cos(),
            ]
        };
        let k1 = rot([k * h.cos(), 0.0, k * h.sin()]);
        let k2 = rot([k * h.cos(), 0.0, -k * h.sin()]);
        let dkx = k1[0] - k2[0];
        (dkx * radius).to_degrees()
    }

    #[test]
    fn misalignment_examples() {
        let g = at_deg(28.0).with_tilt_error(deg_to_rad(0.002));
        let phi = misalignment_phase(&g, 150e-6);
        assert!((phi - 2.9).abs() < 0.05, "phi = {phi}");
        assert_eq!(misalignment_phase(&at_deg(28.0), 150e-6), 0.0);
        let g2 = at_deg(28.0).with_tilt_error(deg_to_rad(0.004));
        let phi2 = misalignment_phase(&g2, 150e-6);
        assert!((phi2 - 5.8).abs() < 0.1, "phi2 = {phi2}");
        assert!((phi2 / phi - 2.0).abs() < 1e-5);
    }

    #[test]
    fn repeatability_examples() {
        let mount = MountGeometry::default();
        let zero = ActuatorBudget {
            rotary_repeatability: 0.0,
            linear_repeatability: 0.0,
            openloop_resolution: 0.0,
        };
        assert_eq!(repeatability_to_angle_error(&zero, &mount), 0.0);

        let rotary = ActuatorBudget {
            rotary_repeatability: 0.0014,
            ..zero
        };
        let err = repeatability_to_angle_error(&rotary, &mount);
        // brute force over the four sign corners of ±0.0014° per mirror
        let base = BeamGeometry::default();
        let nominal = actuators_for_angle(deg_to_rad(28.0), &mount).unwrap();
        let theta0 = angle_from_actuators(&nominal, &mount, &base)
            .unwrap()
            .theta_odf;
        let mut worst: f64 = 0.0;
        for s1 in [-1.0, 1.0] {
            for s2 in [-1.0, 1.0] {
                let mut s = nominal;
                s.mirrors[0].rotary_angle += s1 * 0.0014;
                s.mirrors[1].rotary_angle += s2 * 0.0014;
                let t = angle_from_actuators(&s, &mount, &base).unwrap().theta_odf;
                worst = worst.max((t - theta0).abs());
            }
        }
        assert!((rad_to_deg(err) - 0.0056).abs() < 1e-12);
        assert!((err - worst).abs() < 1e-12, "{err} vs {worst}");

        let linear = ActuatorBudget {
            linear_repeatability: 30e-9,
            ..zero
        };
        let lever = MountGeometry {
            d_axial: 50e-3,
            ..mount
        };
        let e = repeatability_to_angle_error(&linear, &lever);
        assert!((e - 6e-7).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn delta_k_monotone(a in 0.0f64..PI, b in 0.0f64..PI) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            let g = BeamGeometry::default();
            let low = delta_k(&BeamGeometry { theta_odf: lo, ..g });
            let high = delta_k(&BeamGeometry { theta_odf: hi, ..g });
            prop_assert!(low < high);
        }

        #[test]
        fn phase_matches_3d_oracle(
            theta_deg in 5.0f64..179.0,
            tilt_deg in 0.05f64..5.0,
            radius in 0.0f64..1e-3,
            lambda in 200e-9f64..1100e-9,
        ) {
            let g = BeamGeometry {
                laser_wavelength: lambda,
                theta_odf: deg_to_rad(theta_deg),
                tilt_error: deg_to_rad(tilt_deg),
                ..Default::default()
            };
            let a = misalignment_phase(&g, radius);
            let b = phase_oracle_deg(&g, radius);
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300), "{} vs {}", a, b);
        }

        #[test]
        fn phase_linear_in_radius_and_small_tilt(r in 1e-6f64..1e-3, eps_deg in 1e-5f64..0.1) {
            let g = at_deg(28.0).with_tilt_error(deg_to_rad(eps_deg));
            let g2 = at_deg(28.0).with_tilt_error(deg_to_rad(2.0 * eps_deg));
            let p = misalignment_phase(&g, r);
            prop_assert!((misalignment_phase(&g, 2.0 * r) / p - 2.0).abs() < 1e-12);
            prop_assert!((misalignment_phase(&g2, r) / p - 2.0).abs() < 1e-5);
        }
    }
}
