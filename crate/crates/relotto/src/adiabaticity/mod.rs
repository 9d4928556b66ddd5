//! The adiabaticity parameter `lambda` of a work stroke.
//!
//! For a frequency schedule `omega(t)` on `[0, T]`, let `X` and `Y` solve
//! `x'' + omega(t)^2 x = 0` with `X(0) = 0, X'(0) = 1` and `Y(0) = 1, Y'(0) = 0`.
//! With `w0 = omega(0)` and `w1 = omega(T)`,
//!
//! ```text
//! lambda = { w0^2 [w1^2 X^2 + X'^2] + [w1^2 Y^2 + Y'^2] } / (2 w0 w1)
//! ```
//!
//! evaluated at `t = T`. `lambda = 1` for quasi-static driving and
//! `(w0^2 + w1^2) / (2 w0 w1)` for an instantaneous quench.

mod integrator;
mod protocol;

use serde::{Deserialize, Serialize};

pub use integrator::{integrate, StepStats, Tolerances};
pub use protocol::{DriveProtocol, ProtocolKind};

use crate::error::{positive, Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-12;
/// Absolute tolerance is this fraction of the relative one.
pub const ABS_TOL_RATIO: f64 = 1e-2;
pub const MIN_REL_TOL: f64 = 1e-13;
pub const MAX_REL_TOL: f64 = 1e-6;

const MAX_STEPS: usize = 50_000_000;

/// The two analytically solvable driving limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Adiabatic,
    Sudden,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adiabatic" => Ok(Regime::Adiabatic),
            "sudden" => Ok(Regime::Sudden),
            other => Err(Error::Protocol(format!(
                "unknown regime `{other}` (expected adiabatic or sudden)"
            ))),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Adiabatic => "adiabatic",
            Regime::Sudden => "sudden",
        })
    }
}

pub fn lambda_closed_form(regime: Regime, omega_c: f64, omega_h: f64) -> Result<f64> {
    let omega_c = positive("omega_c", omega_c)?;
    let omega_h = positive("omega_h", omega_h)?;
    Ok(match regime {
        Regime::Adiabatic => 1.0,
        Regime::Sudden => sudden_lambda(omega_c, omega_h),
    })
}

pub(crate) fn sudden_lambda(omega_c: f64, omega_h: f64) -> f64 {
    // (a^2 + b^2) / 2ab = 1 + (a - b)^2 / 2ab, exact 1 at a = b.
    let d = omega_c - omega_h;
    1.0 + d * d / (2.0 * omega_c * omega_h)
}

/// Fundamental solutions at the end of the stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorTrajectory {
    pub x: f64,
    pub dx: f64,
    pub y: f64,
    pub dy: f64,
    pub duration: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Largest scaled local error estimate over accepted steps.
    pub max_error_norm: f64,
    /// Largest `|X' Y - X Y' - 1|` seen at any accepted step.
    pub max_wronskian_drift: f64,
}

impl OscillatorTrajectory {
    pub fn wronskian(&self) -> f64 {
        self.dx * self.y - self.x * self.dy
    }
}

/// Integrates both fundamental solutions across the stroke.
pub fn solve_husimi(protocol: &DriveProtocol, rel_tol: f64) -> Result<OscillatorTrajectory> {
    if !(MIN_REL_TOL..=MAX_REL_TOL).contains(&rel_tol) {
        return Err(Error::Domain {
            name: "rel_tol",
            value: rel_tol,
            requirement: "relative tolerance must lie in [1e-13, 1e-6]",
        });
    }
    if protocol.kind() == ProtocolKind::Sudden {
        return Err(Error::Protocol(
            "sudden switch has no duration; use lambda_closed_form".into(),
        ));
    }
    let tol = Tolerances {
        rel: rel_tol,
        abs: ABS_TOL_RATIO * rel_tol,
        max_steps: MAX_STEPS,
    };
    let rhs = |t: f64, s: &[f64; 4]| {
        let w2 = protocol.omega_squared(t);
        [s[1], -w2 * s[0], s[3], -w2 * s[2]]
    };

    let mut state = [0.0, 1.0, 1.0, 0.0];
    let mut stats = StepStats::default();
    let mut drift: f64 = 0.0;
    // Integrate knot to knot so the solver never straddles a kink in omega''.
    for seg in protocol.breakpoints().windows(2) {
        let (end, seg_stats) = integrate(rhs, seg[0], seg[1], state, tol, |_, s| {
            drift = drift.max((s[1] * s[2] - s[0] * s[3] - 1.0).abs());
        })?;
        state = end;
        stats.absorb(seg_stats);
    }

    Ok(OscillatorTrajectory {
        x: state[0],
        dx: state[1],
        y: state[2],
        dy: state[3],
        duration: protocol.duration(),
        steps: stats.accepted,
        rejected_steps: stats.rejected,
        max_error_norm: stats.max_error_norm,
        max_wronskian_drift: drift,
    })
}

/// `lambda` for a stroke from `omega_start` to `omega_end`.
pub fn lambda_from_trajectory(
    traj: &OscillatorTrajectory,
    omega_start: f64,
    omega_end: f64,
) -> Result<f64> {
    let w0 = positive("omega_start", omega_start)?;
    let w1 = positive("omega_end", omega_end)?;
    let w1sq = w1 * w1;
    let x_part = w1sq * traj.x * traj.x + traj.dx * traj.dx;
    let y_part = w1sq * traj.y * traj.y + traj.dy * traj.dy;
    Ok((w0 * w0 * x_part + y_part) / (2.0 * w0 * w1))
}

/// `lambda` for any protocol, routing the sudden switch to its closed form.
pub fn protocol_lambda(protocol: &DriveProtocol, rel_tol: f64) -> Result<f64> {
    let (w0, w1) = (protocol.omega_start(), protocol.omega_end());
    if protocol.kind() == ProtocolKind::Sudden {
        return lambda_closed_form(Regime::Sudden, w0, w1);
    }
    let traj = solve_husimi(protocol, rel_tol)?;
    lambda_from_trajectory(&traj, w0, w1)
}

/// Adiabaticity parameters of a compression stroke and of its time mirror
/// used as the expansion stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokeLambdas {
    pub compression: f64,
    pub expansion: f64,
}

impl StrokeLambdas {
    pub fn mean(&self) -> f64 {
        0.5 * (self.compression + self.expansion)
    }
}

/// Both stroke parameters for `protocol` and its reverse. Fails with
/// [`Error::StrokeMismatch`] if they differ by more than the integration
/// accuracy, since the cycle energetics assume a single `lambda`.
pub fn stroke_lambdas(protocol: &DriveProtocol, rel_tol: f64) -> Result<StrokeLambdas> {
    let compression = protocol_lambda(protocol, rel_tol)?;
    let expansion = protocol_lambda(&protocol.reversed(), rel_tol)?;
    let allowed = (1e4 * rel_tol).max(1e-8) * compression;
    if (compression - expansion).abs() > allowed {
        return Err(Error::StrokeMismatch {
            compression,
            expansion,
        });
    }
    Ok(StrokeLambdas {
        compression,
        expansion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(lambda_closed_form(Regime::Sudden, 1.0, 2.0).unwrap(), 1.25);
        assert_eq!(lambda_closed_form(Regime::Sudden, 3.0, 3.0).unwrap(), 1.0);
        assert_eq!(
            lambda_closed_form(Regime::Adiabatic, 1.0, 7.0).unwrap(),
            1.0
        );
        assert!(lambda_closed_form(Regime::Sudden, 0.0, 1.0).is_err());
    }

    #[test]
    fn constant_frequency_solution() {
        let (w, t) = (1.7, 13.0);
        let p = DriveProtocol::constant(w, t).unwrap();
        let traj = solve_husimi(&p, 1e-10).unwrap();
        let tol = 1e-8;
        assert!((traj.x - (w * t).sin() / w).abs() < tol);
        assert!((traj.dx - (w * t).cos()).abs() < tol);
        assert!((traj.y - (w * t).cos()).abs() < tol);
        assert!((traj.dy + w * (w * t).sin()).abs() < tol);
        let lam = lambda_from_trajectory(&traj, w, w).unwrap();
        assert!((lam - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tolerance_and_kind_validation() {
        let p = DriveProtocol::linear_omega(1.0, 2.0, 1.0).unwrap();
        assert!(solve_husimi(&p, 1e-5).is_err());
        assert!(solve_husimi(&p, 1e-14).is_err());
        let s = DriveProtocol::sudden(1.0, 2.0).unwrap();
        assert!(solve_husimi(&s, 1e-10).is_err());
        assert_eq!(protocol_lambda(&s, 1e-10).unwrap(), 1.25);
    }

    #[test]
    fn regime_parsing() {
        assert_eq!("sudden".parse::<Regime>().unwrap(), Regime::Sudden);
        assert!("quasi".parse::<Regime>().is_err());
        assert_eq!(Regime::Adiabatic.to_string(), "adiabatic");
    }

    #[test]
    fn mirrored_strokes_agree() {
        for d in [0.5, 2.0, 10.0] {
            let p = DriveProtocol::linear_omega(1.0, 2.0, d).unwrap();
            let s = stroke_lambdas(&p, 1e-11).unwrap();
            assert!((s.compression - s.expansion).abs() < 1e-8, "d = {d}: {s:?}");
            assert!(s.compression > 1.0);
        }
    }
}
