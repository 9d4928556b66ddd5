//! Dormand-Prince 5(4) embedded Runge-Kutta pair with local extrapolation
//! and standard step-size control.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest scaled error norm over accepted steps (<= 1 by construction).
    pub max_error_norm: f64,
}

impl StepStats {
    pub(crate) fn absorb(&mut self, other: StepStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.max_error_norm = self.max_error_norm.max(other.max_error_norm);
    }
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1 > t0`. `observe` sees every
/// accepted step.
pub fn integrate<const N: usize, F, O>(
    rhs: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    tol: Tolerances,
    mut observe: O,
) -> Result<([f64; N], StepStats)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    let mut stats = StepStats::default();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, stats));
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = initial_step(&rhs, t0, &y0, &k1, span, tol);

    while t < t1 {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::TooManySteps {
                max_steps: tol.max_steps,
                t,
            });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepUnderflow { t });
        }

        let stage = |coeffs: &[(f64, &[f64; N])]| -> [f64; N] {
            let mut out = y;
            for (c, k) in coeffs {
                for i in 0..N {
                    out[i] += h * c * k[i];
                }
            }
            out
        };
        let k2 = rhs(t + C2 * h, &stage(&[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &stage(&[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = stage(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y_new);

        let mut acc = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            acc += (e / scale).powi(2);
        }
        let err = (acc / N as f64).sqrt();

        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            stats.max_error_norm = stats.max_error_norm.max(err);
            observe(t, &y);
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
        }
    }
    Ok((y, stats))
}

/// Starting step from the derivative scales (Hairer, Norsett & Wanner).
fn initial_step<const N: usize, F>(
    rhs: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    tol: Tolerances,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let norm = |v: &[f64; N]| -> f64 {
        let s: f64 = (0..N)
            .map(|i| (v[i] / (tol.abs + tol.rel * y0[i].abs())).powi(2))
            .sum();
        (s / N as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = rhs(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances {
        rel: 1e-10,
        abs: 1e-12,
        max_steps: 1_000_000,
    };

    #[test]
    fn exponential_decay() {
        let (y, stats) =
            integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, 5.0, [1.0], TOL, |_, _| {}).unwrap();
        assert!((y[0] - (-5f64).exp()).abs() < 1e-10);
        assert!(stats.accepted > 0);
        assert!(stats.max_error_norm <= 1.0);
    }

    #[test]
    fn fifth_order_convergence() {
        // Fixed tolerance ladder: error should fall roughly as tol.
        let exact = 1f64.sin();
        let mut prev = f64::INFINITY;
        for rel in [1e-6, 1e-8, 1e-10] {
            let tol = Tolerances {
                rel,
                abs: rel * 1e-2,
                ..TOL
            };
            let (y, _) = integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                1.0,
                [0.0, 1.0],
                tol,
                |_, _| {},
            )
            .unwrap();
            let err = (y[0] - exact).abs();
            assert!(err < prev);
            assert!(err < 100.0 * rel);
            prev = err;
        }
    }

    #[test]
    fn observer_sees_final_time() {
        let mut last = 0.0;
        integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            2.0,
            [1.0],
            TOL,
            |t, _| last = t,
        )
        .unwrap();
        assert_eq!(last, 2.0);
    }

    #[test]
    fn step_budget_exhausted() {
        let tol = Tolerances {
            max_steps: 3,
            ..TOL
        };
        let r = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            100.0,
            [0.0, 1.0],
            tol,
            |_, _| {},
        );
        assert!(matches!(r, Err(Error::TooManySteps { .. })));
    }

    #[test]
    fn singular_rhs_underflows() {
        // y' = 1 / (1 - t)^2 blows up at t = 1.
        let r = integrate(
            |t, _: &[f64; 1]| [1.0 / ((1.0 - t) * (1.0 - t))],
            0.0,
            2.0,
            [1.0],
            TOL,
            |_, _| {},
        );
        match r {
            Err(Error::StepUnderflow { t }) => assert!((t - 1.0).abs() < 1e-3),
            Err(Error::TooManySteps { t, .. }) => assert!((t - 1.0).abs() < 1e-3),
            other => panic!("expected failure near t = 1, got {other:?}"),
        }
    }
}
