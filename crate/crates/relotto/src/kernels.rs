//! Log-domain kernels for the hyperbolic functions that appear in the
//! oscillator energies.
//!
//! The sinh arguments grow like `sqrt((1 + v) / (1 - v))` as the cold bath
//! speeds up, so every ratio of sinh values is evaluated as a difference of
//! logarithms and never formed directly.

use std::f64::consts::LN_2;

use crate::error::{positive, Result};

/// `ln(1 - e^{-x})` for `x > 0`, accurate for both tiny and large `x`.
pub fn log1m_exp(x: f64) -> Result<f64> {
    let x = positive("x", x)?;
    Ok(log1m_exp_unchecked(x))
}

pub(crate) fn log1m_exp_unchecked(x: f64) -> f64 {
    // Maechler's switch point.
    if x <= LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `ln(sinh x)` for `x > 0` without overflow.
pub fn log_sinh(x: f64) -> Result<f64> {
    let x = positive("x", x)?;
    Ok(x - LN_2 + log1m_exp_unchecked(2.0 * x))
}

/// `ln(sinh(lo + gap) / sinh(lo))` for `lo > 0`, `gap >= 0`.
///
/// Equal to `log_sinh(lo + gap) - log_sinh(lo)`, but the difference is
/// carried analytically so that nothing cancels when `gap` is small compared
/// to `lo`:
///
/// `gap + ln1p(e^{-2 lo} (1 - e^{-2 gap}) / (1 - e^{-2 lo}))`.
pub fn log_sinh_ratio(lo: f64, gap: f64) -> Result<f64> {
    let lo = positive("lo", lo)?;
    if !(gap >= 0.0 && gap.is_finite()) {
        return Err(crate::Error::Domain {
            name: "gap",
            value: gap,
            requirement: "must be nonnegative and finite",
        });
    }
    Ok(gap + log1p_sinh_excess(2.0 * lo, 2.0 * gap))
}

/// `ln[(1 - e^{-(x + d)}) / (1 - e^{-x})]`, the shared core of the
/// moving-bath occupation and the sinh ratio.
pub(crate) fn log1p_sinh_excess(x: f64, d: f64) -> f64 {
    let q = (-x).exp() * -(-d).exp_m1() / -(-x).exp_m1();
    q.ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sinh_large_argument() {
        let x = 1e3;
        assert!((log_sinh(x).unwrap() - (x - LN_2)).abs() <= 1e-12);
        // sinh itself overflows well before this.
        assert!(log_sinh(1e6).unwrap().is_finite());
    }

    #[test]
    fn log_sinh_moderate_and_small() {
        // ln(sinh 1) = 0.16143936157119563...
        assert!((log_sinh(1.0).unwrap() - 0.161_440).abs() <= 1e-6);
        assert!((log_sinh(1.0).unwrap() - 1f64.sinh().ln()).abs() <= 1e-15);
        let x = 1e-200;
        assert!((log_sinh(x).unwrap() - x.ln()).abs() <= 1e-12);
    }

    #[test]
    fn log1m_exp_small_argument() {
        // ln(1 - e^{-1e-8}) = ln(1e-8) + ln(1 - 5e-9 + ...) = -18.420680748952365...
        let got = log1m_exp(1e-8).unwrap();
        assert!((got - -18.420_681).abs() <= 1e-5);
        let series = (1e-8f64).ln() + (-5e-9f64 + 1e-16 / 24.0).ln_1p();
        assert!((got - series).abs() <= 1e-14);
    }

    #[test]
    fn log1m_exp_large_argument() {
        let got = log1m_exp(50.0).unwrap();
        assert!((got + (-50f64).exp()).abs() <= 1e-35);
        assert_eq!(log1m_exp(800.0).unwrap(), 0.0);
    }

    #[test]
    fn nonpositive_arguments_rejected() {
        assert!(log_sinh(0.0).is_err());
        assert!(log_sinh(-1.0).is_err());
        assert!(log1m_exp(0.0).is_err());
        assert!(log1m_exp(f64::NAN).is_err());
        assert!(log_sinh_ratio(0.0, 1.0).is_err());
        assert!(log_sinh_ratio(1.0, -1.0).is_err());
    }

    #[test]
    fn ratio_matches_plain_difference() {
        for &(lo, gap) in &[(0.3, 0.7), (2.0, 5.0), (0.01, 0.02), (40.0, 3.0)] {
            let direct = log_sinh(lo + gap).unwrap() - log_sinh(lo).unwrap();
            let ratio = log_sinh_ratio(lo, gap).unwrap();
            assert!((direct - ratio).abs() <= 1e-13 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn ratio_tiny_gap_is_linear() {
        // d/dx ln sinh x = coth x
        let (lo, gap) = (0.7, 1e-13);
        let got = log_sinh_ratio(lo, gap).unwrap();
        let slope = 1.0 / lo.tanh();
        assert!((got / gap - slope).abs() <= 1e-9);
    }
}
