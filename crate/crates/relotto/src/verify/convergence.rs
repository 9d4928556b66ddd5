use serde::{Deserialize, Serialize};

use crate::adiabaticity::Regime;
use crate::bounds::{eta_ss_high_t, sudden_cycle, w_adiabatic_high_t, w_ss_high_t};
use crate::error::{Error, Result};
use crate::thermo::{evaluate_cycle, EngineParams, Velocity};

/// Relative gaps between the exact cycle and its high-temperature forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub beta_h: f64,
    pub work_rel_err: f64,
    pub eta_rel_err: f64,
}

/// Runs the cycle at `omega_h = 1`, `omega_c = z`, `beta_c = beta_h / tau`
/// for each `beta_h` (strictly decreasing) and compares work and efficiency
/// against the high-temperature closed forms.
///
/// The sudden-switch exact values come from the sudden closed forms, the
/// adiabatic ones from the general cycle.
pub fn high_t_convergence(
    regime: Regime,
    z: f64,
    tau: f64,
    v: Velocity,
    beta_h_seq: &[f64],
) -> Result<Vec<ConvergencePoint>> {
    if beta_h_seq.is_empty() {
        return Err(Error::Config("empty beta_h sequence".into()));
    }
    if beta_h_seq.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config(
            "beta_h sequence must be strictly decreasing".into(),
        ));
    }
    beta_h_seq
        .iter()
        .map(|&beta_h| {
            let params = EngineParams::new(z, 1.0, beta_h / tau, beta_h, v.get(), 1.0)?;
            let (w_exact, eta_exact, w_ht, eta_ht) = match regime {
                Regime::Adiabatic => {
                    let r = evaluate_cycle(&params);
                    let eta = r.w_ext / r.q_h;
                    (
                        r.w_ext,
                        eta,
                        w_adiabatic_high_t(z, tau, v, beta_h)?,
                        1.0 - z,
                    )
                }
                Regime::Sudden => {
                    let r = sudden_cycle(&params);
                    let eta = r.w_ext / r.q_h;
                    (
                        r.w_ext,
                        eta,
                        w_ss_high_t(z, tau, v, beta_h)?,
                        eta_ss_high_t(z, tau, v)?,
                    )
                }
            };
            Ok(ConvergencePoint {
                beta_h,
                work_rel_err: ((w_exact - w_ht) / w_ht).abs(),
                eta_rel_err: ((eta_exact - eta_ht) / eta_ht).abs(),
            })
        })
        .collect()
}

pub fn strictly_decreasing(xs: impl IntoIterator<Item = f64>) -> bool {
    let xs: Vec<f64> = xs.into_iter().collect();
    xs.windows(2).all(|w| w[1] < w[0])
}
