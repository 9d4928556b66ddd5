//! Efficiency bounds, positive-work thresholds and maximum-work points in the
//! reduced variables `z = omega_c / omega_h`, `tau = beta_h / beta_c` and the
//! cold-bath speed `v`.
//!
//! Everything here depends on `v` only through the product `tau * f(v)`,
//! where `f` is [`doppler_factor`]: relative to the hot bath, the moving cold
//! bath behaves like a stationary one at temperature `f(v) T_c`.
//!
//! A few printed forms of these results are inconsistent with their own
//! stated limits. The expressions below are the ones obtained by optimising
//! the high-temperature work directly, and each is checked against a numeric
//! optimiser in [`crate::verify`]:
//!
//! * generalized Carnot bound: `1 - tau f(v)`;
//! * adiabatic efficiency at maximum work: `1 - sqrt(tau f(v))`, which is
//!   Curzon-Ahlborn at `v = 0`;
//! * sudden-switch high-temperature efficiency: the denominator carries
//!   `tau f(v)`, not a bare `tau` (the two agree at `v = 0`);
//! * sudden-switch optimum: `z* = (tau f(v))^{1/4}`, not `tau^{1/4}`.

use serde::{Deserialize, Serialize};

use crate::adiabaticity::Regime;
use crate::error::{open_range, positive, Error, Result};
use crate::kernels::log_sinh_ratio;
use crate::thermo::{doppler_factor, EngineParams, Velocity, STATIONARY_BELOW};

fn check_tau(tau: f64) -> Result<f64> {
    open_range(
        "tau",
        tau,
        0.0,
        1.0,
        "temperature ratio must satisfy 0 < tau < 1",
    )
}

fn check_z(z: f64) -> Result<f64> {
    open_range("z", z, 0.0, 1.0, "compression ratio must satisfy 0 < z < 1")
}

/// `tau f(v)`: the effective cold/hot temperature ratio.
fn reduced_ratio(tau: f64, v: Velocity) -> Result<f64> {
    Ok(check_tau(tau)? * doppler_factor(v))
}

/// Standard Carnot efficiency `1 - tau`.
pub fn carnot(tau: f64) -> Result<f64> {
    Ok(1.0 - check_tau(tau)?)
}

/// Upper bound on the efficiency with a moving cold bath, `1 - tau f(v)`.
pub fn generalized_carnot(tau: f64, v: Velocity) -> Result<f64> {
    Ok(1.0 - reduced_ratio(tau, v)?)
}

/// Temperature seen along a line of sight at angle `theta` to the motion,
/// `T sqrt(1 - v^2) / (1 - v cos theta)`.
pub fn directional_temperature(temperature: f64, v: Velocity, theta: f64) -> Result<f64> {
    let temperature = positive("temperature", temperature)?;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Domain {
            name: "theta",
            value: theta,
            requirement: "angle must lie in [0, pi]",
        });
    }
    let v = v.get();
    Ok(temperature * ((1.0 - v) * (1.0 + v)).sqrt() / (1.0 - v * theta.cos()))
}

/// Solid-angle average of the directional temperature, `T f(v)`.
pub fn effective_temperature(temperature: f64, v: Velocity) -> Result<f64> {
    Ok(positive("temperature", temperature)? * doppler_factor(v))
}

/// Positive-work threshold: `z_min` for adiabatic driving and `z_min^2` for
/// the sudden switch. Both equal `tau f(v)`.
pub fn pwc_threshold(_regime: Regime, tau: f64, v: Velocity) -> Result<f64> {
    reduced_ratio(tau, v)
}

/// Compression ratio that maximises the high-temperature work.
pub fn optimal_z(regime: Regime, tau: f64, v: Velocity) -> Result<f64> {
    let p = reduced_ratio(tau, v)?;
    Ok(match regime {
        Regime::Adiabatic => p.sqrt(),
        Regime::Sudden => p.sqrt().sqrt(),
    })
}

/// High-temperature extracted work for adiabatic driving,
/// `(1 - z)(z - tau f) / (beta_h z)`.
pub fn w_adiabatic_high_t(z: f64, tau: f64, v: Velocity, beta_h: f64) -> Result<f64> {
    let z = check_z(z)?;
    let p = reduced_ratio(tau, v)?;
    let beta_h = positive("beta_h", beta_h)?;
    Ok((1.0 - z) * (z - p) / (beta_h * z))
}

/// Adiabatic efficiency at maximum work, `1 - sqrt(tau f(v))`.
pub fn emw_adiabatic(tau: f64, v: Velocity) -> Result<f64> {
    Ok(1.0 - reduced_ratio(tau, v)?.sqrt())
}

pub fn curzon_ahlborn(tau: f64) -> Result<f64> {
    Ok(1.0 - check_tau(tau)?.sqrt())
}

/// Work and heat of the sudden-switch cycle from its closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuddenCycle {
    pub w_ext: f64,
    pub q_h: f64,
    pub eta: Option<f64>,
}

/// Sudden-switch cycle evaluated from its own closed forms, written with
/// `coth(beta_h omega_h / 2)` and the log-sinh ratio of the moving bath.
/// The `lambda` stored in `params` is ignored.
///
/// Both closed forms share the factor `v beta_c`, which is divided out here
/// so that `v = 0` needs no special case beyond the stationary energy.
pub fn sudden_cycle(params: &EngineParams) -> SuddenCycle {
    let (wc, wh) = (params.omega_c(), params.omega_h());
    let coth = 1.0 / (0.5 * params.beta_h() * wh).tanh();
    // A / (v beta_c), A = sqrt(1 - v^2) ln[sinh(.)/sinh(.)]
    let a_reduced = 2.0 * cold_corner_energy(params);
    let (wc2, wh2) = (wc * wc, wh * wh);
    let bracket = wc2 * coth - wh * a_reduced;
    let w_ext = (wh2 - wc2) * bracket / (4.0 * wc2 * wh);
    let q_h = (2.0 * wc2 * wh * coth - (wc2 + wh2) * a_reduced) / (4.0 * wc2);
    let eta = (w_ext > 0.0 && q_h > 0.0)
        .then(|| (wh2 - wc2) * bracket / (wh * (2.0 * wc2 * wh * coth - (wc2 + wh2) * a_reduced)));
    SuddenCycle { w_ext, q_h, eta }
}

fn cold_corner_energy(params: &EngineParams) -> f64 {
    let (beta, omega, v) = (params.beta_c(), params.omega_c(), params.v());
    if v.get() < STATIONARY_BELOW {
        return 0.5 * omega / (0.5 * beta * omega).tanh();
    }
    let (vv, gamma) = (v.get(), v.gamma());
    let x_lo = 0.5 * beta * omega * gamma * (1.0 - vv);
    let gap = beta * omega * gamma * vv;
    let ratio = log_sinh_ratio(x_lo, gap).expect("validated parameters");
    ((1.0 - vv) * (1.0 + vv)).sqrt() * ratio / (2.0 * beta * vv)
}

/// Extracted work of the sudden-switch cycle at general temperatures.
pub fn w_ss_exact(params: &EngineParams) -> f64 {
    sudden_cycle(params).w_ext
}

/// Efficiency of the sudden-switch cycle, `None` outside engine mode.
pub fn eta_ss_exact(params: &EngineParams) -> Option<f64> {
    sudden_cycle(params).eta
}

/// High-temperature sudden-switch work,
/// `(1 - z^2)(z^2 - tau f) / (2 z^2 beta_h)`.
pub fn w_ss_high_t(z: f64, tau: f64, v: Velocity, beta_h: f64) -> Result<f64> {
    let z2 = check_z(z)?.powi(2);
    let p = reduced_ratio(tau, v)?;
    let beta_h = positive("beta_h", beta_h)?;
    Ok((1.0 - z2) * (z2 - p) / (2.0 * z2 * beta_h))
}

/// High-temperature sudden-switch efficiency,
/// `(1 - z^2)(z^2 - tau f) / (z^2 (2 - tau f) - tau f)`.
///
/// This is the direct `beta -> 0` limit of the exact efficiency. Writing a
/// bare `tau` in place of the last `tau f` agrees only at `v = 0`.
pub fn eta_ss_high_t(z: f64, tau: f64, v: Velocity) -> Result<f64> {
    let z2 = check_z(z)?.powi(2);
    let p = reduced_ratio(tau, v)?;
    Ok((1.0 - z2) * (z2 - p) / (z2 * (2.0 - p) - p))
}

/// Which root of the quadratic in `z^2` to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Smaller root: compression ratios between the work threshold and the
    /// maximum-efficiency point. This is the root that tends to `tau f` as
    /// `eta -> 0`.
    Lower,
    /// Larger root: beyond the maximum-efficiency point, where the
    /// maximum-work point lives.
    Upper,
}

/// Inverts [`eta_ss_high_t`]: the `z^2` at which the high-temperature
/// sudden-switch engine runs at efficiency `eta`.
///
/// Both roots of
/// `u^2 + (eta (2 - p) - 1 - p) u + p (1 - eta) = 0`, `p = tau f(v)`,
/// give the same efficiency; `branch` picks one.
pub fn z_squared_from_eta(eta: f64, tau: f64, v: Velocity, branch: Branch) -> Result<f64> {
    let p = reduced_ratio(tau, v)?;
    if !(eta.is_finite() && (0.0..1.0).contains(&eta)) {
        return Err(Error::EfficiencyOutOfRange { eta });
    }
    let b = 1.0 + p - eta * (2.0 - p);
    let mut disc = b * b - 4.0 * p * (1.0 - eta);
    if disc < 0.0 {
        // Tolerate rounding right at the maximum efficiency.
        if disc > -64.0 * f64::EPSILON * b * b {
            disc = 0.0;
        } else {
            return Err(Error::EfficiencyOutOfRange { eta });
        }
    }
    if b <= 0.0 {
        return Err(Error::EfficiencyOutOfRange { eta });
    }
    let root = disc.sqrt();
    // Product of roots is p (1 - eta); take the large root directly and
    // divide for the small one.
    let upper = 0.5 * (b + root);
    Ok(match branch {
        Branch::Upper => upper,
        Branch::Lower => p * (1.0 - eta) / upper,
    })
}

/// Upper bound on the sudden-switch efficiency,
/// `(1 - f (1 - eta_C)) / (sqrt 2 + sqrt(f (1 - eta_C)))^2`, always below 1/2.
pub fn eta_ss_upper(eta_carnot: f64, v: Velocity) -> Result<f64> {
    let eta_c = open_range(
        "eta_carnot",
        eta_carnot,
        0.0,
        1.0,
        "Carnot efficiency must satisfy 0 < eta_C < 1",
    )?;
    let p = doppler_factor(v) * (1.0 - eta_c);
    let den = std::f64::consts::SQRT_2 + p.sqrt();
    Ok((1.0 - p) / (den * den))
}

/// Sudden-switch efficiency at maximum work,
/// `(2 + f tau - 3 sqrt(f tau)) / (4 - f tau)`, evaluated as `(1 - s)/(2 + s)`
/// with `s = sqrt(f tau)`.
pub fn eta_ss_mw(tau: f64, v: Velocity) -> Result<f64> {
    let s = reduced_ratio(tau, v)?.sqrt();
    Ok((1.0 - s) / (2.0 + s))
}

/// Stationary-bath sudden-switch efficiency at maximum work,
/// `(1 - sqrt tau) / (2 + sqrt tau)`.
pub fn rezek_kosloff(tau: f64) -> Result<f64> {
    let s = check_tau(tau)?.sqrt();
    Ok((1.0 - s) / (2.0 + s))
}

/// Every bound and threshold at one `(tau, v)` point.
///
/// `t_c_eff` is the effective cold-bath temperature in units of the hot-bath
/// temperature, i.e. `tau f(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub tau: f64,
    pub v: f64,
    pub doppler_factor: f64,
    pub eta_carnot: f64,
    pub eta_gen_carnot: f64,
    pub t_c_eff: f64,
    pub eta_mw_adiabatic: f64,
    pub z_min_adiabatic: f64,
    pub z2_min_sudden: f64,
    pub eta_ss_upper: f64,
    pub eta_ss_mw: f64,
    pub eta_rk: f64,
}

impl BoundsReport {
    pub fn new(tau: f64, v: Velocity) -> Result<Self> {
        let tau = check_tau(tau)?;
        let eta_carnot = carnot(tau)?;
        Ok(BoundsReport {
            tau,
            v: v.get(),
            doppler_factor: doppler_factor(v),
            eta_carnot,
            eta_gen_carnot: generalized_carnot(tau, v)?,
            t_c_eff: effective_temperature(tau, v)?,
            eta_mw_adiabatic: emw_adiabatic(tau, v)?,
            z_min_adiabatic: pwc_threshold(Regime::Adiabatic, tau, v)?,
            z2_min_sudden: pwc_threshold(Regime::Sudden, tau, v)?,
            eta_ss_upper: eta_ss_upper(eta_carnot, v)?,
            eta_ss_mw: eta_ss_mw(tau, v)?,
            eta_rk: rezek_kosloff(tau)?,
        })
    }
}
