//! Independent numeric oracles and ensemble experiments.
//!
//! Nothing in here shares an evaluation path with the closed forms it
//! checks: maxima are located by golden-section search, solid-angle averages
//! by Gauss-Legendre quadrature, high-temperature limits by running the
//! exact cycle at shrinking `beta`, and the bounds by brute-force sampling.

pub mod checks;
mod convergence;
mod ensemble;
mod optimize;
mod quadrature;

use rand::Rng;

pub use convergence::{high_t_convergence, strictly_decreasing, ConvergencePoint};
pub use ensemble::{
    run_ensemble, run_histogram, run_scatter, EnsembleConfig, Histogram, Sample, SampleEnsemble,
    GENERATOR_ID, SHARD_SIZE,
};
pub use optimize::maximize_scalar;
pub use quadrature::{gauss_legendre, solid_angle_average_inverse_doppler};

use crate::adiabaticity::Regime;
use crate::bounds::{pwc_threshold, w_adiabatic_high_t, w_ss_high_t};
use crate::error::Result;
use crate::thermo::{EngineParams, Velocity};

/// Temperature ratios of the reference `(tau, v)` grid.
pub const TAU_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Speeds of the reference `(tau, v)` grid.
pub const V_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

/// Numerically maximises the high-temperature work over `z` inside the
/// positive-work window. Returns `(z*, W*)` at `beta_h = 1`.
pub fn numeric_optimal_z(regime: Regime, tau: f64, v: Velocity, tol: f64) -> Result<(f64, f64)> {
    let threshold = pwc_threshold(regime, tau, v)?;
    match regime {
        Regime::Adiabatic => maximize_scalar(
            |z| w_adiabatic_high_t(z, tau, v, 1.0).unwrap_or(f64::NEG_INFINITY),
            threshold,
            1.0,
            tol,
        ),
        Regime::Sudden => maximize_scalar(
            |z| w_ss_high_t(z, tau, v, 1.0).unwrap_or(f64::NEG_INFINITY),
            threshold.sqrt(),
            1.0,
            tol,
        ),
    }
}

/// A random valid operating point spanning classical to deep-quantum
/// regimes. `lambda` is the sudden value for `Some(Regime::Sudden)`, one for
/// `Some(Regime::Adiabatic)` and uniform in `[1, 3)` otherwise.
pub fn random_engine_params<R: Rng>(rng: &mut R, regime: Option<Regime>) -> EngineParams {
    loop {
        let omega_h: f64 = rng.gen_range(1e-2..50.0);
        let omega_c = omega_h * rng.gen_range(0.01..0.999);
        let beta_h = 10f64.powf(rng.gen_range(-3.0..1.0));
        let tau = rng.gen_range(0.05..0.95);
        let v = rng.gen_range(0.0..0.99);
        let lambda = match regime {
            Some(Regime::Adiabatic) => 1.0,
            Some(Regime::Sudden) => 1.0 + (omega_c - omega_h).powi(2) / (2.0 * omega_c * omega_h),
            None => rng.gen_range(1.0..3.0),
        };
        if let Ok(p) = EngineParams::new(omega_c, omega_h, beta_h / tau, beta_h, v, lambda) {
            return p;
        }
    }
}
