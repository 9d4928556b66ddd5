//! Numerical toolkit for a quantum Otto engine whose cold reservoir moves at
//! relativistic speed relative to the working oscillator.
//!
//! * [`thermo`]: occupations, corner energies, stroke works and heats.
//! * [`adiabaticity`]: the adiabaticity parameter `lambda` of a work stroke,
//!   by integrating the time-dependent oscillator.
//! * [`bounds`]: efficiency bounds, positive-work thresholds and
//!   maximum-work points.
//! * [`verify`]: numeric oracles and seeded Monte Carlo ensembles that
//!   certify the closed forms.
//!
//! ```
//! use relotto::{bounds::generalized_carnot, thermo::Velocity};
//!
//! let v = Velocity::new(0.85)?;
//! let eta = generalized_carnot(0.5, v)?;
//! assert!((eta - 0.6108).abs() < 1e-3);
//! # Ok::<(), relotto::Error>(())
//! ```

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabaticity;
pub mod bounds;
mod error;
pub mod kernels;
pub mod thermo;
pub mod verify;

pub use adiabaticity::Regime;
pub use error::{Error, Result};
pub use thermo::{evaluate_cycle, CycleResult, EngineParams, Mode, Velocity};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cycle.md")]
    mod cycle {}
    #[doc = include_str!("../../../book/src/adiabaticity.md")]
    mod adiabaticity {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
