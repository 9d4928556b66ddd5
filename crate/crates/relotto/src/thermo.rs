//! Closed-form energetics of the Otto cycle with a moving cold bath.
//!
//! The working medium is a harmonic oscillator. Corner A is thermal with the
//! cold bath (moving at speed `v`) at frequency `omega_c`; corner C is thermal
//! with the stationary hot bath at `omega_h`. The work strokes A->B and C->D
//! are unitary and characterised by the adiabaticity parameter `lambda`.
//!
//! Units: hbar = k_B = c = 1.

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::kernels::{log1p_sinh_excess, log_sinh_ratio};

/// Below this speed the Doppler factor is evaluated from its Taylor series.
pub const DOPPLER_SERIES_BELOW: f64 = 1e-3;

/// Below this speed the moving-bath formulas are replaced by their `v = 0`
/// closed forms.
pub const STATIONARY_BELOW: f64 = 1e-12;

/// Speed of the cold bath in units of the speed of light, `0 <= v < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Velocity(f64);

impl Velocity {
    pub const REST: Velocity = Velocity(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_finite() && (0.0..1.0).contains(&v) {
            Ok(Velocity(v))
        } else {
            Err(Error::Domain {
                name: "v",
                value: v,
                requirement: "speed must satisfy 0 <= v < 1",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Lorentz factor `1 / sqrt(1 - v^2)`.
    pub fn gamma(self) -> f64 {
        1.0 / self.one_minus_v2().sqrt()
    }

    fn one_minus_v2(self) -> f64 {
        (1.0 - self.0) * (1.0 + self.0)
    }
}

impl TryFrom<f64> for Velocity {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Velocity::new(v)
    }
}

impl From<Velocity> for f64 {
    fn from(v: Velocity) -> f64 {
        v.0
    }
}

/// A thermal reservoir as seen by the oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    beta: f64,
    velocity: Velocity,
}

impl BathSpec {
    pub fn new(beta: f64, velocity: Velocity) -> Result<Self> {
        let beta = positive("beta", beta)?;
        Ok(BathSpec { beta, velocity })
    }

    /// A reservoir at rest, like the hot bath of the cycle.
    pub fn stationary(beta: f64) -> Result<Self> {
        Self::new(beta, Velocity::REST)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn velocity(&self) -> Velocity {
        self.velocity
    }

    /// Mean occupation of an oscillator of frequency `omega` thermalised by
    /// this reservoir.
    pub fn occupation(&self, omega: f64) -> Result<f64> {
        mean_photon_moving(self.beta, omega, self.velocity)
    }
}

/// One operating point of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    omega_c: f64,
    omega_h: f64,
    beta_c: f64,
    beta_h: f64,
    v: Velocity,
    lambda: f64,
}

impl EngineParams {
    pub fn new(
        omega_c: f64,
        omega_h: f64,
        beta_c: f64,
        beta_h: f64,
        v: f64,
        lambda: f64,
    ) -> Result<Self> {
        let omega_c = positive("omega_c", omega_c)?;
        let omega_h = positive("omega_h", omega_h)?;
        if omega_c >= omega_h {
            return Err(Error::Domain {
                name: "omega_c",
                value: omega_c,
                requirement: "compression requires omega_c < omega_h",
            });
        }
        let beta_h = positive("beta_h", beta_h)?;
        let beta_c = positive("beta_c", beta_c)?;
        if beta_c <= beta_h {
            return Err(Error::Domain {
                name: "beta_c",
                value: beta_c,
                requirement: "cold bath must be colder, beta_c > beta_h",
            });
        }
        let v = Velocity::new(v)?;
        let lambda = check_lambda(lambda)?;
        Ok(EngineParams {
            omega_c,
            omega_h,
            beta_c,
            beta_h,
            v,
            lambda,
        })
    }

    /// Same reservoirs and frequencies, driven by a sudden switch.
    pub fn sudden(omega_c: f64, omega_h: f64, beta_c: f64, beta_h: f64, v: f64) -> Result<Self> {
        let p = Self::new(omega_c, omega_h, beta_c, beta_h, v, 1.0)?;
        Ok(p.with_sudden_lambda())
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Ok(EngineParams {
            lambda: check_lambda(lambda)?,
            ..self
        })
    }

    pub(crate) fn with_sudden_lambda(self) -> Self {
        EngineParams {
            lambda: crate::adiabaticity::sudden_lambda(self.omega_c, self.omega_h),
            ..self
        }
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn omega_h(&self) -> f64 {
        self.omega_h
    }
    pub fn beta_c(&self) -> f64 {
        self.beta_c
    }
    pub fn beta_h(&self) -> f64 {
        self.beta_h
    }
    pub fn v(&self) -> Velocity {
        self.v
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Compression ratio `omega_c / omega_h`.
    pub fn z(&self) -> f64 {
        self.omega_c / self.omega_h
    }

    /// Temperature ratio `beta_h / beta_c = T_c / T_h`.
    pub fn tau(&self) -> f64 {
        self.beta_h / self.beta_c
    }

    pub fn cold_bath(&self) -> BathSpec {
        BathSpec {
            beta: self.beta_c,
            velocity: self.v,
        }
    }

    pub fn hot_bath(&self) -> BathSpec {
        BathSpec {
            beta: self.beta_h,
            velocity: Velocity::REST,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<f64> {
    if lambda.is_finite() && lambda >= 1.0 {
        Ok(lambda)
    } else {
        Err(Error::Domain {
            name: "lambda",
            value: lambda,
            requirement: "adiabaticity parameter must be >= 1",
        })
    }
}

/// Mean energies at the four corners of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleEnergies {
    pub h_a: f64,
    pub h_b: f64,
    pub h_c: f64,
    pub h_d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Engine,
    /// Refrigerator, heater, accelerator or idle. Not distinguished further.
    Other,
}

/// Energetics of one cycle.
///
/// Works are done *on* the oscillator and heats are *absorbed* by it, so the
/// cycle closes as `w_ab + w_cd + q_h + q_c = 0` and the extracted work is
/// `w_ext = -(w_ab + w_cd) = q_h + q_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleResult {
    pub w_ab: f64,
    pub w_cd: f64,
    pub q_h: f64,
    pub q_c: f64,
    pub w_ext: f64,
    pub eta: Option<f64>,
    pub mode: Mode,
}

impl CycleResult {
    /// Energy balance residual over the closed cycle.
    pub fn closure_residual(&self) -> f64 {
        (self.w_ab + self.w_cd) + (self.q_h + self.q_c)
    }

    pub fn is_engine(&self) -> bool {
        self.mode == Mode::Engine
    }
}

/// Isotropic Doppler factor
/// `f(v) = sqrt(1 - v^2) ln((1 + v) / (1 - v)) / (2 v)`, with `f(0) = 1`.
///
/// The cold bath looks like a stationary bath at temperature `f(v) T_c` once
/// the directional temperature is averaged over the sky.
pub fn doppler_factor(v: Velocity) -> f64 {
    let v = v.get();
    if v < DOPPLER_SERIES_BELOW {
        let v2 = v * v;
        1.0 - v2 / 6.0 - 11.0 * v2 * v2 / 120.0
    } else {
        ((1.0 - v) * (1.0 + v)).sqrt() * v.atanh() / v
    }
}

/// Bose-Einstein occupation `1 / (e^{beta omega} - 1)` of a bath at rest.
pub fn planck_occupation(beta: f64, omega: f64) -> Result<f64> {
    let beta = positive("beta", beta)?;
    let omega = positive("omega", omega)?;
    Ok(1.0 / (beta * omega).exp_m1())
}

/// Mean occupation of an oscillator thermalised by a bath moving at `v`:
///
/// `n = ln[(1 - e^{-a gamma (1 + v)}) / (1 - e^{-a gamma (1 - v)})] / (2 gamma v a)`
///
/// with `a = beta omega`. The numerator is the log of a ratio of two numbers
/// that approach each other as `v -> 0`; it is evaluated through
/// `ln1p` of their relative excess so that the limit is reached smoothly.
pub fn mean_photon_moving(beta: f64, omega: f64, v: Velocity) -> Result<f64> {
    let beta = positive("beta", beta)?;
    let omega = positive("omega", omega)?;
    let a = beta * omega;
    if v.get() < STATIONARY_BELOW {
        return Ok(1.0 / a.exp_m1());
    }
    let (x_lo, gap) = doppler_exponents(a, v);
    Ok(log1p_sinh_excess(x_lo, gap) / gap)
}

/// Red-shifted exponent `a gamma (1 - v)` and the blue/red gap `2 a gamma v`.
fn doppler_exponents(a: f64, v: Velocity) -> (f64, f64) {
    let gamma = v.gamma();
    let v = v.get();
    (a * gamma * (1.0 - v), 2.0 * a * gamma * v)
}

/// `<H>_A`, thermal with the moving cold bath at `omega_c`.
pub fn energy_a(params: &EngineParams) -> f64 {
    let (beta, omega, v) = (params.beta_c, params.omega_c, params.v);
    if v.get() < STATIONARY_BELOW {
        return half_coth_energy(beta, omega);
    }
    let (x_lo, gap) = doppler_exponents(beta * omega, v);
    // sqrt(1 - v^2) / (2 beta v) * ln[sinh(x_hi / 2) / sinh(x_lo / 2)]
    let log_ratio = log_sinh_ratio(0.5 * x_lo, 0.5 * gap).expect("validated parameters");
    log_ratio / (2.0 * beta * v.get() * v.gamma())
}

/// `<H>_B = <H>_A (omega_h / omega_c) lambda`.
pub fn energy_b(params: &EngineParams) -> f64 {
    energy_a(params) * (params.omega_h / params.omega_c) * params.lambda
}

/// `<H>_C = (omega_h / 2) coth(beta_h omega_h / 2)`.
pub fn energy_c(params: &EngineParams) -> f64 {
    half_coth_energy(params.beta_h, params.omega_h)
}

/// `<H>_D = (omega_c / 2) lambda coth(beta_h omega_h / 2)`.
pub fn energy_d(params: &EngineParams) -> f64 {
    0.5 * params.omega_c * params.lambda / (0.5 * params.beta_h * params.omega_h).tanh()
}

fn half_coth_energy(beta: f64, omega: f64) -> f64 {
    0.5 * omega / (0.5 * beta * omega).tanh()
}

pub fn cycle_energies(params: &EngineParams) -> CycleEnergies {
    CycleEnergies {
        h_a: energy_a(params),
        h_b: energy_b(params),
        h_c: energy_c(params),
        h_d: energy_d(params),
    }
}

/// Stroke works, heats, extracted work and efficiency.
///
/// Every quantity is expanded around the zero-point energies, so the `1/2`
/// terms cancel exactly and deep-quantum operating points (where both
/// occupations are tiny) keep their sign and relative precision.
pub fn evaluate_cycle(params: &EngineParams) -> CycleResult {
    let (wc, wh, lam) = (params.omega_c, params.omega_h, params.lambda);
    let n_c = mean_photon_moving(params.beta_c, wc, params.v).expect("validated parameters");
    let n_h = 1.0 / (params.beta_h * wh).exp_m1();
    let excess = 0.5 * (1.0 - lam);

    // <H>_B - <H>_A and <H>_D - <H>_C
    let w_ab = (n_c + 0.5) * (lam * wh - wc);
    let w_cd = (n_h + 0.5) * (lam * wc - wh);
    // <H>_C - <H>_B and <H>_A - <H>_D
    let q_h = wh * ((n_h - lam * n_c) + excess);
    let q_c = wc * ((n_c - lam * n_h) + excess);
    let w_ext = (wh - lam * wc) * n_h - (lam * wh - wc) * n_c + excess * (wh + wc);

    let engine = w_ext > 0.0 && q_h > 0.0;
    CycleResult {
        w_ab,
        w_cd,
        q_h,
        q_c,
        w_ext,
        eta: engine.then(|| w_ext / q_h),
        mode: if engine { Mode::Engine } else { Mode::Other },
    }
}
