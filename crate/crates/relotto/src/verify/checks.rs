//! The full regression suite behind `otto verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::*;
use crate::adiabaticity::{
    lambda_closed_form, lambda_from_trajectory, protocol_lambda, solve_husimi, DriveProtocol,
    DEFAULT_REL_TOL,
};
use crate::bounds::*;
use crate::thermo::*;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

type Check = fn(usize) -> Result<CheckOutcome>;

const CHECKS: &[(&str, Check)] = &[
    ("generalized_carnot_anchor", generalized_carnot_anchor),
    ("sudden_upper_anchor", sudden_upper_anchor),
    ("fig5_histogram", fig5_histogram),
    ("fig3_scatter", fig3_scatter),
    ("lambda_ode_limits", lambda_ode_limits),
    ("nonrelativistic_limits", nonrelativistic_limits),
    ("oracle_argmax", oracle_argmax),
    ("quadrature_identity", quadrature_identity),
    ("high_t_convergence", high_t_convergence_check),
    ("first_law_and_half_cap", first_law_and_half_cap),
    ("corner_energy_identity", corner_energy_identity),
    ("stationary_continuity", stationary_continuity),
    ("doppler_monotone", doppler_monotone),
    ("work_decreases_with_lambda", work_decreases_with_lambda),
    ("bound_ordering", bound_ordering),
    ("carnot_crossing", carnot_crossing),
    ("lambda_at_least_one", lambda_at_least_one),
    ("random_ensembles", random_ensembles),
    ("ensemble_determinism", ensemble_determinism),
];

/// Names of all checks, in run order.
pub fn names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

/// Runs every check. A check that errors counts as failed.
pub fn run_all(threads: usize) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| match check(threads) {
            Ok(outcome) => outcome,
            Err(e) => CheckOutcome::new(name, false, format!("error: {e}")),
        })
        .collect()
}

fn vel(v: f64) -> Velocity {
    Velocity::new(v).expect("grid speed")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn generalized_carnot_anchor(_: usize) -> Result<CheckOutcome> {
    let g = BoundsReport::new(0.5, vel(0.85))?.eta_gen_carnot;
    Ok(CheckOutcome::new(
        "generalized_carnot_anchor",
        (g - 0.6108).abs() <= 0.002,
        format!("eta_gen_carnot(0.5, 0.85) = {g:.6}"),
    ))
}

fn sudden_upper_anchor(_: usize) -> Result<CheckOutcome> {
    let b = BoundsReport::new(0.25, vel(0.9))?.eta_ss_upper;
    Ok(CheckOutcome::new(
        "sudden_upper_anchor",
        (b - 0.24369).abs() <= 1e-4,
        format!("eta_ss_upper(0.75, 0.9) = {b:.6}"),
    ))
}

fn fig5_histogram(threads: usize) -> Result<CheckOutcome> {
    let (ens, hist) = run_histogram(&EnsembleConfig::fig5(42), 50, threads)?;
    let max = ens.max_eta().unwrap_or(0.0);
    let ok =
        ens.violations == 0 && ens.bound - max <= 0.02 && hist.total() as usize == ens.accepted();
    Ok(CheckOutcome::new(
        "fig5_histogram",
        ok,
        format!(
            "accepted {}, violations {}, max eta {max:.6}, bound {:.6}",
            ens.accepted(),
            ens.violations,
            ens.bound
        ),
    ))
}

fn fig3_scatter(threads: usize) -> Result<CheckOutcome> {
    let ens = run_scatter(&EnsembleConfig::fig3(42), threads)?;
    let control = run_scatter(
        &EnsembleConfig {
            v: 0.0,
            ..EnsembleConfig::fig3(42)
        },
        threads,
    )?;
    let ok = ens.violations == 0
        && control.violations == 0
        && (control.bound - 0.5).abs() < 1e-15
        && ens.accepted() > 0
        && control.accepted() > 0;
    Ok(CheckOutcome::new(
        "fig3_scatter",
        ok,
        format!(
            "v=0.85: {} accepted, {} violations of {:.6}; v=0: {} accepted, {} violations of {:.3}",
            ens.accepted(),
            ens.violations,
            ens.bound,
            control.accepted(),
            control.violations,
            control.bound
        ),
    ))
}

fn lambda_ode_limits(_: usize) -> Result<CheckOutcome> {
    let fast = solve_husimi(
        &DriveProtocol::linear_omega(1.0, 2.0, 1e-4)?,
        DEFAULT_REL_TOL,
    )?;
    let slow = solve_husimi(
        &DriveProtocol::linear_omega(1.0, 2.0, 200.0)?,
        DEFAULT_REL_TOL,
    )?;
    let lam_fast = lambda_from_trajectory(&fast, 1.0, 2.0)?;
    let lam_slow = lambda_from_trajectory(&slow, 1.0, 2.0)?;
    let drift = fast.max_wronskian_drift.max(slow.max_wronskian_drift);
    let ok = (lam_fast - 1.25).abs() < 1e-3
        && lam_slow - 1.0 < 1e-4
        && lam_slow >= 1.0 - 1e-9
        && drift < 1e-9;
    Ok(CheckOutcome::new(
        "lambda_ode_limits",
        ok,
        format!(
            "lambda(1e-4) = {lam_fast:.9}, lambda(200) - 1 = {:.3e}, drift {drift:.2e}",
            lam_slow - 1.0
        ),
    ))
}

fn nonrelativistic_limits(_: usize) -> Result<CheckOutcome> {
    let v = vel(1e-12);
    let mut worst: f64 = 0.0;
    for tau in [0.1, 0.25, 0.5, 0.75] {
        worst = worst.max(rel(emw_adiabatic(tau, v)?, 1.0 - tau.sqrt()));
        worst = worst.max(rel(
            eta_ss_mw(tau, v)?,
            (1.0 - tau.sqrt()) / (2.0 + tau.sqrt()),
        ));
        for omega in [0.1, 1.0, 10.0] {
            let planck = 1.0 / (omega / tau).exp_m1();
            worst = worst.max(rel(mean_photon_moving(1.0 / tau, omega, v)?, planck));
        }
    }
    Ok(CheckOutcome::new(
        "nonrelativistic_limits",
        worst <= 1e-8,
        format!("worst relative deviation {worst:.2e}"),
    ))
}

fn oracle_argmax(_: usize) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for &tau in &TAU_GRID {
        for &v in &V_GRID {
            for regime in [Regime::Adiabatic, Regime::Sudden] {
                let (z_num, _) = numeric_optimal_z(regime, tau, vel(v), 1e-9)?;
                let z_closed = optimal_z(regime, tau, vel(v))?;
                worst = worst.max((z_num - z_closed).abs());
            }
        }
    }
    Ok(CheckOutcome::new(
        "oracle_argmax",
        worst <= 1e-6,
        format!("worst |z_numeric - z_closed| = {worst:.2e}"),
    ))
}

fn quadrature_identity(_: usize) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for k in 1..=19 {
        let v = k as f64 * 0.05;
        if k % 2 == 1 && k != 19 {
            continue;
        }
        let quad = solid_angle_average_inverse_doppler(vel(v), 128)?;
        let closed = ((1.0 + v) / (1.0 - v)).ln() / (2.0 * v);
        worst = worst.max((quad - closed).abs());
        // Directional temperature averaged over the sphere gives T f(v).
        let t_eff = ((1.0 - v) * (1.0 + v)).sqrt() * quad;
        worst = worst.max((t_eff - effective_temperature(1.0, vel(v))?).abs());
    }
    Ok(CheckOutcome::new(
        "quadrature_identity",
        worst <= 1e-10,
        format!("worst abs deviation {worst:.2e}"),
    ))
}

fn high_t_convergence_check(_: usize) -> Result<CheckOutcome> {
    let seq = [1e-1, 1e-2, 1e-3];
    let ad = high_t_convergence(Regime::Adiabatic, 0.7, 0.5, vel(0.85), &seq)?;
    let ss = high_t_convergence(Regime::Sudden, 0.7, 0.25, vel(0.9), &seq)?;
    let last = ss.last().expect("nonempty");
    let ok = strictly_decreasing(ad.iter().map(|p| p.work_rel_err))
        && strictly_decreasing(ss.iter().map(|p| p.work_rel_err))
        && strictly_decreasing(ss.iter().map(|p| p.eta_rel_err))
        && last.eta_rel_err < 1e-4
        && last.work_rel_err < 1e-4;
    Ok(CheckOutcome::new(
        "high_t_convergence",
        ok,
        format!(
            "sudden eta errors {}",
            ss.iter()
                .map(|p| format!("{:.2e}", p.eta_rel_err))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    ))
}

fn first_law_and_half_cap(_: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0770);
    let mut worst: f64 = 0.0;
    let mut max_ss: f64 = 0.0;
    for i in 0..100_000 {
        let regime = if i % 2 == 0 {
            Some(Regime::Sudden)
        } else {
            None
        };
        let p = random_engine_params(&mut rng, regime);
        let r = evaluate_cycle(&p);
        let scale = [r.w_ab, r.w_cd, r.q_h, r.q_c]
            .iter()
            .fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
        worst = worst.max(r.closure_residual().abs() / scale);
        if regime.is_some() {
            if let Some(eta) = r.eta {
                max_ss = max_ss.max(eta);
            }
        }
    }
    Ok(CheckOutcome::new(
        "first_law_and_half_cap",
        worst <= 1e-12 && max_ss < 0.5,
        format!("worst closure {worst:.2e}, max sudden eta {max_ss:.6}"),
    ))
}

fn corner_energy_identity(_: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE4);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_engine_params(&mut rng, None);
        let n = mean_photon_moving(p.beta_c(), p.omega_c(), p.v())?;
        worst = worst.max(rel(energy_a(&p), (n + 0.5) * p.omega_c()));
    }
    Ok(CheckOutcome::new(
        "corner_energy_identity",
        worst <= 1e-10,
        format!("worst relative deviation {worst:.2e}"),
    ))
}

fn stationary_continuity(_: usize) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for &(wc, wh, bc, bh, lam) in &[
        (1.0, 2.0, 0.2, 0.1, 1.0),
        (0.3, 5.0, 3.0, 0.5, 1.7),
        (4.0, 9.0, 0.01, 0.005, 1.1),
    ] {
        let a = evaluate_cycle(&EngineParams::new(wc, wh, bc, bh, 0.0, lam)?);
        let b = evaluate_cycle(&EngineParams::new(wc, wh, bc, bh, 1e-12, lam)?);
        for (x, y) in [
            (a.w_ab, b.w_ab),
            (a.w_cd, b.w_cd),
            (a.q_h, b.q_h),
            (a.q_c, b.q_c),
            (a.w_ext, b.w_ext),
        ] {
            worst = worst.max(rel(y, x));
        }
    }
    Ok(CheckOutcome::new(
        "stationary_continuity",
        worst <= 1e-8,
        format!("worst relative deviation {worst:.2e}"),
    ))
}

fn doppler_monotone(_: usize) -> Result<CheckOutcome> {
    let fs: Vec<f64> = (1..100)
        .map(|k| doppler_factor(vel(k as f64 / 100.0)))
        .collect();
    let ok = strictly_decreasing(fs.iter().copied()) && fs.iter().all(|&f| f > 0.0 && f <= 1.0);
    Ok(CheckOutcome::new(
        "doppler_monotone",
        ok,
        format!("f(0.99) = {:.6}", fs[98]),
    ))
}

fn work_decreases_with_lambda(_: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1A);
    let mut bad = 0;
    let mut tested = 0;
    for _ in 0..2_000 {
        let p = random_engine_params(&mut rng, Some(Regime::Adiabatic));
        if !evaluate_cycle(&p).is_engine() {
            continue;
        }
        tested += 1;
        let mut prev = f64::INFINITY;
        for lam in [1.0, 1.001, 1.01, 1.1, 1.5] {
            let w = evaluate_cycle(&p.with_lambda(lam)?).w_ext;
            if !(w < prev) {
                bad += 1;
            }
            prev = w;
        }
    }
    Ok(CheckOutcome::new(
        "work_decreases_with_lambda",
        bad == 0 && tested > 0,
        format!("{tested} engine points, {bad} non-monotone steps"),
    ))
}

fn bound_ordering(_: usize) -> Result<CheckOutcome> {
    let mut bad = Vec::new();
    for &tau in &TAU_GRID {
        for &v in &V_GRID {
            let r = BoundsReport::new(tau, vel(v))?;
            let ok = r.eta_ss_mw <= r.eta_ss_upper
                && r.eta_ss_upper < 0.5
                && r.eta_mw_adiabatic <= r.eta_gen_carnot
                && r.eta_gen_carnot < 1.0
                && r.eta_carnot <= r.eta_gen_carnot
                && r.eta_ss_upper <= r.eta_gen_carnot;
            if !ok {
                bad.push((tau, v));
            }
        }
    }
    Ok(CheckOutcome::new(
        "bound_ordering",
        bad.is_empty(),
        format!("{} grid points out of order {bad:?}", bad.len()),
    ))
}

fn carnot_crossing(_: usize) -> Result<CheckOutcome> {
    let b = eta_ss_upper(0.05, vel(0.9))?;
    Ok(CheckOutcome::new(
        "carnot_crossing",
        b > 0.05,
        format!("eta_ss_upper(0.05, 0.9) = {b:.6}"),
    ))
}

fn lambda_at_least_one(_: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A);
    let mut lowest = f64::INFINITY;
    let mut sudden_gap = Vec::new();
    for _ in 0..40 {
        let w0 = rng.gen_range(0.2..3.0);
        let w1 = rng.gen_range(0.2..3.0);
        let d = 10f64.powf(rng.gen_range(-3.0..1.5));
        for p in [
            DriveProtocol::linear_omega(w0, w1, d)?,
            DriveProtocol::linear_omega_squared(w0, w1, d)?,
        ] {
            lowest = lowest.min(protocol_lambda(&p, DEFAULT_REL_TOL)?);
        }
    }
    let sudden = lambda_closed_form(Regime::Sudden, 1.0, 2.0)?;
    for d in [1e-2, 1e-3, 1e-4] {
        let lam = protocol_lambda(&DriveProtocol::linear_omega(1.0, 2.0, d)?, DEFAULT_REL_TOL)?;
        sudden_gap.push((lam - sudden).abs());
    }
    let l50 = protocol_lambda(
        &DriveProtocol::linear_omega(1.0, 2.0, 50.0)?,
        DEFAULT_REL_TOL,
    )?;
    let l200 = protocol_lambda(
        &DriveProtocol::linear_omega(1.0, 2.0, 200.0)?,
        DEFAULT_REL_TOL,
    )?;
    let ok = lowest >= 1.0 - 1e-9 && strictly_decreasing(sudden_gap.iter().copied()) && l200 < l50;
    Ok(CheckOutcome::new(
        "lambda_at_least_one",
        ok,
        format!(
            "min lambda {lowest:.12}, sudden gaps {}, lambda(50) {l50:.9}, lambda(200) {l200:.9}",
            sudden_gap
                .iter()
                .map(|g| format!("{g:.2e}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    ))
}

fn random_ensembles(threads: usize) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF16);
    let mut total_violations = 0;
    let mut accepted = 0;
    for i in 0..20 {
        let beta_h = 10f64.powf(rng.gen_range(-2.0..0.0));
        let tau = rng.gen_range(0.05..0.95);
        let v = rng.gen_range(0.0..0.99);
        for regime in [Regime::Adiabatic, Regime::Sudden] {
            let cfg = EnsembleConfig {
                seed: 1000 + i,
                count: 100_000,
                omega_c_range: (0.0, 30.0),
                omega_h_range: (0.0, 60.0),
                beta_c: beta_h / tau,
                beta_h,
                v,
                regime,
            };
            let ens = run_ensemble(&cfg, threads)?;
            total_violations += ens.violations;
            accepted += ens.accepted();
        }
    }
    Ok(CheckOutcome::new(
        "random_ensembles",
        total_violations == 0,
        format!("40 ensembles, {accepted} accepted samples, {total_violations} violations"),
    ))
}

fn ensemble_determinism(threads: usize) -> Result<CheckOutcome> {
    let cfg = EnsembleConfig {
        count: 2 * SHARD_SIZE + 17,
        ..EnsembleConfig::fig5(9)
    };
    let a = run_ensemble(&cfg, threads)?;
    let b = run_ensemble(&cfg, 1)?;
    Ok(CheckOutcome::new(
        "ensemble_determinism",
        a == b,
        format!("{} accepted samples", a.accepted()),
    ))
}
