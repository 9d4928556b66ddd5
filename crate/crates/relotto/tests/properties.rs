use proptest::prelude::*;
use relotto::adiabaticity::{protocol_lambda, DriveProtocol, DEFAULT_REL_TOL};
use relotto::bounds::{
    eta_ss_high_t, generalized_carnot, pwc_threshold, sudden_cycle, z_squared_from_eta, Branch,
};
use relotto::thermo::cycle_energies;
use relotto::{evaluate_cycle, EngineParams, Regime, Velocity};

/// Operating points with `beta omega` between 1e-3 and about 40.
fn engine_params() -> impl Strategy<Value = EngineParams> {
    (
        0.01f64..20.0,
        0.01f64..0.999,
        -3.0f64..0.3,
        0.05f64..0.95,
        0.0f64..0.99,
        1.0f64..3.0,
    )
        .prop_map(|(omega_h, z, log_beta_h, tau, v, lambda)| {
            let beta_h = 10f64.powf(log_beta_h);
            EngineParams::new(z * omega_h, omega_h, beta_h / tau, beta_h, v, lambda).unwrap()
        })
}

fn scale(xs: &[f64]) -> f64 {
    xs.iter().fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()))
}

proptest! {
    #[test]
    fn first_law_closes(p in engine_params()) {
        let r = evaluate_cycle(&p);
        let s = scale(&[r.w_ab, r.w_cd, r.q_h, r.q_c]);
        prop_assert!(r.closure_residual().abs() <= 1e-12 * s);
        prop_assert!((r.w_ext - (r.q_h + r.q_c)).abs() <= 1e-12 * s);
    }

    #[test]
    fn strokes_match_corner_energies(p in engine_params()) {
        let e = cycle_energies(&p);
        let r = evaluate_cycle(&p);
        let s = scale(&[e.h_a, e.h_b, e.h_c, e.h_d]);
        prop_assert!((r.w_ab - (e.h_b - e.h_a)).abs() <= 1e-12 * s);
        prop_assert!((r.w_cd - (e.h_d - e.h_c)).abs() <= 1e-12 * s);
        prop_assert!((r.q_h - (e.h_c - e.h_b)).abs() <= 1e-12 * s);
        prop_assert!((r.q_c - (e.h_a - e.h_d)).abs() <= 1e-12 * s);
    }

    #[test]
    fn engine_efficiency_in_unit_interval(p in engine_params()) {
        let r = evaluate_cycle(&p);
        match r.eta {
            Some(eta) => prop_assert!(r.is_engine() && eta > 0.0 && eta < 1.0),
            None => prop_assert!(!r.is_engine()),
        }
    }

    #[test]
    fn adiabatic_engine_below_generalized_carnot(p in engine_params()) {
        let p = p.with_lambda(1.0).unwrap();
        if let Some(eta) = evaluate_cycle(&p).eta {
            prop_assert!(eta < generalized_carnot(p.tau(), p.v()).unwrap());
        }
    }

    #[test]
    fn sudden_engine_below_half(p in engine_params()) {
        let d = p.omega_c() - p.omega_h();
        let sudden = p.with_lambda(1.0 + d * d / (2.0 * p.omega_c() * p.omega_h())).unwrap();
        if let Some(eta) = evaluate_cycle(&sudden).eta {
            prop_assert!(eta < 0.5);
        }
        let alt = sudden_cycle(&sudden);
        if let Some(eta) = alt.eta {
            prop_assert!(eta < 0.5);
        }
    }

    #[test]
    fn work_non_increasing_in_lambda(p in engine_params(), dl in 0.0f64..2.0) {
        let lo = evaluate_cycle(&p).w_ext;
        let hi = evaluate_cycle(&p.with_lambda(p.lambda() + dl).unwrap()).w_ext;
        prop_assert!(hi <= lo + 1e-13 * lo.abs().max(1.0));
    }

    #[test]
    fn inverse_map_round_trip(tau in 0.05f64..0.95, v in 0.0f64..0.99, frac in 0.01f64..0.99) {
        let vel = Velocity::new(v).unwrap();
        let p = pwc_threshold(Regime::Sudden, tau, vel).unwrap();
        // Efficiency at an interior point of the positive-work window, hence reachable.
        let s = p.sqrt();
        let z_peak = ((s * (2.0 - p).sqrt() + p) / (2.0 - p)).sqrt();
        let eta_peak = eta_ss_high_t(z_peak.min(1.0 - 1e-12), tau, vel).unwrap();
        let eta = frac * eta_peak;
        for branch in [Branch::Lower, Branch::Upper] {
            let u = z_squared_from_eta(eta, tau, vel, branch).unwrap();
            prop_assert!(u > p && u < 1.0);
            let back = eta_ss_high_t(u.sqrt(), tau, vel).unwrap();
            prop_assert!((back - eta).abs() < 1e-9 * eta.max(1e-3), "{back} vs {eta}");
        }
    }

    #[test]
    fn generalized_carnot_rises_with_speed(tau in 0.05f64..0.95, v in 0.0f64..0.98) {
        let a = generalized_carnot(tau, Velocity::new(v).unwrap()).unwrap();
        let b = generalized_carnot(tau, Velocity::new(v + 0.01).unwrap()).unwrap();
        prop_assert!(b > a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ramp_lambda_at_least_one(
        w0 in 0.2f64..3.0,
        ratio in 0.3f64..3.0,
        duration in 0.01f64..15.0,
        squared in any::<bool>(),
    ) {
        let w1 = w0 * ratio;
        let p = if squared {
            DriveProtocol::linear_omega_squared(w0, w1, duration)
        } else {
            DriveProtocol::linear_omega(w0, w1, duration)
        }
        .unwrap();
        let lam = protocol_lambda(&p, DEFAULT_REL_TOL).unwrap();
        prop_assert!(lam >= 1.0 - 1e-9, "{lam}");
        let sudden = 1.0 + (w0 - w1).powi(2) / (2.0 * w0 * w1);
        // The quench is not an upper bound for every ramp, but it is for short ones.
        if duration * w0.max(w1) < 0.05 {
            prop_assert!(lam <= sudden + 1e-6);
        }
    }
}
