use relotto::adiabaticity::{
    lambda_closed_form, lambda_from_trajectory, solve_husimi, stroke_lambdas, DriveProtocol,
    DEFAULT_REL_TOL,
};
use relotto::bounds::{
    eta_ss_high_t, optimal_z, pwc_threshold, w_adiabatic_high_t, w_ss_high_t, BoundsReport,
};
use relotto::thermo::doppler_factor;
use relotto::verify::{
    checks, numeric_optimal_z, run_histogram, run_scatter, EnsembleConfig, SampleEnsemble,
    GENERATOR_ID, TAU_GRID, V_GRID,
};
use relotto::{evaluate_cycle, EngineParams, Regime, Velocity};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{
    BoundsArgs, CycleArgs, EnsembleArgs, Format, LambdaArgs, OptimizeArgs, Preset, RegimeArg,
    SweepArgs, VerifyArgs,
};
use crate::config::resolve;
use crate::emit::{self, json_num, Cell, Table};
use crate::{CliError, Status};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_COUNT: usize = 100_000;
const DEFAULT_BINS: usize = 50;
const DEFAULT_Z_GRID: &str = "0.01:0.99:0.01";
const DEFAULT_OPT_TOL: f64 = 1e-10;
const MAX_GRID_POINTS: usize = 10_000_000;
/// Relative mismatch allowed between a tabulated protocol's end points and
/// the requested stroke frequencies.
const ENDPOINT_TOL: f64 = 1e-12;

/// `OTTO_THREADS` caps shard parallelism; unset or 0 means one thread per core.
pub fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var("OTTO_THREADS") {
        Ok(s) if !s.trim().is_empty() => s.trim().parse().map_err(|_| {
            CliError::Input(format!("OTTO_THREADS: `{s}` is not a nonnegative integer"))
        }),
        _ => Ok(0),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("--{flag} is required")))
}

fn to_map<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("reports serialize to objects"),
    }
}

fn base_manifest(command: &str, config: Map<String, Value>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), command.into());
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("config".into(), Value::Object(config));
    m
}

fn format_of(f: Option<Format>) -> Format {
    f.unwrap_or(Format::Csv)
}

/// How the adiabaticity parameter of a stroke is obtained.
enum LambdaSource {
    Closed(Regime),
    Ramp(DriveProtocol),
}

fn lambda_source(
    name: &str,
    omega_c: Option<f64>,
    omega_h: Option<f64>,
    duration: Option<f64>,
) -> Result<LambdaSource, CliError> {
    let ramp = |build: fn(f64, f64, f64) -> relotto::Result<DriveProtocol>| {
        let p = build(
            required(omega_c, "omega-c")?,
            required(omega_h, "omega-h")?,
            required(duration, "duration")?,
        )?;
        Ok(LambdaSource::Ramp(p))
    };
    match name {
        "sudden" => Ok(LambdaSource::Closed(Regime::Sudden)),
        "adiabatic" => Ok(LambdaSource::Closed(Regime::Adiabatic)),
        "linear_omega" => ramp(DriveProtocol::linear_omega),
        "linear_omega_squared" => ramp(DriveProtocol::linear_omega_squared),
        path => {
            let p = DriveProtocol::from_csv_path(path)
                .map_err(|e| CliError::Input(format!("--lambda-protocol: {e}")))?;
            if let (Some(a), Some(b)) = (omega_c, omega_h) {
                let close = |x: f64, y: f64| (x - y).abs() <= ENDPOINT_TOL * x.abs().max(y.abs());
                let (s, e) = (p.omega_start(), p.omega_end());
                if !(close(s, a) && close(e, b) || close(s, b) && close(e, a)) {
                    return Err(CliError::Input(format!(
                        "--lambda-protocol: table runs from {s} to {e}, \
                         but --omega-c {a} and --omega-h {b} were given"
                    )));
                }
            }
            if duration.is_some() {
                return Err(CliError::Input(
                    "--duration: a tabulated protocol carries its own duration".into(),
                ));
            }
            Ok(LambdaSource::Ramp(p))
        }
    }
}

pub fn cycle(flags: CycleArgs) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    let omega_c = required(a.omega_c, "omega-c")?;
    let omega_h = required(a.omega_h, "omega-h")?;
    let beta_c = required(a.beta_c, "beta-c")?;
    let beta_h = required(a.beta_h, "beta-h")?;
    let v = required(a.v, "v")?;
    // Validate the physics flags before any integration work.
    let base = EngineParams::new(omega_c, omega_h, beta_c, beta_h, v, 1.0)?;
    let rel_tol = a.rel_tol.unwrap_or(DEFAULT_REL_TOL);

    let mut extra = Map::new();
    let params = match (a.lambda, a.lambda_protocol.as_deref()) {
        (Some(_), Some(_)) => {
            return Err(CliError::Input(
                "--lambda and --lambda-protocol are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Input(
                "--lambda or --lambda-protocol is required".into(),
            ))
        }
        (Some(lambda), None) => {
            extra.insert("lambda_source".into(), "flag".into());
            base.with_lambda(lambda)?
        }
        (None, Some(name)) => {
            let lambda = match lambda_source(name, Some(omega_c), Some(omega_h), a.duration)? {
                LambdaSource::Closed(regime) => {
                    if a.duration.is_some() {
                        return Err(CliError::Input(format!(
                            "--duration: not used by the {regime} protocol"
                        )));
                    }
                    lambda_closed_form(regime, omega_c, omega_h)?
                }
                LambdaSource::Ramp(p) => {
                    let strokes = stroke_lambdas(&p, rel_tol)?;
                    extra.insert("stroke_lambdas".into(), Value::Object(to_map(&strokes)));
                    strokes.mean()
                }
            };
            extra.insert("lambda_source".into(), name.into());
            base.with_lambda(lambda)?
        }
    };

    let result = evaluate_cycle(&params);
    let mut doc = to_map(&result);
    doc.insert(
        "closure_residual".into(),
        json_num(result.closure_residual()),
    );
    for (k, x) in [
        ("omega_c", params.omega_c()),
        ("omega_h", params.omega_h()),
        ("beta_c", params.beta_c()),
        ("beta_h", params.beta_h()),
        ("v", params.v().get()),
        ("lambda", params.lambda()),
        ("z", params.z()),
        ("tau", params.tau()),
    ] {
        doc.insert(k.into(), json_num(x));
    }
    doc.extend(extra);
    doc.insert("config".into(), Value::Object(config));
    let format = a.format.unwrap_or(Format::Json);
    emit::record(format, io.output.as_deref(), doc)?;
    Ok(if result.is_engine() {
        Status::Ok
    } else {
        Status::NotEngine
    })
}

pub fn bounds(flags: BoundsArgs) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    let tau = required(a.tau, "tau")?;
    let v = Velocity::new(required(a.v, "v")?)?;
    let report = BoundsReport::new(tau, v)?;
    let mut doc = to_map(&report);
    doc.insert("config".into(), Value::Object(config));
    emit::record(a.format.unwrap_or(Format::Json), io.output.as_deref(), doc)?;
    Ok(Status::Ok)
}

pub fn lambda(flags: LambdaArgs) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    let name = required(a.lambda_protocol.as_deref(), "lambda-protocol")?;
    let rel_tol = a.rel_tol.unwrap_or(DEFAULT_REL_TOL);
    let mut doc = Map::new();
    match lambda_source(name, a.omega_c, a.omega_h, a.duration)? {
        LambdaSource::Closed(regime) => {
            let lambda = lambda_closed_form(
                regime,
                required(a.omega_c, "omega-c")?,
                required(a.omega_h, "omega-h")?,
            )?;
            doc.insert("lambda".into(), json_num(lambda));
        }
        LambdaSource::Ramp(p) => {
            let forward = solve_husimi(&p, rel_tol)?;
            let backward = solve_husimi(&p.reversed(), rel_tol)?;
            let (w0, w1) = (p.omega_start(), p.omega_end());
            let compression = lambda_from_trajectory(&forward, w0, w1)?;
            let expansion = lambda_from_trajectory(&backward, w1, w0)?;
            doc.insert("lambda".into(), json_num(compression));
            doc.insert("lambda_reverse".into(), json_num(expansion));
            doc.insert("omega_start".into(), json_num(w0));
            doc.insert("omega_end".into(), json_num(w1));
            doc.insert("duration".into(), json_num(p.duration()));
            doc.insert(
                "wronskian_drift".into(),
                json_num(
                    forward
                        .max_wronskian_drift
                        .max(backward.max_wronskian_drift),
                ),
            );
            doc.insert("steps".into(), (forward.steps + backward.steps).into());
            doc.insert(
                "rejected_steps".into(),
                (forward.rejected_steps + backward.rejected_steps).into(),
            );
            doc.insert("rel_tol".into(), json_num(rel_tol));
            doc.insert(
                "lambda_sudden".into(),
                json_num(lambda_closed_form(Regime::Sudden, w0, w1)?),
            );
        }
    }
    doc.insert("protocol".into(), name.into());
    doc.insert("config".into(), Value::Object(config));
    emit::record(a.format.unwrap_or(Format::Json), io.output.as_deref(), doc)?;
    Ok(Status::Ok)
}

/// Parses `start:stop:step` into an inclusive grid inside `(0, 1)`.
fn parse_z_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Input(format!("--z-grid: `{spec}` {why}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("is not start:stop:step"))?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("is not start:stop:step"));
    };
    if !(start > 0.0 && stop < 1.0 && start <= stop) {
        return Err(bad("must satisfy 0 < start <= stop < 1"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(bad("needs a positive step"));
    }
    let n = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize + 1;
    if n > MAX_GRID_POINTS {
        return Err(bad("has too many points"));
    }
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// Parses `lo:hi`.
fn parse_range(flag: &str, spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Input(format!("--{flag}: `{spec}` is not lo:hi"));
    let (lo, hi) = spec.split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

pub fn sweep(flags: SweepArgs) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    let (p_tau, p_v, p_regime) = match a.preset {
        None => (None, None, None),
        Some(Preset::Fig2) => (
            Some(0.5),
            Some(vec![0.0, 0.4, 0.7, 0.9]),
            Some(RegimeArg::Adiabatic),
        ),
        Some(other) => {
            return Err(CliError::Input(
                format!("--preset: {other:?} is not a sweep preset (use fig2)").to_lowercase(),
            ))
        }
    };
    let tau = required(a.tau.or(p_tau), "tau")?;
    let vs = required(a.v.or(p_v), "v")?;
    if vs.is_empty() {
        return Err(CliError::Input("--v: empty list".into()));
    }
    let regime: Regime = a.regime.or(p_regime).unwrap_or(RegimeArg::Adiabatic).into();
    let beta_h = a.beta_h.unwrap_or(1.0);
    let zs = parse_z_grid(a.z_grid.as_deref().unwrap_or(DEFAULT_Z_GRID))?;

    let mut table = Table::new(vec!["z", "v", "w_ext", "eta"]);
    let mut curves = Vec::new();
    for &v in &vs {
        let vel = Velocity::new(v)?;
        let mut curve = Map::new();
        curve.insert("v".into(), json_num(v));
        curve.insert("doppler_factor".into(), json_num(doppler_factor(vel)));
        let threshold = pwc_threshold(regime, tau, vel)?;
        let z_threshold = match regime {
            Regime::Adiabatic => threshold,
            Regime::Sudden => threshold.sqrt(),
        };
        curve.insert("z_threshold".into(), json_num(z_threshold));
        curve.insert("z_opt".into(), json_num(optimal_z(regime, tau, vel)?));
        curves.push(Value::Object(curve));
        for &z in &zs {
            let (w, eta) = match regime {
                Regime::Adiabatic => (w_adiabatic_high_t(z, tau, vel, beta_h)?, 1.0 - z),
                Regime::Sudden => (
                    w_ss_high_t(z, tau, vel, beta_h)?,
                    eta_ss_high_t(z, tau, vel)?,
                ),
            };
            let eta = if w > 0.0 { Cell::Num(eta) } else { Cell::Empty };
            table.push(vec![z.into(), v.into(), w.into(), eta]);
        }
    }
    let mut manifest = base_manifest("sweep", config);
    manifest.insert("regime".into(), regime.to_string().into());
    manifest.insert("tau".into(), json_num(tau));
    manifest.insert("beta_h".into(), json_num(beta_h));
    manifest.insert("curves".into(), Value::Array(curves));
    emit::table(format_of(a.format), io.output.as_deref(), &table, manifest)?;
    Ok(Status::Ok)
}

fn ensemble_config(
    a: &EnsembleArgs,
    command: &str,
    preset_for: Preset,
) -> Result<EnsembleConfig, CliError> {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let base = match a.preset {
        None => None,
        Some(p) if p == preset_for => Some(match p {
            Preset::Fig3 => EnsembleConfig::fig3(seed),
            _ => EnsembleConfig::fig5(seed),
        }),
        Some(p) => {
            return Err(CliError::Input(format!(
                "--preset: {} is not a {command} preset",
                format!("{p:?}").to_lowercase()
            )))
        }
    };
    let regime = match preset_for {
        Preset::Fig3 => Regime::Adiabatic,
        _ => Regime::Sudden,
    };
    let range = |flag: &str, given: &Option<String>, fallback: Option<(f64, f64)>| match given {
        Some(s) => parse_range(flag, s),
        None => required(fallback, flag),
    };
    let cfg = EnsembleConfig {
        seed,
        count: a.count.or(base.map(|b| b.count)).unwrap_or(DEFAULT_COUNT),
        omega_c_range: range(
            "omega-c-range",
            &a.omega_c_range,
            base.map(|b| b.omega_c_range),
        )?,
        omega_h_range: range(
            "omega-h-range",
            &a.omega_h_range,
            base.map(|b| b.omega_h_range),
        )?,
        beta_c: required(a.beta_c.or(base.map(|b| b.beta_c)), "beta-c")?,
        beta_h: required(a.beta_h.or(base.map(|b| b.beta_h)), "beta-h")?,
        v: required(a.v.or(base.map(|b| b.v)), "v")?,
        regime,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn ensemble_manifest(
    command: &str,
    mut config: Map<String, Value>,
    ens: &SampleEnsemble,
) -> Map<String, Value> {
    config
        .entry("seed")
        .or_insert_with(|| ens.config.seed.into());
    let mut m = base_manifest(command, config);
    m.insert("generator".into(), GENERATOR_ID.into());
    m.insert("seed".into(), ens.config.seed.into());
    m.insert("ensemble".into(), Value::Object(to_map(&ens.config)));
    m.insert("tau".into(), json_num(ens.config.tau()));
    m.insert("bound".into(), json_num(ens.bound));
    m.insert("violations".into(), ens.violations.into());
    m.insert("accepted".into(), ens.accepted().into());
    m.insert(
        "max_eta".into(),
        ens.max_eta().map_or(Value::Null, json_num),
    );
    m
}

pub fn scatter(flags: EnsembleArgs, threads: usize) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    if a.bins.is_some() {
        return Err(CliError::Input("--bins: only used by hist".into()));
    }
    let cfg = ensemble_config(&a, "scatter", Preset::Fig3)?;
    let ens = run_scatter(&cfg, threads)?;
    let mut table = Table::new(vec!["omega_c", "omega_h", "w_ext", "eta"]);
    for s in &ens.samples {
        table.push(vec![
            s.omega_c.into(),
            s.omega_h.into(),
            s.w_ext.into(),
            s.eta.into(),
        ]);
    }
    let manifest = ensemble_manifest("scatter", config, &ens);
    emit::table(format_of(a.format), io.output.as_deref(), &table, manifest)?;
    Ok(Status::Ok)
}

pub fn hist(flags: EnsembleArgs, threads: usize) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    let bins = a.bins.unwrap_or(DEFAULT_BINS);
    if bins == 0 {
        return Err(CliError::Input("--bins: must be at least 1".into()));
    }
    let cfg = ensemble_config(&a, "hist", Preset::Fig5)?;
    let (ens, h) = run_histogram(&cfg, bins, threads)?;
    let mut table = Table::new(vec!["bin_left", "bin_right", "count"]);
    for (k, &count) in h.counts.iter().enumerate() {
        let (lo, hi) = h.edges(k);
        table.push(vec![lo.into(), hi.into(), Cell::Int(count)]);
    }
    let mut manifest = ensemble_manifest("hist", config, &ens);
    manifest.insert("bins".into(), bins.into());
    emit::table(format_of(a.format), io.output.as_deref(), &table, manifest)?;
    Ok(Status::Ok)
}

pub fn optimize(flags: OptimizeArgs) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    let regimes = match a.regime {
        Some(r) => vec![Regime::from(r)],
        None => vec![Regime::Adiabatic, Regime::Sudden],
    };
    let taus = a.tau.clone().unwrap_or_else(|| TAU_GRID.to_vec());
    let vs = a.v.clone().unwrap_or_else(|| V_GRID.to_vec());
    let tol = a.tol.unwrap_or(DEFAULT_OPT_TOL);
    let mut table = Table::new(vec![
        "regime",
        "tau",
        "v",
        "z_numeric",
        "z_closed_form",
        "abs_diff",
        "w_max",
    ]);
    let mut worst = 0.0_f64;
    for &regime in &regimes {
        for &tau in &taus {
            for &v in &vs {
                let vel = Velocity::new(v)?;
                let (z, w) = numeric_optimal_z(regime, tau, vel, tol)?;
                let closed = optimal_z(regime, tau, vel)?;
                let diff = (z - closed).abs();
                worst = worst.max(diff);
                table.push(vec![
                    Cell::Text(regime.to_string()),
                    tau.into(),
                    v.into(),
                    z.into(),
                    closed.into(),
                    diff.into(),
                    w.into(),
                ]);
            }
        }
    }
    let mut manifest = base_manifest("optimize", config);
    manifest.insert("tol".into(), json_num(tol));
    manifest.insert("max_abs_diff".into(), json_num(worst));
    emit::table(format_of(a.format), io.output.as_deref(), &table, manifest)?;
    Ok(Status::Ok)
}

pub fn verify(flags: VerifyArgs, threads: usize) -> Result<Status, CliError> {
    let io = flags.io.clone();
    let (a, config) = resolve(&flags, io.config.as_deref())?;
    let outcomes = checks::run_all(threads);
    let mut table = Table::new(vec!["check", "passed", "detail"]);
    for o in &outcomes {
        table.push(vec![
            Cell::Text(o.name.into()),
            Cell::Text(o.passed.to_string()),
            Cell::Text(o.detail.clone()),
        ]);
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name.to_string())
        .collect();
    let mut manifest = base_manifest("verify", config);
    manifest.insert("checks".into(), outcomes.len().into());
    manifest.insert("failed".into(), failed.clone().into());
    emit::table(format_of(a.format), io.output.as_deref(), &table, manifest)?;
    Ok(if failed.is_empty() {
        Status::Ok
    } else {
        Status::ChecksFailed(failed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_grid_inclusive() {
        let g = parse_z_grid("0.05:0.95:0.01").unwrap();
        assert_eq!(g.len(), 91);
        assert!((g[90] - 0.95).abs() < 1e-12);
        assert_eq!(parse_z_grid("0.5:0.5:0.1").unwrap(), vec![0.5]);
        for bad in [
            "0:0.9:0.1",
            "0.1:1:0.1",
            "0.1:0.9",
            "0.1:0.9:0",
            "a:b:c",
            "0.9:0.1:0.1",
        ] {
            assert!(parse_z_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("x", "0:30").unwrap(), (0.0, 30.0));
        assert!(parse_range("x", "30").is_err());
    }

    #[test]
    fn preset_overrides() {
        let a = EnsembleArgs {
            preset: Some(Preset::Fig5),
            v: Some(0.5),
            count: Some(10),
            ..Default::default()
        };
        let cfg = ensemble_config(&a, "hist", Preset::Fig5).unwrap();
        assert_eq!(cfg.v, 0.5);
        assert_eq!(cfg.count, 10);
        assert_eq!(cfg.beta_h, 0.05);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert!(ensemble_config(&a, "scatter", Preset::Fig3).is_err());
    }

    #[test]
    fn explicit_config_needs_every_field() {
        let a = EnsembleArgs {
            beta_c: Some(0.2),
            beta_h: Some(0.1),
            v: Some(0.3),
            omega_c_range: Some("0:5".into()),
            ..Default::default()
        };
        let err = ensemble_config(&a, "scatter", Preset::Fig3).unwrap_err();
        assert!(err.to_string().contains("--omega-h-range"));
    }
}
