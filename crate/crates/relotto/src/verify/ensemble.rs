//! Seeded Monte Carlo ensembles over `(omega_c, omega_h)`.
//!
//! The sample index space is cut into fixed-size shards. Shard `s` draws from
//! a ChaCha8 stream seeded with `seed` on stream number `s`, so the output is
//! a pure function of `(seed, config)` no matter how many threads run it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adiabaticity::Regime;
use crate::bounds::{eta_ss_upper, generalized_carnot};
use crate::error::{Error, Result};
use crate::thermo::{evaluate_cycle, EngineParams, Velocity};

/// Identifier of the sample generator, recorded in run manifests.
pub const GENERATOR_ID: &str = "chacha8-rand_chacha-0.3/stream-per-shard/shard-65536";

pub const SHARD_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub seed: u64,
    pub count: usize,
    /// Open sampling interval for `omega_c`.
    pub omega_c_range: (f64, f64),
    /// Open sampling interval for `omega_h`.
    pub omega_h_range: (f64, f64),
    pub beta_c: f64,
    pub beta_h: f64,
    pub v: f64,
    pub regime: Regime,
}

impl EnsembleConfig {
    /// Adiabatic scatter with `beta_h = 1/10`, `beta_c = 1/5`, `v = 0.85`,
    /// `omega_c in (0, 30)`, `omega_h in (0, 60)`, 10^5 samples.
    pub fn fig3(seed: u64) -> Self {
        EnsembleConfig {
            seed,
            count: 100_000,
            omega_c_range: (0.0, 30.0),
            omega_h_range: (0.0, 60.0),
            beta_c: 0.2,
            beta_h: 0.1,
            v: 0.85,
            regime: Regime::Adiabatic,
        }
    }

    /// Sudden-switch histogram with `beta_h = 1/20`, `beta_c = 1/5`, `v = 0.9`,
    /// `omega_c in (0, 20)`, `omega_h in (0, 40)`, 10^6 samples.
    pub fn fig5(seed: u64) -> Self {
        EnsembleConfig {
            seed,
            count: 1_000_000,
            omega_c_range: (0.0, 20.0),
            omega_h_range: (0.0, 40.0),
            beta_c: 0.2,
            beta_h: 0.05,
            v: 0.9,
            regime: Regime::Sudden,
        }
    }

    pub fn tau(&self) -> f64 {
        self.beta_h / self.beta_c
    }

    pub fn validate(&self) -> Result<()> {
        let range_ok =
            |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi;
        if !range_ok(self.omega_c_range) {
            return Err(Error::Config(format!(
                "omega_c range {:?} must be a nonempty interval of nonnegative numbers",
                self.omega_c_range
            )));
        }
        if !range_ok(self.omega_h_range) {
            return Err(Error::Config(format!(
                "omega_h range {:?} must be a nonempty interval of nonnegative numbers",
                self.omega_h_range
            )));
        }
        // Borrow the parameter checks for the reservoir part.
        EngineParams::new(1.0, 2.0, self.beta_c, self.beta_h, self.v, 1.0)?;
        Ok(())
    }

    /// Efficiency bound the samples are certified against.
    pub fn bound(&self) -> Result<f64> {
        let v = Velocity::new(self.v)?;
        match self.regime {
            Regime::Adiabatic => generalized_carnot(self.tau(), v),
            Regime::Sudden => eta_ss_upper(1.0 - self.tau(), v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub omega_c: f64,
    pub omega_h: f64,
    pub w_ext: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEnsemble {
    pub config: EnsembleConfig,
    pub bound: f64,
    /// Engine-mode samples in draw order.
    pub samples: Vec<Sample>,
    /// Samples with `eta >= bound`.
    pub violations: usize,
}

impl SampleEnsemble {
    pub fn accepted(&self) -> usize {
        self.samples.len()
    }

    pub fn max_eta(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.eta).reduce(f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bins `values` on `[lo, hi]`; anything outside lands in the nearest
    /// edge bin so that counts always add up to `values.len()`.
    pub fn from_values(
        values: impl IntoIterator<Item = f64>,
        lo: f64,
        hi: f64,
        bins: usize,
    ) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Config("histogram needs at least one bin".into()));
        }
        if !(lo < hi) {
            return Err(Error::Interval { lo, hi });
        }
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        for x in values {
            let k = ((x - lo) / width).floor();
            let k = if k.is_nan() || k < 0.0 {
                0
            } else {
                (k as usize).min(bins - 1)
            };
            counts[k] += 1;
        }
        Ok(Histogram { lo, hi, counts })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        let width = (self.hi - self.lo) / self.bins() as f64;
        let left = self.lo + width * k as f64;
        let right = if k + 1 == self.bins() {
            self.hi
        } else {
            self.lo + width * (k + 1) as f64
        };
        (left, right)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Draws the ensemble on up to `threads` worker threads (0 = rayon default).
pub fn run_ensemble(config: &EnsembleConfig, threads: usize) -> Result<SampleEnsemble> {
    config.validate()?;
    let bound = config.bound()?;
    let shards = config.count.div_ceil(SHARD_SIZE);

    let work = || -> Vec<Vec<Sample>> {
        (0..shards)
            .into_par_iter()
            .map(|s| draw_shard(config, s))
            .collect()
    };
    let per_shard = if threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)
    };

    let samples: Vec<Sample> = per_shard.into_iter().flatten().collect();
    let violations = samples.iter().filter(|s| s.eta >= bound).count();
    Ok(SampleEnsemble {
        config: *config,
        bound,
        samples,
        violations,
    })
}

fn draw_shard(config: &EnsembleConfig, shard: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(shard as u64);
    let start = shard * SHARD_SIZE;
    let end = (start + SHARD_SIZE).min(config.count);
    let (c_lo, c_hi) = config.omega_c_range;
    let (h_lo, h_hi) = config.omega_h_range;

    let mut out = Vec::new();
    for _ in start..end {
        let omega_c = rng.gen_range(c_lo..c_hi);
        let omega_h = rng.gen_range(h_lo..h_hi);
        // Open intervals, and only compression strokes.
        if omega_c <= c_lo || omega_h <= h_lo || omega_c >= omega_h {
            continue;
        }
        let params = match EngineParams::new(
            omega_c,
            omega_h,
            config.beta_c,
            config.beta_h,
            config.v,
            1.0,
        ) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let params = match config.regime {
            Regime::Adiabatic => params,
            Regime::Sudden => params.with_sudden_lambda(),
        };
        let result = evaluate_cycle(&params);
        if let Some(eta) = result.eta {
            out.push(Sample {
                omega_c,
                omega_h,
                w_ext: result.w_ext,
                eta,
            });
        }
    }
    out
}

/// Adiabatic scatter of `(W_ext, eta)` certified against the generalized
/// Carnot bound.
pub fn run_scatter(config: &EnsembleConfig, threads: usize) -> Result<SampleEnsemble> {
    if config.regime != Regime::Adiabatic {
        return Err(Error::Config("scatter runs use adiabatic driving".into()));
    }
    run_ensemble(config, threads)
}

/// Sudden-switch ensemble certified against the sudden upper bound, with a
/// histogram of efficiencies on `[0, bound]`.
pub fn run_histogram(
    config: &EnsembleConfig,
    bins: usize,
    threads: usize,
) -> Result<(SampleEnsemble, Histogram)> {
    if config.regime != Regime::Sudden {
        return Err(Error::Config("histogram runs use the sudden switch".into()));
    }
    let ens = run_ensemble(config, threads)?;
    let hist = Histogram::from_values(ens.samples.iter().map(|s| s.eta), 0.0, ens.bound, bins)?;
    Ok((ens, hist))
}
