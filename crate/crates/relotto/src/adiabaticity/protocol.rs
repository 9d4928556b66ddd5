use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Sudden,
    LinearOmega,
    LinearOmegaSquared,
    Tabulated,
}

/// Frequency schedule `omega(t)` of a work stroke on `[0, duration]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveProtocol {
    omega_start: f64,
    omega_end: f64,
    duration: f64,
    shape: Shape,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Sudden,
    LinearOmega,
    LinearOmegaSquared,
    Tabulated(Pchip),
}

impl DriveProtocol {
    /// Instantaneous quench from `omega_start` to `omega_end`.
    pub fn sudden(omega_start: f64, omega_end: f64) -> Result<Self> {
        Ok(DriveProtocol {
            omega_start: positive("omega_start", omega_start)?,
            omega_end: positive("omega_end", omega_end)?,
            duration: 0.0,
            shape: Shape::Sudden,
        })
    }

    /// `omega(t)` interpolated linearly.
    pub fn linear_omega(omega_start: f64, omega_end: f64, duration: f64) -> Result<Self> {
        Self::ramp(omega_start, omega_end, duration, Shape::LinearOmega)
    }

    /// `omega(t)^2` interpolated linearly.
    pub fn linear_omega_squared(omega_start: f64, omega_end: f64, duration: f64) -> Result<Self> {
        Self::ramp(omega_start, omega_end, duration, Shape::LinearOmegaSquared)
    }

    /// Fixed frequency for `duration`.
    pub fn constant(omega: f64, duration: f64) -> Result<Self> {
        Self::linear_omega(omega, omega, duration)
    }

    fn ramp(omega_start: f64, omega_end: f64, duration: f64, shape: Shape) -> Result<Self> {
        Ok(DriveProtocol {
            omega_start: positive("omega_start", omega_start)?,
            omega_end: positive("omega_end", omega_end)?,
            duration: positive("duration", duration)?,
            shape,
        })
    }

    /// Samples `(t_i, omega_i)` joined by a monotone piecewise cubic. The grid
    /// must start at `t = 0`, be strictly increasing and carry strictly
    /// positive frequencies.
    pub fn tabulated(times: Vec<f64>, omegas: Vec<f64>) -> Result<Self> {
        if times.len() != omegas.len() {
            return Err(Error::Protocol(format!(
                "{} times but {} frequencies",
                times.len(),
                omegas.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::Protocol("need at least two samples".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::Protocol(format!(
                "time grid must start at 0, got {}",
                times[0]
            )));
        }
        if let Some(w) = times
            .windows(2)
            .find(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::Protocol(format!(
                "time grid not strictly increasing at t = {}",
                w[1]
            )));
        }
        if let Some(&w) = omegas.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Protocol(format!(
                "frequency sample {w} is not positive"
            )));
        }
        let table = Pchip::new(times, omegas);
        Ok(DriveProtocol {
            omega_start: table.ys[0],
            omega_end: *table.ys.last().unwrap(),
            duration: *table.xs.last().unwrap(),
            shape: Shape::Tabulated(table),
        })
    }

    /// Reads a two-column `t,omega` CSV with a header row.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(table_err)?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "omega" {
            return Err(Error::Table(format!(
                "expected header `t,omega`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut omegas = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(table_err)?;
            let parse = |i: usize| -> Result<f64> {
                record[i].parse().map_err(|_| {
                    Error::Table(format!("row {}: cannot parse `{}`", row + 2, &record[i]))
                })
            };
            times.push(parse(0)?);
            omegas.push(parse(1)?);
        }
        Self::tabulated(times, omegas)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn kind(&self) -> ProtocolKind {
        match self.shape {
            Shape::Sudden => ProtocolKind::Sudden,
            Shape::LinearOmega => ProtocolKind::LinearOmega,
            Shape::LinearOmegaSquared => ProtocolKind::LinearOmegaSquared,
            Shape::Tabulated(_) => ProtocolKind::Tabulated,
        }
    }

    pub fn omega_start(&self) -> f64 {
        self.omega_start
    }

    pub fn omega_end(&self) -> f64 {
        self.omega_end
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// `omega(t)` for `t` in `[0, duration]`.
    pub fn omega(&self, t: f64) -> f64 {
        self.omega_squared(t).sqrt()
    }

    pub fn omega_squared(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Sudden => {
                let w = if t <= 0.0 {
                    self.omega_start
                } else {
                    self.omega_end
                };
                w * w
            }
            Shape::LinearOmega => {
                let w = lerp(self.omega_start, self.omega_end, t / self.duration);
                w * w
            }
            Shape::LinearOmegaSquared => lerp(
                self.omega_start * self.omega_start,
                self.omega_end * self.omega_end,
                t / self.duration,
            ),
            Shape::Tabulated(p) => {
                let w = p.eval(t);
                w * w
            }
        }
    }

    /// Times at which the drive may lose smoothness, including both ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Tabulated(p) => p.xs.clone(),
            _ => vec![0.0, self.duration],
        }
    }

    /// The same schedule played backwards, `omega'(t) = omega(T - t)`.
    pub fn reversed(&self) -> Self {
        let shape = match &self.shape {
            Shape::Tabulated(p) => {
                let t_end = self.duration;
                let xs = p.xs.iter().rev().map(|&t| t_end - t).collect();
                let ys = p.ys.iter().rev().copied().collect();
                Shape::Tabulated(Pchip::new(xs, ys))
            }
            other => other.clone(),
        };
        DriveProtocol {
            omega_start: self.omega_end,
            omega_end: self.omega_start,
            duration: self.duration,
            shape,
        }
    }
}

fn table_err(e: csv::Error) -> Error {
    Error::Table(e.to_string())
}

fn lerp(a: f64, b: f64, s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    a + (b - a) * s
}

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes with
/// the shape-preserving three-point end conditions).
#[derive(Debug, Clone, PartialEq)]
struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (delta[k - 1], delta[k]);
                if d0 == 0.0 || d1 == 0.0 || d0.signum() != d1.signum() {
                    slopes[k] = 0.0;
                } else {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Pchip { xs, ys, slopes }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.xs.len();
        let t = t.clamp(self.xs[0], self.xs[n - 1]);
        let k = match self.xs.partition_point(|&x| x <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let s = (t - self.xs[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
