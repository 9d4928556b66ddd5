use crate::error::{Error, Result};
use crate::thermo::Velocity;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// `P_n` from the Tricomi initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Numeric solid-angle average of the inverse Doppler factor,
/// `(1/2) int_0^pi sin(theta) / (1 - v cos(theta)) dtheta`, evaluated with an
/// `nodes`-point Gauss-Legendre rule in `x = cos(theta)`.
///
/// Closed form: `ln((1 + v)/(1 - v)) / (2v)`.
pub fn solid_angle_average_inverse_doppler(v: Velocity, nodes: usize) -> Result<f64> {
    if nodes < 16 {
        return Err(Error::Domain {
            name: "nodes",
            value: nodes as f64,
            requirement: "quadrature needs at least 16 nodes",
        });
    }
    let v = v.get();
    let (xs, ws) = gauss_legendre(nodes);
    let sum: f64 = xs.iter().zip(&ws).map(|(x, w)| w / (1.0 - v * x)).sum();
    Ok(0.5 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_polynomials() {
        let (xs, ws) = gauss_legendre(20);
        assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Exact up to degree 39.
        let i: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(38)).sum();
        assert!((i - 2.0 / 39.0).abs() < 1e-14);
        let odd: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(37)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn inverse_doppler_average() {
        let v = Velocity::new(0.5).unwrap();
        let avg = solid_angle_average_inverse_doppler(v, 64).unwrap();
        assert!((avg - 3f64.ln()).abs() < 1e-10);
        let v = Velocity::new(0.9).unwrap();
        let avg = solid_angle_average_inverse_doppler(v, 128).unwrap();
        assert!((avg - 19f64.ln() / 1.8).abs() < 1e-9);
        let avg = solid_angle_average_inverse_doppler(Velocity::REST, 16).unwrap();
        assert!((avg - 1.0).abs() < 1e-14);
        assert!(solid_angle_average_inverse_doppler(Velocity::REST, 8).is_err());
    }
}
