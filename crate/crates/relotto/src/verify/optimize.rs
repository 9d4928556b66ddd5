use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITER: usize = 500;

/// Golden-section search for the maximum of a unimodal `objective` on
/// `[lo, hi]`. Returns `(argmax, max)` with the argmax bracketed to within
/// `tol`.
pub fn maximize_scalar<F>(objective: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Interval { lo, hi });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            requirement: "tolerance must be positive",
        });
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    for _ in 0..MAX_ITER {
        if b - a <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d);
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, objective(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let (x, fx) = maximize_scalar(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx <= 0.0 && fx > -1e-18);
    }

    #[test]
    fn maximum_at_edge() {
        let (x, _) = maximize_scalar(|x| x, 0.0, 2.0, 1e-9).unwrap();
        assert!((x - 2.0).abs() < 1e-8);
    }

    #[test]
    fn bad_inputs() {
        assert!(maximize_scalar(|x| x, 1.0, 1.0, 1e-6).is_err());
        assert!(maximize_scalar(|x| x, 1.0, 0.0, 1e-6).is_err());
        assert!(maximize_scalar(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(maximize_scalar(|x| x, 0.0, f64::INFINITY, 1e-6).is_err());
    }
}
