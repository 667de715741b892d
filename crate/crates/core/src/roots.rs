use crate::error::{Error, Result};

/// Where the search for a quantile starts and how it may expand.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Bracketing {
    pub start: f64,
    /// Initial step of the outward search.
    pub step: f64,
    /// Left end of the support, if bounded.
    pub support_min: Option<f64>,
}

/// Stopping rule for the bisection.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub cdf: f64,
    pub x_rel: f64,
}

pub(crate) const QUANTILE_TOL: Tolerance = Tolerance { cdf: 1e-9, x_rel: 1e-12 };

const MAX_DOUBLINGS: u32 = 200;

/// Solves F(x) = p for a nondecreasing F by outward exponential bracketing
/// followed by bisection.
pub(crate) fn invert_cdf(f: impl Fn(f64) -> Result<f64>, p: f64, br: Bracketing, tol: Tolerance) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("quantile level must lie in (0, 1), got {p}")));
    }
    let f0 = f(br.start)?;
    let (mut lo, mut hi) = if f0 < p {
        let mut lo = br.start;
        let mut k = 0;
        loop {
            let hi = br.start + br.step * 2f64.powi(k as i32);
            if f(hi)? >= p {
                break (lo, hi);
            }
            lo = hi;
            k += 1;
            if k > MAX_DOUBLINGS {
                return Err(Error::Numerical(format!("could not bracket the {p} quantile from above")));
            }
        }
    } else {
        let mut hi = br.start;
        let mut k = 0;
        loop {
            let lo = match br.support_min {
                Some(b) => b + (br.start - b) / 2f64.powi(k as i32 + 1),
                None => br.start - br.step * 2f64.powi(k as i32),
            };
            if f(lo)? <= p {
                break (lo, hi);
            }
            hi = lo;
            k += 1;
            if k > MAX_DOUBLINGS {
                return Err(Error::Numerical(format!("could not bracket the {p} quantile from below")));
            }
        }
    };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if (fm - p).abs() <= tol.cdf && hi - lo <= tol.x_rel * mid.abs().max(1.0) {
            return Ok(mid);
        }
        if fm < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
