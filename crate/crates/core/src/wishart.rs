//! Exact law of the largest eigenvalue of real and complex white Wishart
//! matrices.
//!
//! Real case: F(x) = K′ √det A(x) with A the even-order skew matrix of
//! incomplete-gamma kernels, assembled by the recursion
//! `a_{i,j+1} = a_{i,j} − p_i r_j + 2 q_{i+j} / (γ_i γ_{j+1})`, a_{i,i} = 0.
//! Complex case: F(x) = K_C det[γ(n_max − n_min + i + j − 1, x)].

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, fl, gamma_half_product, gamma_ladder, mul_pow2_half, IncGammaFamily, Precision};
use crate::roots::{invert_cdf, Bracketing, Tolerance, QUANTILE_TOL};
use crate::skewlin::{LogValue, SkewMatrix, SquareMatrix};
use crate::specfun::ln_gamma;
use crate::tw_gamma::centering_wishart;

/// Largest supported n_min for the exact path. Accuracy is monitored up to
/// 500; beyond that the runtime grows as n³ at an increasing precision.
pub const MAX_N_MIN: usize = 1000;

/// Cancelled bits per unit of matrix order for square shapes, measured on
/// grids spanning the bulk of the law. Each doubling of n_max/n_min costs
/// about one more bit per order.
const REAL_BITS_PER_ORDER: f64 = 3.3;
const COMPLEX_BITS_PER_ORDER: f64 = 3.9;
const BITS_PER_ORDER_PER_OCTAVE: f64 = 1.1;

fn bits_per_order(dims: &WishartDims, kind: WishartKind) -> f64 {
    let base = match kind {
        WishartKind::Real => REAL_BITS_PER_ORDER,
        WishartKind::Complex => COMPLEX_BITS_PER_ORDER,
    };
    base + BITS_PER_ORDER_PER_OCTAVE * (dims.n_max as f64 / dims.n_min as f64).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WishartDims {
    n_min: usize,
    n_max: usize,
}

impl WishartDims {
    pub fn new(n_min: usize, n_max: usize) -> Result<Self> {
        if n_min < 1 {
            return Err(Error::domain("n_min must be at least 1"));
        }
        if n_max < n_min {
            return Err(Error::domain(format!("n_max ({n_max}) must be at least n_min ({n_min})")));
        }
        Ok(WishartDims { n_min, n_max })
    }

    /// Dims of W = XXᵀ for a p × m data matrix, in either order.
    pub fn from_shape(p: usize, m: usize) -> Result<Self> {
        Self::new(p.min(m), p.max(m))
    }

    pub fn n_min(&self) -> usize {
        self.n_min
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// α = (n_max − n_min − 1)/2.
    pub fn alpha(&self) -> f64 {
        0.5 * (self.n_max as f64 - self.n_min as f64 - 1.0)
    }

    /// n_min rounded up to even.
    pub fn n_mat(&self) -> usize {
        self.n_min + self.n_min % 2
    }

    fn check_size(&self) -> Result<()> {
        if self.n_min > MAX_N_MIN {
            return Err(Error::Capability(format!("n_min = {} exceeds the supported {MAX_N_MIN}", self.n_min)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WishartKind {
    Real,
    Complex,
}

fn check_point(x: f64) -> Result<()> {
    if x.is_nan() {
        return Err(Error::domain("evaluation point is NaN"));
    }
    Ok(())
}

fn check_assembly_point(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 || x.is_infinite() {
        return Err(Error::domain(format!("matrix assembly needs finite x ≥ 0, got {x}")));
    }
    Ok(())
}

/// Row-major skew matrix of the real case at working precision `prec`.
fn real_matrix_mp(dims: &WishartDims, x: f64, prec: u32) -> Vec<Float> {
    let n = dims.n_min;
    let nm = dims.n_mat();
    let two_alpha = dims.n_max as i64 - n as i64 - 1;
    let half = two_alpha.rem_euclid(2) == 1;
    // α + ℓ = a₀ + (ℓ + s) with a₀ ∈ {0, ½}.
    let s = two_alpha.div_euclid(2);
    let alpha = dims.alpha();
    let xf = fl(prec, x);
    let y = Float::with_val(prec, &xf / 2u32);
    let fam_y = IncGammaFamily::new(prec, half, &y, (s + nm as i64 + 1) as usize);
    let idx = |l: usize| (l as i64 + s) as usize;
    let p = |l: usize| &fam_y.p[idx(l)];
    let r = |l: usize| &fam_y.t[idx(l)];

    // q_ℓ = 2^{−(2α+ℓ)} Γ(2α+ℓ) P(2α+ℓ, x) for ℓ = 2..=2n−1
    let q: Vec<Float> = if n >= 2 {
        let fam_x = IncGammaFamily::new(prec, false, &xf, (two_alpha + 2 * n as i64) as usize);
        let gam = gamma_ladder(prec, (two_alpha + 2) as f64, 2 * n - 2);
        (2..2 * n)
            .map(|l| {
                let shape = (two_alpha + l as i64) as usize;
                let mut v = Float::with_val(prec, &gam[l - 2] * &fam_x.p[shape]);
                v >>= shape as u32;
                v
            })
            .collect()
    } else {
        Vec::new()
    };
    // 1/Γ(α+ℓ) for ℓ = 1..=n_mat
    let inv_gamma: Vec<Float> = gamma_ladder(prec, alpha + 1.0, nm).into_iter().map(|g| g.recip()).collect();
    let ig = |l: usize| &inv_gamma[l - 1];

    let mut a = vec![fl(prec, 0.0); nm * nm];
    let mut tmp = Float::new(prec);
    for i in 1..=n {
        let mut acc = fl(prec, 0.0);
        for j in i..n {
            tmp.assign(p(i) * r(j));
            acc -= &tmp;
            tmp.assign(&q[i + j - 2] * ig(i));
            tmp *= ig(j + 1);
            tmp <<= 1;
            acc += &tmp;
            a[(j) * nm + (i - 1)] = Float::with_val(prec, -&acc);
            a[(i - 1) * nm + j] = acc.clone();
        }
    }
    if n % 2 == 1 {
        // 2^{−(α+n+1)} / Γ(α+n+1) · P(α+i, x/2)
        let coef = mul_pow2_half(prec, ig(nm), -(dims.n_max as i64 + n as i64 + 1));
        for i in 1..=n {
            let v = Float::with_val(prec, &coef * p(i));
            a[n * nm + (i - 1)] = Float::with_val(prec, -&v);
            a[(i - 1) * nm + n] = v;
        }
    }
    a
}

/// K′ of the real case at working precision `prec`.
fn real_norm_mp(dims: &WishartDims, prec: u32) -> Float {
    let n = dims.n_min as u64;
    let nmax = dims.n_max as u64;
    let nm = dims.n_mat() as u64;
    let mut k = Float::with_val(prec, Constant::Pi).sqrt().pow(n as u32);
    k /= gamma_half_product(prec, nmax - n + 1, nmax);
    k /= gamma_half_product(prec, 1, n);
    for g in gamma_ladder(prec, dims.alpha() + 1.0, nm as usize) {
        k *= g;
    }
    // 2^{−n n_max/2 + α n_mat + n_mat(n_mat+1)/2}, in half units
    let halves = -((n * nmax) as i64) + (nmax as i64 - n as i64 - 1) * nm as i64 + (nm * (nm + 1)) as i64;
    mul_pow2_half(prec, &k, halves)
}

fn complex_matrix_mp(dims: &WishartDims, x: f64, prec: u32) -> Vec<Float> {
    let n = dims.n_min;
    let nu = dims.n_max - n;
    let fam = IncGammaFamily::new(prec, false, &fl(prec, x), nu + 2 * n - 1);
    let gam = gamma_ladder(prec, (nu + 1) as f64, 2 * n - 1);
    let by_sum: Vec<Float> = (0..2 * n - 1).map(|k| Float::with_val(prec, &gam[k] * &fam.p[nu + 1 + k])).collect();
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(by_sum[i + j].clone());
        }
    }
    a
}

/// K_C = 1 / ∏ (n_max − i)! (n_min − i)!.
fn complex_norm_mp(dims: &WishartDims, prec: u32) -> Float {
    let n = dims.n_min;
    let mut d = fl(prec, 1.0);
    for g in gamma_ladder(prec, (dims.n_max - n + 1) as f64, n) {
        d *= g;
    }
    for g in gamma_ladder(prec, 1.0, n) {
        d *= g;
    }
    d.recip()
}

fn to_square(a: &[Float], n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |i, j| a[i * n + j].to_f64())
}

/// The real-case skew matrix A(x) (production recursion, rounded to f64).
pub fn assemble_a_real(dims: &WishartDims, x: f64) -> Result<SkewMatrix> {
    dims.check_size()?;
    check_assembly_point(x)?;
    let prec = Precision::Auto.resolve(dims.n_mat(), bits_per_order(dims, WishartKind::Real));
    SkewMatrix::new(to_square(&real_matrix_mp(dims, x, prec), dims.n_mat()))
}

/// The complex-case matrix [γ(n_max − n_min + i + j − 1, x)].
pub fn assemble_a_complex(dims: &WishartDims, x: f64) -> Result<SquareMatrix> {
    dims.check_size()?;
    check_assembly_point(x)?;
    let prec = Precision::Auto.resolve(dims.n_min, bits_per_order(dims, WishartKind::Complex));
    Ok(to_square(&complex_matrix_mp(dims, x, prec), dims.n_min))
}

/// ln K′ (real) or ln K_C (complex) from double-precision log-gamma sums.
pub fn log_norm_const(dims: &WishartDims, kind: WishartKind) -> LogValue {
    let n = dims.n_min;
    let nmax = dims.n_max as f64;
    let ln2 = std::f64::consts::LN_2;
    let v = match kind {
        WishartKind::Real => {
            let nm = dims.n_mat();
            let alpha = dims.alpha();
            let mut v = 0.5 * n as f64 * std::f64::consts::PI.ln() - 0.5 * n as f64 * nmax * ln2;
            for i in 1..=n {
                v -= ln_gamma(0.5 * (nmax - i as f64 + 1.0)) + ln_gamma(0.5 * (n - i + 1) as f64);
            }
            v += (alpha * nm as f64 + 0.5 * (nm * (nm + 1)) as f64) * ln2;
            for k in 1..=nm {
                v += ln_gamma(alpha + k as f64);
            }
            v
        }
        WishartKind::Complex => -(1..=n)
            .map(|i| ln_gamma(nmax - i as f64 + 1.0) + ln_gamma((n - i + 1) as f64))
            .sum::<f64>(),
    };
    LogValue::new(1, v)
}

pub fn cdf_wishart_real(dims: &WishartDims, x: f64) -> Result<f64> {
    cdf_wishart_with(dims, WishartKind::Real, x, Precision::Auto)
}

pub fn cdf_wishart_complex(dims: &WishartDims, x: f64) -> Result<f64> {
    cdf_wishart_with(dims, WishartKind::Complex, x, Precision::Auto)
}

pub fn cdf_wishart(dims: &WishartDims, kind: WishartKind, x: f64) -> Result<f64> {
    cdf_wishart_with(dims, kind, x, Precision::Auto)
}

/// CDF at an explicit working precision.
pub fn cdf_wishart_with(dims: &WishartDims, kind: WishartKind, x: f64, precision: Precision) -> Result<f64> {
    dims.check_size()?;
    check_point(x)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let v = match kind {
        WishartKind::Real => {
            let nm = dims.n_mat();
            let prec = precision.resolve(nm, bits_per_order(dims, WishartKind::Real));
            let pf = mp::pfaffian(real_matrix_mp(dims, x, prec), nm);
            mp::scaled_pfaffian(&real_norm_mp(dims, prec), pf)?
        }
        WishartKind::Complex => {
            let n = dims.n_min;
            let prec = precision.resolve(n, bits_per_order(dims, WishartKind::Complex));
            let det = mp::det(complex_matrix_mp(dims, x, prec), n);
            let v = Float::with_val(prec, &det * &complex_norm_mp(dims, prec)).to_f64();
            if v < -1e-9 {
                return Err(Error::Numerical(format!("complex Wishart determinant came out negative ({v:e})")));
            }
            v
        }
    };
    mp::clamp_unit(v)
}

/// Central difference of the CDF with step max(1e-5, 1e-5·x).
pub fn pdf_wishart(dims: &WishartDims, kind: WishartKind, x: f64) -> Result<f64> {
    check_point(x)?;
    if x <= 0.0 || x.is_infinite() {
        return Ok(0.0);
    }
    let h = (1e-5 * x).max(1e-5);
    let lo = (x - h).max(0.0);
    let d = (cdf_wishart(dims, kind, x + h)? - cdf_wishart(dims, kind, lo)?) / (x + h - lo);
    Ok(d.max(0.0))
}

pub fn quantile_wishart(dims: &WishartDims, kind: WishartKind, p: f64) -> Result<f64> {
    quantile_wishart_tol(dims, kind, p, QUANTILE_TOL)
}

pub(crate) fn quantile_wishart_tol(dims: &WishartDims, kind: WishartKind, p: f64, tol: Tolerance) -> Result<f64> {
    dims.check_size()?;
    let beta = match kind {
        WishartKind::Real => 1,
        WishartKind::Complex => 2,
    };
    let start = match centering_wishart(dims.n_max, dims.n_min, beta) {
        Ok(c) => c.mu_c,
        Err(_) => (dims.n_max * dims.n_min) as f64,
    };
    let br = Bracketing { start, step: start, support_min: Some(0.0) };
    invert_cdf(|x| cdf_wishart(dims, kind, x), p, br, tol)
}

/// Matrix assembly straight from the kernel definition
/// a_{i,j} = P(α_i) P(α_j) − 2 I(α_i, α_j; x/2), in double precision.
/// Independent of the production recursion and used to cross-check it.
#[cfg(feature = "reference")]
pub mod reference {
    use super::*;
    use crate::specfun::{kernel_i, p_unchecked};

    pub fn assemble_a_real_kernel(dims: &WishartDims, x: f64) -> Result<SkewMatrix> {
        check_assembly_point(x)?;
        let n = dims.n_min;
        let nm = dims.n_mat();
        let alpha = dims.alpha();
        let y = 0.5 * x;
        let al = |i: usize| alpha + i as f64;
        let mut m = SquareMatrix::zeros(nm);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let v = p_unchecked(al(i), y) * p_unchecked(al(j), y) - 2.0 * kernel_i(al(i), al(j), y)?;
                m.set(i - 1, j - 1, v);
                m.set(j - 1, i - 1, -v);
            }
        }
        if n % 2 == 1 {
            let last = al(n + 1);
            let coef = (-last * std::f64::consts::LN_2 - ln_gamma(last)).exp();
            for i in 1..=n {
                let v = coef * p_unchecked(al(i), y);
                m.set(i - 1, n, v);
                m.set(n, i - 1, -v);
            }
        }
        SkewMatrix::new(m)
    }
}
