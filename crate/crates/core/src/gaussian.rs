//! Exact law of the largest eigenvalue of GOE (β = 1) and GUE (β = 2)
//! matrices.
//!
//! GOE: F(x) = K′_GOE √det A(x), a_{i,j} = ψ(i,x)ψ(j,x) − 2 I_G(i,j;x), with
//! the column a_{i,n+1} = ψ(i,x)/Γ((n+1)/2) appended for odd n.
//! GUE: F(x) = K_GUE det[∫_{−∞}^x t^{i+j−2} e^{−t²} dt].

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{self, fl, half_gamma_table, mul_pow2_half, IncGammaFamily, Precision};
use crate::roots::{invert_cdf, Bracketing, Tolerance, QUANTILE_TOL};
use crate::skewlin::{SkewMatrix, SquareMatrix};
use crate::tw_gamma::centering_gaussian;

/// Largest supported matrix order for the exact path.
pub const MAX_N: usize = 1000;

/// The CDF is reported as 0 below this point without assembling A.
pub const LEFT_CUTOFF: f64 = -40.0;

const GOE_BITS_PER_ORDER: f64 = 2.0;
const GUE_BITS_PER_ORDER: f64 = 2.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussEnsembleDims {
    n: usize,
    beta: u32,
}

impl GaussEnsembleDims {
    pub fn new(n: usize, beta: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("matrix order must be at least 1"));
        }
        if beta != 1 && beta != 2 {
            return Err(Error::domain(format!("exact Gaussian ensembles need beta 1 or 2, got {beta}")));
        }
        if n > MAX_N {
            return Err(Error::Capability(format!("n = {n} exceeds the supported {MAX_N}")));
        }
        Ok(GaussEnsembleDims { n, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// Order of the matrix whose determinant is taken.
    pub fn n_mat(&self) -> usize {
        if self.beta == 1 {
            self.n + self.n % 2
        } else {
            self.n
        }
    }
}

/// P and Q at shapes k/2 for k = 0..=kmax and a common argument.
struct HalfShapes {
    even: IncGammaFamily,
    odd: IncGammaFamily,
}

impl HalfShapes {
    fn new(prec: u32, y: &Float, kmax: usize) -> Self {
        HalfShapes {
            even: IncGammaFamily::new(prec, false, y, kmax / 2 + 1),
            odd: IncGammaFamily::new(prec, true, y, kmax / 2 + 1),
        }
    }

    fn p(&self, k: usize) -> &Float {
        if k % 2 == 0 {
            &self.even.p[k / 2]
        } else {
            &self.odd.p[k / 2]
        }
    }

    fn q(&self, k: usize) -> &Float {
        if k % 2 == 0 {
            &self.even.q[k / 2]
        } else {
            &self.odd.q[k / 2]
        }
    }
}

fn parity(k: usize) -> i32 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Table of `1/Γ(a) ∫ t^{a-1} e^{-t} G(b, t) dt` over a = i/2, b = j/2,
/// i, j = 1..=n, for G = P on [0, y] (`lower`) or G = Q on [y, ∞).
///
/// `g[k] = G(k/2, y)`, `h[k] = 2^{-k/2} Γ(k/2) G(k/2, 2y)`, `ig[k] = 1/Γ(k/2)`.
/// Rows ascend in steps of two in b from the diagonal base G(a)²/2, or for odd
/// i over even j from the b = 0 base; the rest follows by reflection
/// K(a,b) + K(b,a) = G(a) G(b).
fn kernel_table(prec: u32, n: usize, g: &[Float], h: &[Float], ig: &[Float], lower: bool) -> Vec<Float> {
    let mut t = vec![fl(prec, 0.0); n * n];
    let at = |i: usize, j: usize| (i - 1) * n + (j - 1);
    let mut step = Float::new(prec);
    let mut ascend = |t: &mut Vec<Float>, i: usize, j0: usize, mut v: Float| {
        let mut j = j0;
        while j + 2 <= n {
            step.assign(&h[i + j] * &ig[i]);
            step *= &ig[j + 2];
            if lower {
                v -= &step;
            } else {
                v += &step;
            }
            j += 2;
            t[at(i, j)].assign(&v);
        }
    };
    for i in 1..=n {
        let mut d = Float::with_val(prec, g[i].square_ref());
        d >>= 1;
        t[at(i, i)].assign(&d);
        ascend(&mut t, i, i, d);
        if i % 2 == 1 {
            let base = if lower { g[i].clone() } else { fl(prec, 0.0) };
            ascend(&mut t, i, 0, base);
        }
    }
    let direct = |i: usize, j: usize| (i % 2 == j % 2 && j >= i) || (i % 2 == 1 && j % 2 == 0);
    for i in 1..=n {
        for j in 1..=n {
            if !direct(i, j) {
                let mut v = Float::with_val(prec, &g[i] * &g[j]);
                v -= &t[at(j, i)];
                t[at(i, j)] = v;
            }
        }
    }
    t
}

/// ψ(k, x)/2^{k/2−1} in a cancellation-free form.
fn psi_core(prec: u32, k: usize, x: f64, s: &HalfShapes) -> Float {
    if x < 0.0 {
        Float::with_val(prec, s.q(k) * parity(k + 1))
    } else if x == 0.0 {
        fl(prec, -parity(k) as f64)
    } else if k % 2 == 0 {
        Float::with_val(prec, -s.q(k))
    } else {
        Float::with_val(prec, s.p(k) + 1u32)
    }
}

fn goe_matrix_mp(n: usize, x: f64, prec: u32) -> Vec<Float> {
    let nm = n + n % 2;
    let xf = fl(prec, x);
    let x2 = Float::with_val(prec, xf.square_ref());
    let y = Float::with_val(prec, &x2 / 2u32);
    let at_y = HalfShapes::new(prec, &y, n + 1);
    let at_x2 = HalfShapes::new(prec, &x2, 2 * n + 2);
    let hg = half_gamma_table(prec, 2 * n + 2);
    let ig: Vec<Float> = hg.iter().map(|v| Float::with_val(prec, v.recip_ref())).collect();
    // 2^{-k/2} Γ(k/2) for k = 0..=2n (entry 0 unused)
    let scaled_gamma: Vec<Float> =
        (0..=2 * n).map(|k| if k == 0 { fl(prec, 0.0) } else { mul_pow2_half(prec, &hg[k], -(k as i64)) }).collect();

    let psi: Vec<Float> =
        (0..=n + 1).map(|k| if k == 0 { fl(prec, 0.0) } else { mul_pow2_half(prec, &psi_core(prec, k, x, &at_y), k as i64 - 2) }).collect();
    let unit_pair = |i: usize, j: usize| -> Float {
        // 2^{(i+j)/2 − 2}
        mul_pow2_half(prec, &fl(prec, 1.0), (i + j) as i64 - 4)
    };

    let mut b = vec![fl(prec, 0.0); n * n];
    if x < 0.0 {
        let g: Vec<Float> = (0..=n).map(|k| if k == 0 { fl(prec, 0.0) } else { at_y.q(k).clone() }).collect();
        let h: Vec<Float> = (0..=2 * n).map(|k| Float::with_val(prec, &scaled_gamma[k] * at_x2.q(k))).collect();
        let jq = kernel_table(prec, n, &g, &h, &ig, false);
        for i in 1..=n {
            for j in 1..=n {
                let mut v = Float::with_val(prec, &jq[(i - 1) * n + (j - 1)] * &unit_pair(i, j));
                v *= parity(i + j);
                b[(i - 1) * n + (j - 1)] = v;
            }
        }
    } else {
        let g: Vec<Float> = (0..=n).map(|k| if k == 0 { fl(prec, 0.0) } else { at_y.p(k).clone() }).collect();
        let h: Vec<Float> = (0..=2 * n).map(|k| Float::with_val(prec, &scaled_gamma[k] * at_x2.p(k))).collect();
        let lower = kernel_table(prec, n, &g, &h, &ig, true);
        let ones = vec![fl(prec, 1.0); n + 1];
        let at_inf = kernel_table(prec, n, &ones, &scaled_gamma, &ig, true);
        for i in 1..=n {
            for j in 1..=n {
                let idx = (i - 1) * n + (j - 1);
                // ψ(j,0) ψ(i,x) + 2^{(i+j)/2−2} [(−1)^{i+j+1} I(∞) + I(x²/2)]
                let psi_j0 = mul_pow2_half(prec, &fl(prec, -parity(j) as f64), j as i64 - 2);
                let mut v = Float::with_val(prec, &at_inf[idx] * parity(i + j + 1));
                v += &lower[idx];
                v *= unit_pair(i, j);
                v += Float::with_val(prec, &psi_j0 * &psi[i]);
                b[idx] = v;
            }
        }
    }

    let mut a = vec![fl(prec, 0.0); nm * nm];
    for i in 1..=n {
        for j in (i + 1)..=n {
            let mut v = Float::with_val(prec, &psi[i] * &psi[j]);
            let mut twice = b[(i - 1) * n + (j - 1)].clone();
            twice <<= 1;
            v -= twice;
            a[(j - 1) * nm + (i - 1)] = Float::with_val(prec, -&v);
            a[(i - 1) * nm + (j - 1)] = v;
        }
    }
    if n % 2 == 1 {
        for i in 1..=n {
            let v = Float::with_val(prec, &psi[i] * &ig[n + 1]);
            a[n * nm + (i - 1)] = Float::with_val(prec, -&v);
            a[(i - 1) * nm + n] = v;
        }
    }
    a
}

/// K′_GOE = ∏_{k ≤ n_mat} Γ(k/2) / (2^{n/2} ∏_{i ≤ n} Γ(i/2)).
fn goe_norm_mp(n: usize, prec: u32) -> Float {
    let base = if n % 2 == 1 { half_gamma_table(prec, n + 1).swap_remove(n + 1) } else { fl(prec, 1.0) };
    mul_pow2_half(prec, &base, -(n as i64))
}

fn gue_matrix_mp(n: usize, x: f64, prec: u32) -> Vec<Float> {
    let xf = fl(prec, x);
    let x2 = Float::with_val(prec, xf.square_ref());
    let s = HalfShapes::new(prec, &x2, 2 * n);
    let hg = half_gamma_table(prec, 2 * n);
    let by_m: Vec<Float> = (0..2 * n)
        .map(|m| {
            if m == 0 {
                return fl(prec, 0.0);
            }
            let bracket = if x < 0.0 {
                Float::with_val(prec, s.q(m) * parity(m + 1))
            } else if x == 0.0 {
                fl(prec, parity(m + 1) as f64)
            } else if m % 2 == 1 {
                Float::with_val(prec, s.p(m) + 1u32)
            } else {
                Float::with_val(prec, -s.q(m))
            };
            let mut v = Float::with_val(prec, &hg[m] * &bracket);
            v >>= 1;
            v
        })
        .collect();
    let mut a = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            a.push(by_m[i + j - 1].clone());
        }
    }
    a
}

/// K_GUE = 2^{n(n−1)/2} / (π^{n/2} ∏_{i ≤ n} Γ(i)).
fn gue_norm_mp(n: usize, prec: u32) -> Float {
    let mut d = Float::with_val(prec, Constant::Pi).sqrt().pow(n as u32);
    let mut g = fl(prec, 1.0);
    for i in 1..n {
        g *= i as u32;
        d *= &g;
    }
    let mut k = d.recip();
    k <<= (n * (n - 1) / 2) as u32;
    k
}

fn to_square(a: &[Float], n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |i, j| a[i * n + j].to_f64())
}

fn check_point(x: f64) -> Result<()> {
    if x.is_nan() {
        return Err(Error::domain("evaluation point is NaN"));
    }
    Ok(())
}

/// The GOE skew matrix A(x) (production path, rounded to f64).
pub fn assemble_a_goe(n: usize, x: f64) -> Result<SkewMatrix> {
    let d = GaussEnsembleDims::new(n, 1)?;
    if !x.is_finite() {
        return Err(Error::domain("matrix assembly needs a finite x"));
    }
    let prec = Precision::Auto.resolve(d.n_mat(), GOE_BITS_PER_ORDER);
    SkewMatrix::new(to_square(&goe_matrix_mp(n, x, prec), d.n_mat()))
}

/// The GUE Hankel matrix [∫_{−∞}^x t^{i+j−2} e^{−t²} dt].
pub fn assemble_a_gue(n: usize, x: f64) -> Result<SquareMatrix> {
    GaussEnsembleDims::new(n, 2)?;
    if !x.is_finite() {
        return Err(Error::domain("matrix assembly needs a finite x"));
    }
    let prec = Precision::Auto.resolve(n, GUE_BITS_PER_ORDER);
    Ok(to_square(&gue_matrix_mp(n, x, prec), n))
}

pub fn cdf_goe(n: usize, x: f64) -> Result<f64> {
    cdf_gaussian_with(n, 1, x, Precision::Auto)
}

pub fn cdf_gue(n: usize, x: f64) -> Result<f64> {
    cdf_gaussian_with(n, 2, x, Precision::Auto)
}

pub fn cdf_gaussian(n: usize, beta: u32, x: f64) -> Result<f64> {
    cdf_gaussian_with(n, beta, x, Precision::Auto)
}

pub fn cdf_gaussian_with(n: usize, beta: u32, x: f64, precision: Precision) -> Result<f64> {
    let d = GaussEnsembleDims::new(n, beta)?;
    check_point(x)?;
    if x < LEFT_CUTOFF {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let v = if beta == 1 {
        let nm = d.n_mat();
        let prec = precision.resolve(nm, GOE_BITS_PER_ORDER);
        let pf = mp::pfaffian(goe_matrix_mp(n, x, prec), nm);
        mp::scaled_pfaffian(&goe_norm_mp(n, prec), pf)?
    } else {
        let prec = precision.resolve(n, GUE_BITS_PER_ORDER);
        let det = mp::det(gue_matrix_mp(n, x, prec), n);
        let v = Float::with_val(prec, &det * &gue_norm_mp(n, prec)).to_f64();
        if v < -1e-9 {
            return Err(Error::Numerical(format!("GUE determinant came out negative ({v:e})")));
        }
        v
    };
    mp::clamp_unit(v)
}

/// Central difference of the CDF with step max(1e-5, 1e-5·|x|).
pub fn pdf_gaussian(n: usize, x: f64, beta: u32) -> Result<f64> {
    check_point(x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    let h = (1e-5 * x.abs()).max(1e-5);
    let d = (cdf_gaussian(n, beta, x + h)? - cdf_gaussian(n, beta, x - h)?) / (2.0 * h);
    Ok(d.max(0.0))
}

pub fn quantile_gaussian(n: usize, p: f64, beta: u32) -> Result<f64> {
    quantile_gaussian_tol(n, p, beta, QUANTILE_TOL)
}

pub(crate) fn quantile_gaussian_tol(n: usize, p: f64, beta: u32, tol: Tolerance) -> Result<f64> {
    GaussEnsembleDims::new(n, beta)?;
    let (start, step) = match centering_gaussian(n, beta) {
        Ok(c) => (c.mu_c, c.sigma_c),
        Err(_) => (0.0, std::f64::consts::FRAC_1_SQRT_2),
    };
    let br = Bracketing { start, step, support_min: None };
    invert_cdf(|x| cdf_gaussian(n, beta, x), p, br, tol)
}

/// GOE matrix assembled from the double-precision ψ and I_G kernels, which
/// reduce by descent in the second index rather than the half-line
/// identity used in production.
#[cfg(feature = "reference")]
pub mod reference {
    use super::*;
    use crate::specfun::{kernel_ig, ln_gamma, psi};

    pub fn assemble_a_goe_kernel(n: usize, x: f64) -> Result<SkewMatrix> {
        let nm = n + n % 2;
        let mut m = SquareMatrix::zeros(nm);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let v = kernel_ig(j as u32, i as u32, x)? - kernel_ig(i as u32, j as u32, x)?;
                m.set(i - 1, j - 1, v);
                m.set(j - 1, i - 1, -v);
            }
        }
        if n % 2 == 1 {
            let inv = (-ln_gamma(0.5 * (n + 1) as f64)).exp();
            for i in 1..=n {
                let v = psi(i as u32, x)? * inv;
                m.set(i - 1, n, v);
                m.set(n, i - 1, -v);
            }
        }
        SkewMatrix::new(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gue_entry_at_origin() {
        let a = assemble_a_gue(3, 0.0).unwrap();
        assert!((a.get(0, 0) - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
        // ∫_{−∞}^0 t e^{−t²} dt
        assert!((a.get(0, 1) + 0.5).abs() < 1e-16);
    }

    #[test]
    fn gue_entries_depend_on_index_sum() {
        let a = assemble_a_gue(4, 0.7).unwrap();
        assert_eq!(a.get(0, 3), a.get(3, 0));
        assert_eq!(a.get(1, 2), a.get(0, 3));
    }

    #[test]
    fn far_left_is_zero() {
        for n in [2, 5] {
            assert!(cdf_goe(n, -40.0).unwrap() <= 1e-12);
            assert!(cdf_gue(n, -40.0).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn goe_median_single_entry() {
        assert!(quantile_gaussian(1, 0.5, 1).unwrap().abs() < 1e-9);
    }

    #[test]
    fn goe_norm_small_cases() {
        assert!((goe_norm_mp(2, 128).to_f64() - 0.5).abs() < 1e-16);
        // Γ(1)/2^{1/2}
        assert!((goe_norm_mp(1, 128).to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(GaussEnsembleDims::new(0, 1).is_err());
        assert!(GaussEnsembleDims::new(3, 4).is_err());
        assert!(matches!(cdf_goe(1001, 0.0), Err(Error::Capability(_))));
    }
}
