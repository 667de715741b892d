//! Multiprecision building blocks for the exact distributions.
//!
//! The determinants behind the exact CDFs cancel roughly linearly many bits
//! in the matrix order, so their entries are assembled and eliminated in
//! MPFR arithmetic at a working precision that grows with the order.

use std::cmp::Ordering;

use rug::float::Constant;
use rug::ops::NegAssign;
use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Working precision of the exact CDF evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Grows linearly with the matrix order; calibrated per ensemble.
    #[default]
    Auto,
    /// Fixed mantissa width in bits (clamped to at least 64).
    Bits(u32),
}

impl Precision {
    pub(crate) fn resolve(self, order: usize, bits_per_order: f64) -> u32 {
        match self {
            Precision::Auto => 64 + (bits_per_order * order as f64).ceil() as u32,
            Precision::Bits(b) => b.max(64),
        }
    }
}

pub(crate) fn fl(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

/// `v · 2^{e/2}` for an integer `e`, exact up to one rounding of √2.
pub(crate) fn mul_pow2_half(prec: u32, v: &Float, e: i64) -> Float {
    let mut out = Float::with_val(prec, v);
    if e.rem_euclid(2) == 1 {
        out *= Float::with_val(prec, 2).sqrt();
    }
    let whole = e.div_euclid(2);
    if whole >= 0 {
        out <<= whole as u32;
    } else {
        out >>= (-whole) as u32;
    }
    out
}

/// Γ(start + k) for k = 0..count; `start` must be a positive multiple of ½.
pub(crate) fn gamma_ladder(prec: u32, start: f64, count: usize) -> Vec<Float> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut g = half_integer_gamma(prec, start);
    for k in 0..count {
        if k > 0 {
            g *= start + (k - 1) as f64;
        }
        out.push(g.clone());
    }
    out
}

/// Γ(a) for a positive multiple of ½, from a factorial or from
/// √π ∏ (j + ½).
fn half_integer_gamma(prec: u32, a: f64) -> Float {
    let twice = 2.0 * a;
    debug_assert!(twice >= 1.0 && twice.fract() == 0.0, "gamma argument {a} is not a positive multiple of 1/2");
    let twice = twice as u32;
    if twice % 2 == 0 {
        Float::with_val(prec, Float::factorial(twice / 2 - 1))
    } else {
        let mut g = Float::with_val(prec, Constant::Pi).sqrt();
        for j in 0..twice / 2 {
            g *= j as f64 + 0.5;
        }
        g
    }
}

/// ∏ Γ(k/2) over k = lo..=hi (k ≥ 1).
pub(crate) fn gamma_half_product(prec: u32, lo: u64, hi: u64) -> Float {
    let mut prod = fl(prec, 1.0);
    for first in [lo, lo + 1] {
        if first > hi {
            continue;
        }
        let count = ((hi - first) / 2 + 1) as usize;
        for g in gamma_ladder(prec, 0.5 * first as f64, count) {
            prod *= g;
        }
    }
    prod
}

/// Γ(k/2) for k = 0..=kmax, built upward from Γ(½) = √π and Γ(1) = 1.
/// Entry 0 is unused and holds +∞.
pub(crate) fn half_gamma_table(prec: u32, kmax: usize) -> Vec<Float> {
    let mut t = Vec::with_capacity(kmax + 1);
    t.push(Float::with_val(prec, f64::INFINITY));
    for k in 1..=kmax {
        let v = match k {
            1 => Float::with_val(prec, Constant::Pi).sqrt(),
            2 => fl(prec, 1.0),
            _ => Float::with_val(prec, &t[k - 2] * (0.5 * (k - 2) as f64)),
        };
        t.push(v);
    }
    t
}

/// P(a₀ + m, y), Q(a₀ + m, y) and the Poisson-type terms
/// t_m = e^{-y} y^{a₀+m} / Γ(a₀+m+1) for m = 0..=max_m, a₀ ∈ {0, ½}.
///
/// P(a₀+m+1) = P(a₀+m) − t_m links consecutive shapes. Q is accumulated
/// upward from Q(0) = 0 or Q(½) = erfc √y; P is taken as 1 − Q where Q ≤ ½
/// and otherwise as the convergent tail Σ_{k≥m} t_k, so that both keep full
/// relative accuracy.
pub(crate) struct IncGammaFamily {
    pub p: Vec<Float>,
    pub q: Vec<Float>,
    pub t: Vec<Float>,
}

impl IncGammaFamily {
    pub fn new(prec: u32, half: bool, y: &Float, max_m: usize) -> Self {
        let a0 = if half { 0.5 } else { 0.0 };
        let len = max_m + 1;
        if y.is_zero() {
            let p: Vec<Float> = (0..len).map(|m| fl(prec, if a0 + m as f64 == 0.0 { 1.0 } else { 0.0 })).collect();
            let q = p.iter().map(|v| Float::with_val(prec, 1 - v)).collect();
            let t = p.clone();
            return IncGammaFamily { p, q, t };
        }
        let mut t0 = Float::with_val(prec, -y).exp();
        if half {
            // y^{1/2} / Γ(3/2) = 2 √y / √π
            let s = Float::with_val(prec, y.sqrt_ref());
            t0 *= s;
            t0 <<= 1;
            t0 /= Float::with_val(prec, Constant::Pi).sqrt();
        }
        let mut t = Vec::with_capacity(len);
        t.push(t0);
        for m in 1..len {
            let mut next = Float::with_val(prec, &t[m - 1] * y);
            next /= a0 + m as f64;
            t.push(next);
        }
        let mut q = Vec::with_capacity(len);
        q.push(if half { Float::with_val(prec, y.sqrt_ref()).erfc() } else { fl(prec, 0.0) });
        for m in 1..len {
            q.push(Float::with_val(prec, &q[m - 1] + &t[m - 1]));
        }
        let half_f = fl(prec, 0.5);
        let needs_tail = q.iter().any(|v| *v > half_f);
        let mut p: Vec<Float> = q.iter().map(|v| Float::with_val(prec, 1 - v)).collect();
        if needs_tail {
            let tail = Self::tail_sums(prec, a0, y, &t);
            for m in 0..len {
                if q[m] > half_f {
                    p[m].assign(&tail[m]);
                }
            }
        }
        IncGammaFamily { p, q, t }
    }

    /// Σ_{k≥m} t_k for m < t.len(), extending the terms until they fall
    /// below the working precision relative to the last requested term.
    fn tail_sums(prec: u32, a0: f64, y: &Float, t: &[Float]) -> Vec<Float> {
        let len = t.len();
        let yf = y.to_f64();
        let mut beyond = fl(prec, 0.0);
        let mut term = t[len - 1].clone();
        let mut threshold = t[len - 1].clone();
        threshold >>= prec + 16;
        let mut k = len - 1;
        loop {
            term *= y;
            k += 1;
            term /= a0 + k as f64;
            beyond += &term;
            if (k as f64) > yf && term < threshold {
                break;
            }
            if term.is_zero() {
                break;
            }
        }
        let mut out = vec![fl(prec, 0.0); len];
        let mut acc = beyond;
        for m in (0..len).rev() {
            acc += &t[m];
            out[m].assign(&acc);
        }
        out
    }
}

/// Determinant by Gaussian elimination with partial pivoting; `a` is the
/// row-major n × n matrix and is consumed.
pub(crate) fn det(mut a: Vec<Float>, n: usize) -> Float {
    let prec = a.first().map(|v| v.prec()).unwrap_or(64);
    let mut det = fl(prec, 1.0);
    let mut tmp = Float::new(prec);
    for k in 0..n {
        let mut piv = k;
        for r in (k + 1)..n {
            if a[r * n + k].cmp_abs(&a[piv * n + k]) == Some(Ordering::Greater) {
                piv = r;
            }
        }
        if a[piv * n + k].is_zero() {
            return fl(prec, 0.0);
        }
        if piv != k {
            for c in k..n {
                a.swap(k * n + c, piv * n + c);
            }
            det.neg_assign();
        }
        det *= &a[k * n + k];
        let (top, rest) = a.split_at_mut((k + 1) * n);
        let pivot_row = &top[k * n..(k + 1) * n];
        for r in 0..(n - k - 1) {
            let row = &mut rest[r * n..(r + 1) * n];
            if row[k].is_zero() {
                continue;
            }
            let mut f = Float::with_val(prec, &row[k] / &pivot_row[k]);
            f.neg_assign();
            for c in (k + 1)..n {
                tmp.assign(&f * &pivot_row[c]);
                row[c] += &tmp;
            }
        }
    }
    det
}

/// Pfaffian of a skew-symmetric matrix by pivoted skew Gaussian elimination
/// (Parlett–Reid pattern). Only the strict upper triangle of the row-major
/// `a` is read or updated, which halves the work of an LU determinant.
pub(crate) fn pfaffian(mut a: Vec<Float>, n: usize) -> Float {
    let prec = a.first().map(|v| v.prec()).unwrap_or(64);
    if n % 2 == 1 {
        return fl(prec, 0.0);
    }
    let at = |i: usize, j: usize| i * n + j;
    let mut pf = fl(prec, 1.0);
    let mut tmp = Float::new(prec);
    let mut tau: Vec<Float> = vec![Float::new(prec); n];
    let mut u: Vec<Float> = vec![Float::new(prec); n];
    for k in (0..n.saturating_sub(1)).step_by(2) {
        let p = k + 1;
        let mut q = p;
        for r in (p + 1)..n {
            if a[at(k, r)].cmp_abs(&a[at(k, q)]) == Some(Ordering::Greater) {
                q = r;
            }
        }
        if a[at(k, q)].is_zero() {
            return fl(prec, 0.0);
        }
        if q != p {
            // Exchange index p with q; with entry(x, y) = −a[y][x] for x > y,
            // the two stored slots swap and change sign when p < m < q.
            for m in k..n {
                if m == p || m == q {
                    continue;
                }
                let (s1, s2) = (at(m.min(p), m.max(p)), at(m.min(q), m.max(q)));
                a.swap(s1, s2);
                if p < m && m < q {
                    a[s1].neg_assign();
                    a[s2].neg_assign();
                }
            }
            a[at(p, q)].neg_assign();
            pf.neg_assign();
        }
        pf *= &a[at(k, p)];
        if k + 2 < n {
            for r in (k + 2)..n {
                tau[r].assign(&a[at(k, r)] / &a[at(k, p)]);
                // entry(r, p) = −a[p][r]
                u[r].assign(-&a[at(p, r)]);
            }
            for i in (k + 2)..n {
                for j in (i + 1)..n {
                    tmp.assign(&tau[i] * &u[j]);
                    a[at(i, j)] += &tmp;
                    tmp.assign(&u[i] * &tau[j]);
                    a[at(i, j)] -= &tmp;
                }
            }
        }
    }
    pf
}

/// K · Pf for a skew matrix whose Pfaffian is nonnegative in theory; a
/// negative result is read as rounding noise when K·|Pf| ≤ 1e-9.
pub(crate) fn scaled_pfaffian(k: &Float, pf: Float) -> Result<f64> {
    let v = Float::with_val(k.prec(), &pf * k).to_f64();
    if v < 0.0 {
        if v >= -1e-9 {
            log::debug!("negative Pfaffian of size {v:e} clamped to 0");
            return Ok(0.0);
        }
        return Err(Error::Numerical(format!("Pfaffian came out negative with K·Pf = {v:e}")));
    }
    Ok(v)
}

/// Clamps an evaluated CDF to [0, 1], logging the size of any correction.
pub(crate) fn clamp_unit(v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::Numerical(format!("CDF evaluated to {v}")));
    }
    // Adding +0 maps −0 to +0.
    let c = v.clamp(0.0, 1.0) + 0.0;
    let moved = (c - v).abs();
    if moved > 1e-9 {
        log::warn!("CDF value {v:e} clamped to {c}");
    } else if moved > 0.0 {
        log::debug!("CDF value {v:e} clamped to {c}");
    }
    Ok(c)
}
