//! Log-domain determinants of dense real matrices, and the square root of the
//! determinant of an even skew-symmetric matrix (the absolute Pfaffian).

use std::ops::Mul;

use crate::error::{Error, Result};

/// A real number stored as a sign and the logarithm of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    /// −1, 0 or +1. Zero marks the exact value 0 and then `log_abs` is −∞.
    pub sign: i8,
    pub log_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { sign: 0, log_abs: f64::NEG_INFINITY };
    pub const ONE: LogValue = LogValue { sign: 1, log_abs: 0.0 };

    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue { sign: sign.signum(), log_abs }
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            LogValue { sign: if v > 0.0 { 1 } else { -1 }, log_abs: v.abs().ln() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The represented value; overflows to ±∞ and underflows to ±0 like `exp`.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.log_abs.exp(),
        }
    }

    pub fn abs(&self) -> Self {
        LogValue::new(self.sign.abs(), self.log_abs)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.sign < 0 {
            return Err(Error::Numerical("square root of a negative LogValue".into()));
        }
        Ok(LogValue::new(self.sign, 0.5 * self.log_abs))
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue::new(self.sign * rhs.sign, self.log_abs + rhs.log_abs)
    }
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(order: usize) -> Self {
        SquareMatrix { order, data: vec![0.0; order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::Input("rows do not form a square matrix".into()));
        }
        Ok(SquareMatrix { order, data: rows.concat() })
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in 0..order {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.order, |i, j| self.get(j, i))
    }

    fn abs_companion(&self) -> Self {
        SquareMatrix { order: self.order, data: self.data.iter().map(|v| v.abs()).collect() }
    }
}

/// Even-order real antisymmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix(SquareMatrix);

impl SkewMatrix {
    /// Wraps `m` after checking even order, a zero diagonal and
    /// `m[i][j] = −m[j][i]` to within `1e-12` relative to the largest entry.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let n = m.order();
        if n == 0 || n % 2 != 0 {
            return Err(Error::Input(format!("skew matrix order must be even and positive, got {n}")));
        }
        let scale = m.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::Input(format!("nonzero diagonal entry at {i}")));
            }
            for j in (i + 1)..n {
                if (m.get(i, j) + m.get(j, i)).abs() > 1e-12 * scale {
                    return Err(Error::Input(format!("entries ({i},{j}) and ({j},{i}) are not antisymmetric")));
                }
            }
        }
        Ok(SkewMatrix(m))
    }

    /// Builds `U − Uᵀ` from the strict upper triangle produced by `upper(i, j)`, i < j.
    pub fn from_upper(order: usize, upper: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut m = SquareMatrix::zeros(order);
        for i in 0..order {
            for j in (i + 1)..order {
                let v = upper(i, j);
                m.set(i, j, v);
                m.set(j, i, -v);
            }
        }
        Self::new(m)
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_square(&self) -> &SquareMatrix {
        &self.0
    }

    /// Multiplies row `k` and column `k` by `c`, which keeps the matrix skew.
    pub fn scale_pair(&mut self, k: usize, c: f64) {
        let n = self.order();
        for j in 0..n {
            let v = self.0.get(k, j);
            self.0.set(k, j, v * c);
            let w = self.0.get(j, k);
            self.0.set(j, k, w * c);
        }
    }
}

/// Sign and ln|det| by Gaussian elimination with partial row pivoting.
pub fn log_det(matrix: &SquareMatrix) -> LogValue {
    let n = matrix.order();
    if n == 0 {
        return LogValue::ONE;
    }
    let mut a = matrix.data.clone();
    let mut sign: i8 = 1;
    let mut log_abs = 0.0;
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|r| (r, a[r * n + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 || pmax.is_nan() {
            return LogValue::ZERO;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_abs += pivot.abs().ln();
        for r in (k + 1)..n {
            let f = a[r * n + k] / pivot;
            if f == 0.0 {
                continue;
            }
            for c in (k + 1)..n {
                a[r * n + c] -= f * a[k * n + c];
            }
        }
    }
    LogValue::new(sign, log_abs)
}

/// Natural-log margin below the absolute-value companion determinant under
/// which a negative computed determinant is read as rounding noise around 0.
pub const NOISE_FLOOR_NATS: f64 = 30.0;

/// |Pf(A)| = √det A as a LogValue with sign +1, or 0 when the determinant is
/// zero or negative within the noise floor.
pub fn sqrt_det_skew(matrix: &SkewMatrix) -> Result<LogValue> {
    let det = log_det(matrix.as_square());
    match det.sign {
        0 => Ok(LogValue::ZERO),
        1 => det.sqrt(),
        _ => {
            let companion = log_det(&matrix.as_square().abs_companion());
            let reference = if companion.is_zero() {
                hadamard_log_bound(matrix.as_square())
            } else {
                companion.log_abs
            };
            if det.log_abs < reference - NOISE_FLOOR_NATS {
                Ok(LogValue::ZERO)
            } else {
                Err(Error::Numerical(format!(
                    "skew determinant came out negative (ln|det| = {:.6}) above the noise floor",
                    det.log_abs
                )))
            }
        }
    }
}

/// ln of the Hadamard bound ∏ᵢ ‖row i‖₂ ≥ |det|.
fn hadamard_log_bound(m: &SquareMatrix) -> f64 {
    let n = m.order();
    (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).powi(2)).sum::<f64>().sqrt().ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_determinant() {
        assert_eq!(log_det(&SquareMatrix::identity(5)), LogValue::ONE);
    }

    #[test]
    fn two_by_two_skew() {
        let c = -3.5f64;
        let m = SkewMatrix::from_upper(2, |_, _| c).unwrap();
        let d = log_det(m.as_square());
        assert_eq!(d.sign, 1);
        assert!((d.log_abs - 2.0 * c.abs().ln()).abs() < 1e-15);
        let pf = SkewMatrix::from_upper(2, |_, _| 0.25).unwrap();
        assert!((sqrt_det_skew(&pf).unwrap().to_f64() - 0.25).abs() < 1e-16);
    }

    #[test]
    fn block_diagonal_pfaffian() {
        let m = SkewMatrix::from_upper(4, |i, j| if (i, j) == (0, 1) || (i, j) == (2, 3) { 1.0 } else { 0.0 })
            .unwrap();
        assert!((sqrt_det_skew(&m).unwrap().to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_gives_zero() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(log_det(&m).is_zero());
    }

    #[test]
    fn rejects_odd_or_asymmetric() {
        assert!(SkewMatrix::new(SquareMatrix::zeros(3)).is_err());
        let m = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(SkewMatrix::new(m), Err(Error::Input(_))));
    }

    #[test]
    fn log_value_product() {
        let a = LogValue::from_f64(-2.0);
        let b = LogValue::from_f64(3.0);
        assert!(((a * b).to_f64() + 6.0).abs() < 1e-14);
        assert!((a * LogValue::ZERO).is_zero());
    }

    #[test]
    fn negative_noise_clamps_to_zero() {
        // Pf = a12·a34 − a13·a24 + a14·a23 = 0, so elimination returns
        // rounding noise of either sign.
        let upper = [[0.0, 0.1, 0.2, 0.3], [0.0, 0.0, 0.2, 0.4], [0.0, 0.0, 0.0, 0.2]];
        let m = SkewMatrix::from_upper(4, |i, j| upper[i][j]).unwrap();
        let v = sqrt_det_skew(&m).unwrap();
        assert!(v.is_zero() || v.log_abs < -15.0);
    }
}
