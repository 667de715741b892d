//! Seeded Monte Carlo sampling of λ₁ and Kolmogorov–Smirnov comparison
//! against a reference CDF.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::skewlin::SquareMatrix;

/// Entrywise symmetry tolerance, relative to max(1, |a_ij|, |a_ji|).
const SYMMETRY_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm is below this fraction
/// of the full Frobenius norm.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub ensemble: EnsembleSpec,
}

impl McConfig {
    pub fn new(seed: u64, n_samples: usize, ensemble: EnsembleSpec) -> Result<Self> {
        let c = McConfig { seed, n_samples, ensemble };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        self.ensemble.validate().map_err(|e| Error::Config(e.to_string()))
    }
}

/// Right-continuous step function built from a sorted sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted_values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Input("empty sample".into()));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::Input("sample contains NaN".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted_values: samples })
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }

    /// #{samples ≤ x} / n.
    pub fn evaluate(&self, x: f64) -> f64 {
        let rank = self.sorted_values.partition_point(|&v| v <= x);
        rank as f64 / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.sorted_values.iter().sum::<f64>() / self.len() as f64
    }
}

/// Normal variates by Box–Muller on one ChaCha8 substream.
struct Normals {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Normals {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Normals { rng, spare: None }
    }

    fn standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    fn with_var(&mut self, var: f64) -> f64 {
        var.sqrt() * self.standard()
    }
}

/// λ₁ of the `index`-th matrix drawn under `seed`. Each index owns its own
/// substream, so any partition of the indices reproduces the same values.
pub fn draw_largest(ensemble: &EnsembleSpec, seed: u64, index: u64) -> Result<f64> {
    let mut g = Normals::new(seed, index);
    match *ensemble {
        EnsembleSpec::WishartReal { n_min, n_max } => {
            let x: Vec<f64> = (0..n_min * n_max).map(|_| g.standard()).collect();
            let w = SquareMatrix::from_fn(n_min, |i, j| {
                (0..n_max).map(|k| x[i * n_max + k] * x[j * n_max + k]).sum()
            });
            largest_eig_sym(&w)
        }
        EnsembleSpec::WishartComplex { n_min, n_max } => {
            let mut xr = vec![0.0; n_min * n_max];
            let mut xi = vec![0.0; n_min * n_max];
            for k in 0..n_min * n_max {
                xr[k] = g.with_var(0.5);
                xi[k] = g.with_var(0.5);
            }
            let row = |v: &[f64], i: usize, k: usize| v[i * n_max + k];
            let re = SquareMatrix::from_fn(n_min, |i, j| {
                (0..n_max).map(|k| row(&xr, i, k) * row(&xr, j, k) + row(&xi, i, k) * row(&xi, j, k)).sum()
            });
            let im = SquareMatrix::from_fn(n_min, |i, j| {
                (0..n_max).map(|k| row(&xi, i, k) * row(&xr, j, k) - row(&xr, i, k) * row(&xi, j, k)).sum()
            });
            largest_eig_herm(&re, &im)
        }
        EnsembleSpec::Goe { n } => {
            let mut a = SquareMatrix::zeros(n);
            for i in 0..n {
                a.set(i, i, g.standard());
                for j in i + 1..n {
                    let v = g.with_var(0.5);
                    a.set(i, j, v);
                    a.set(j, i, v);
                }
            }
            largest_eig_sym(&a)
        }
        EnsembleSpec::Gue { n } => {
            let mut re = SquareMatrix::zeros(n);
            let mut im = SquareMatrix::zeros(n);
            for i in 0..n {
                re.set(i, i, g.with_var(0.5));
                for j in i + 1..n {
                    let (u, v) = (g.with_var(0.25), g.with_var(0.25));
                    re.set(i, j, u);
                    re.set(j, i, u);
                    im.set(i, j, v);
                    im.set(j, i, -v);
                }
            }
            largest_eig_herm(&re, &im)
        }
    }
}

pub fn sample_largest(config: &McConfig) -> Result<EmpiricalCdf> {
    config.validate()?;
    let samples = (0..config.n_samples as u64)
        .map(|i| draw_largest(&config.ensemble, config.seed, i))
        .collect::<Result<Vec<_>>>()?;
    EmpiricalCdf::from_samples(samples)
}

pub fn largest_eig_sym(matrix: &SquareMatrix) -> Result<f64> {
    let n = matrix.order();
    if n == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (matrix.get(i, j), matrix.get(j, i));
            if !u.is_finite() {
                return Err(Error::Input(format!("non-finite entry at ({i}, {j})")));
            }
            if (u - v).abs() > SYMMETRY_TOL * u.abs().max(v.abs()).max(1.0) {
                return Err(Error::Input(format!("matrix is not symmetric at ({i}, {j}): {u} vs {v}")));
            }
            a[i * n + j] = 0.5 * (u + v);
        }
    }
    jacobi_eigenvalues(&mut a, n)?;
    Ok((0..n).map(|i| a[i * n + i]).fold(f64::NEG_INFINITY, f64::max))
}

/// λ₁ of H = re + i·im via the real embedding [[re, −im], [im, re]], whose
/// spectrum is that of H with every eigenvalue doubled.
pub fn largest_eig_herm(re: &SquareMatrix, im: &SquareMatrix) -> Result<f64> {
    let n = re.order();
    if im.order() != n {
        return Err(Error::Input(format!("real part is {n}x{n} but imaginary part is {0}x{0}", im.order())));
    }
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (im.get(i, j), -im.get(j, i));
            if (u - v).abs() > SYMMETRY_TOL * u.abs().max(v.abs()).max(1.0) {
                return Err(Error::Input(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    let emb = SquareMatrix::from_fn(2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (r, c) = (i % n, j % n);
        match (bi, bj) {
            (0, 0) | (1, 1) => re.get(r, c),
            (0, 1) => -0.5 * (im.get(r, c) - im.get(c, r)),
            _ => 0.5 * (im.get(r, c) - im.get(c, r)),
        }
    });
    largest_eig_sym(&emb)
}

/// Cyclic Jacobi on a dense symmetric row-major matrix; on return the
/// diagonal holds the eigenvalues.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Result<()> {
    let frob = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = JACOBI_TOL * frob;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(a) <= target {
            return Ok(());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + tau.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    if off(a) <= target {
        Ok(())
    } else {
        Err(Error::Numerical(format!("Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")))
    }
}

/// sup_i max(|i/n − F(x₍ᵢ₎)|, |(i−1)/n − F(x₍ᵢ₎)|).
pub fn ks_statistic(empirical: &EmpiricalCdf, cdf: impl Fn(f64) -> f64) -> f64 {
    let values: Vec<f64> = empirical.sorted_values().iter().map(|&x| cdf(x)).collect();
    ks_from_values(&values)
}

/// KS statistic from reference CDF values already evaluated at the sorted
/// sample points, in order.
pub fn ks_statistic_at(empirical: &EmpiricalCdf, cdf_values: &[f64]) -> Result<f64> {
    if cdf_values.len() != empirical.len() {
        return Err(Error::Input(format!(
            "{} CDF values for {} sample points",
            cdf_values.len(),
            empirical.len()
        )));
    }
    Ok(ks_from_values(cdf_values))
}

fn ks_from_values(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let i = (k + 1) as f64;
            (i / n - f).abs().max(((i - 1.0) / n - f).abs())
        })
        .fold(0.0, f64::max)
}
