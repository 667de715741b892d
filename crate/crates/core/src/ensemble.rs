use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, GaussEnsembleDims};
use crate::mp::Precision;
use crate::roots::Tolerance;
use crate::tw_gamma;
use crate::wishart::{self, WishartDims, WishartKind};

/// A random-matrix ensemble and its dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleSpec {
    WishartReal { n_min: usize, n_max: usize },
    WishartComplex { n_min: usize, n_max: usize },
    Goe { n: usize },
    Gue { n: usize },
}

/// Ensemble family without dimensions, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    WishartReal,
    WishartComplex,
    Goe,
    Gue,
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::WishartReal => "wishart-real",
            EnsembleKind::WishartComplex => "wishart-complex",
            EnsembleKind::Goe => "goe",
            EnsembleKind::Gue => "gue",
        }
    }

    pub fn is_wishart(&self) -> bool {
        matches!(self, EnsembleKind::WishartReal | EnsembleKind::WishartComplex)
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wishart-real" => Ok(EnsembleKind::WishartReal),
            "wishart-complex" => Ok(EnsembleKind::WishartComplex),
            "goe" => Ok(EnsembleKind::Goe),
            "gue" => Ok(EnsembleKind::Gue),
            _ => Err(Error::Config(format!("unknown ensemble '{s}'"))),
        }
    }
}

impl EnsembleSpec {
    pub fn wishart_real(n_min: usize, n_max: usize) -> Result<Self> {
        let d = WishartDims::new(n_min, n_max)?;
        Ok(EnsembleSpec::WishartReal { n_min: d.n_min(), n_max: d.n_max() })
    }

    pub fn wishart_complex(n_min: usize, n_max: usize) -> Result<Self> {
        let d = WishartDims::new(n_min, n_max)?;
        Ok(EnsembleSpec::WishartComplex { n_min: d.n_min(), n_max: d.n_max() })
    }

    pub fn goe(n: usize) -> Result<Self> {
        let s = EnsembleSpec::Goe { n };
        s.validate()?;
        Ok(s)
    }

    pub fn gue(n: usize) -> Result<Self> {
        let s = EnsembleSpec::Gue { n };
        s.validate()?;
        Ok(s)
    }

    /// Inverse of [`dims_label`](Self::dims_label).
    pub fn from_label(kind: EnsembleKind, label: &str) -> Result<Self> {
        let num = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad dimension '{s}' in '{label}'")))
        };
        match kind {
            EnsembleKind::WishartReal | EnsembleKind::WishartComplex => {
                let (a, b) = label
                    .split_once('x')
                    .ok_or_else(|| Error::Config(format!("Wishart dims must look like 3x5, got '{label}'")))?;
                if kind == EnsembleKind::WishartReal {
                    Self::wishart_real(num(a)?, num(b)?)
                } else {
                    Self::wishart_complex(num(a)?, num(b)?)
                }
            }
            EnsembleKind::Goe => Self::goe(num(label)?),
            EnsembleKind::Gue => Self::gue(num(label)?),
        }
    }

    pub fn kind(&self) -> EnsembleKind {
        match self {
            EnsembleSpec::WishartReal { .. } => EnsembleKind::WishartReal,
            EnsembleSpec::WishartComplex { .. } => EnsembleKind::WishartComplex,
            EnsembleSpec::Goe { .. } => EnsembleKind::Goe,
            EnsembleSpec::Gue { .. } => EnsembleKind::Gue,
        }
    }

    /// Dyson index: 1 for real ensembles, 2 for complex ones.
    pub fn beta(&self) -> u32 {
        match self {
            EnsembleSpec::WishartReal { .. } | EnsembleSpec::Goe { .. } => 1,
            EnsembleSpec::WishartComplex { .. } | EnsembleSpec::Gue { .. } => 2,
        }
    }

    /// Order of the random matrix whose largest eigenvalue is studied.
    pub fn order(&self) -> usize {
        match *self {
            EnsembleSpec::WishartReal { n_min, .. } | EnsembleSpec::WishartComplex { n_min, .. } => n_min,
            EnsembleSpec::Goe { n } | EnsembleSpec::Gue { n } => n,
        }
    }

    /// Short dimension label, `n_min x n_max` or `n`.
    pub fn dims_label(&self) -> String {
        match *self {
            EnsembleSpec::WishartReal { n_min, n_max } | EnsembleSpec::WishartComplex { n_min, n_max } => {
                format!("{n_min}x{n_max}")
            }
            EnsembleSpec::Goe { n } | EnsembleSpec::Gue { n } => n.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EnsembleSpec::WishartReal { n_min, n_max } | EnsembleSpec::WishartComplex { n_min, n_max } => {
                WishartDims::new(n_min, n_max).map(|_| ())
            }
            EnsembleSpec::Goe { n } | EnsembleSpec::Gue { n } => {
                if n < 1 {
                    Err(Error::domain("matrix order must be at least 1"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Left end of the support of λ₁, if bounded.
    pub fn support_min(&self) -> Option<f64> {
        match self {
            EnsembleSpec::WishartReal { .. } | EnsembleSpec::WishartComplex { .. } => Some(0.0),
            _ => None,
        }
    }

    fn wishart(&self) -> Option<(WishartDims, WishartKind)> {
        match *self {
            EnsembleSpec::WishartReal { n_min, n_max } => Some((WishartDims::new(n_min, n_max).ok()?, WishartKind::Real)),
            EnsembleSpec::WishartComplex { n_min, n_max } => {
                Some((WishartDims::new(n_min, n_max).ok()?, WishartKind::Complex))
            }
            _ => None,
        }
    }

    pub fn exact_cdf(&self, x: f64) -> Result<f64> {
        self.exact_cdf_with(x, Precision::Auto)
    }

    pub fn exact_cdf_with(&self, x: f64, precision: Precision) -> Result<f64> {
        self.validate()?;
        match (self.wishart(), *self) {
            (Some((d, k)), _) => wishart::cdf_wishart_with(&d, k, x, precision),
            (None, EnsembleSpec::Goe { n }) => gaussian::cdf_gaussian_with(n, 1, x, precision),
            (None, EnsembleSpec::Gue { n }) => gaussian::cdf_gaussian_with(n, 2, x, precision),
            _ => unreachable!("validated Wishart dims"),
        }
    }

    pub fn exact_pdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        match (self.wishart(), *self) {
            (Some((d, k)), _) => wishart::pdf_wishart(&d, k, x),
            (None, EnsembleSpec::Goe { n }) => gaussian::pdf_gaussian(n, x, 1),
            (None, EnsembleSpec::Gue { n }) => gaussian::pdf_gaussian(n, x, 2),
            _ => unreachable!("validated Wishart dims"),
        }
    }

    pub fn exact_quantile(&self, p: f64) -> Result<f64> {
        self.exact_quantile_tol(p, crate::roots::QUANTILE_TOL)
    }

    /// Quantile located only to within `x_rel` relative width, for grid ends.
    pub fn exact_quantile_coarse(&self, p: f64, x_rel: f64) -> Result<f64> {
        self.exact_quantile_tol(p, Tolerance { cdf: 1.0, x_rel })
    }

    fn exact_quantile_tol(&self, p: f64, tol: Tolerance) -> Result<f64> {
        self.validate()?;
        match (self.wishart(), *self) {
            (Some((d, k)), _) => wishart::quantile_wishart_tol(&d, k, p, tol),
            (None, EnsembleSpec::Goe { n }) => gaussian::quantile_gaussian_tol(n, p, 1, tol),
            (None, EnsembleSpec::Gue { n }) => gaussian::quantile_gaussian_tol(n, p, 2, tol),
            _ => unreachable!("validated Wishart dims"),
        }
    }

    pub fn approx_cdf(&self, x: f64) -> Result<f64> {
        tw_gamma::approx_cdf_largest(self, x)
    }

    pub fn approx_pdf(&self, x: f64) -> Result<f64> {
        tw_gamma::approx_pdf_largest(self, x)
    }

    pub fn approx_quantile(&self, p: f64) -> Result<f64> {
        tw_gamma::approx_quantile_largest(self, p)
    }

    /// Dims used by the exact Gaussian-ensemble path, if applicable.
    pub fn gauss_dims(&self) -> Option<GaussEnsembleDims> {
        match *self {
            EnsembleSpec::Goe { n } => GaussEnsembleDims::new(n, 1).ok(),
            EnsembleSpec::Gue { n } => GaussEnsembleDims::new(n, 2).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind(), self.dims_label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in [EnsembleKind::WishartReal, EnsembleKind::WishartComplex, EnsembleKind::Goe, EnsembleKind::Gue] {
            assert_eq!(k.name().parse::<EnsembleKind>().unwrap(), k);
        }
        assert!("gse".parse::<EnsembleKind>().is_err());
    }

    #[test]
    fn serde_shape() {
        let s = EnsembleSpec::wishart_real(2, 5).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"wishart-real","n_min":2,"n_max":5}"#);
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&j).unwrap(), s);
    }

    #[test]
    fn validation() {
        assert!(EnsembleSpec::wishart_complex(3, 2).is_err());
        assert!(EnsembleSpec::goe(0).is_err());
        assert_eq!(EnsembleSpec::gue(4).unwrap().beta(), 2);
    }
}
