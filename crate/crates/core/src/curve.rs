//! CDF curves on a grid, their grids, and CSV/JSON serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::tw_gamma;

pub const AUTO_GRID_POINTS: usize = 200;
/// Upper end of an auto grid.
pub const AUTO_GRID_TOP: f64 = 0.9999;
/// Monotonicity slack for exact and surrogate curves.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    TwGamma,
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::TwGamma => "tw-gamma",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "tw-gamma" => Ok(Method::TwGamma),
            "monte-carlo" => Ok(Method::MonteCarlo),
            _ => Err(Error::Config(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Auto,
    Linear { start: f64, stop: f64, count: usize },
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `auto` or `start:stop:count`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(GridSpec::Auto);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid must be 'auto' or 'start:stop:count', got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        linspace(start, stop, count)?;
        Ok(GridSpec::Linear { start, stop, count })
    }
}

impl GridSpec {
    /// Grid shared by all `methods` for one ensemble.
    pub fn resolve(&self, ensemble: &EnsembleSpec, methods: &[Method]) -> Result<Vec<f64>> {
        match *self {
            GridSpec::Linear { start, stop, count } => linspace(start, stop, count),
            GridSpec::Auto => {
                let (lo, hi) = auto_range(ensemble, methods)?;
                linspace(lo, hi, AUTO_GRID_POINTS)
            }
        }
    }
}

/// `count` equally spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !start.is_finite() || !stop.is_finite() {
        return Err(Error::Config("grid ends must be finite".into()));
    }
    match count {
        0 => Err(Error::Config("grid needs at least one point".into())),
        1 if start == stop => Ok(vec![start]),
        1 => Err(Error::Config("a one-point grid needs start == stop".into())),
        _ if !(stop > start) => Err(Error::Config(format!("grid needs start < stop, got {start}:{stop}"))),
        _ => {
            let h = (stop - start) / (count - 1) as f64;
            let mut g: Vec<f64> = (0..count).map(|k| start + h * k as f64).collect();
            g[count - 1] = stop;
            Ok(g)
        }
    }
}

/// [lower, upper] for an auto grid. The lower end is 0 for Wishart laws and
/// the surrogate's support edge for Gaussian ensembles; the upper end is the
/// 0.9999 quantile of the exact law when it is among `methods`, otherwise of
/// the surrogate.
pub fn auto_range(ensemble: &EnsembleSpec, methods: &[Method]) -> Result<(f64, f64)> {
    let exact = methods.contains(&Method::Exact);
    let hi = if exact {
        ensemble.exact_quantile_coarse(AUTO_GRID_TOP, 1e-4)?
    } else {
        ensemble.approx_quantile(AUTO_GRID_TOP)?
    };
    let lo = match ensemble.support_min() {
        Some(m) => m,
        None => match tw_gamma::approx_support_min(ensemble) {
            Ok(edge) => edge,
            Err(_) if exact => ensemble.exact_quantile_coarse(1.0 - AUTO_GRID_TOP, 1e-4)?,
            Err(e) => return Err(e),
        },
    };
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    pub ensemble: EnsembleSpec,
    pub method: Method,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl CdfCurve {
    pub fn new(ensemble: EnsembleSpec, method: Method, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Input(format!("{} grid points but {} values", grid.len(), values.len())));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("grid is not strictly ascending".into()));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Input(format!("CDF value {v} outside [0, 1]")));
        }
        if method != Method::MonteCarlo {
            if let Some(k) = values.windows(2).position(|w| w[1] < w[0] - MONOTONE_TOL) {
                return Err(Error::Numerical(format!(
                    "{method} curve decreases between x = {} and x = {}",
                    grid[k],
                    grid[k + 1]
                )));
            }
        }
        Ok(CdfCurve { ensemble, method, grid, values })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// max |F − G| over a shared grid.
    pub fn sup_distance(&self, other: &CdfCurve) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Input("curves are not on the same grid".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `x,value` rows, adding a `method` column when the curves use more
/// than one method and a `dims` column when they cover more than one
/// ensemble.
pub fn write_csv<W: Write>(curves: &[CdfCurve], out: W) -> Result<()> {
    let multi_method = curves.iter().any(|c| c.method != curves[0].method);
    let multi_dims = curves.iter().any(|c| c.ensemble != curves[0].ensemble);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x", "value"];
    if multi_method {
        header.push("method");
    }
    if multi_dims {
        header.push("dims");
    }
    w.write_record(&header)?;
    for c in curves {
        for (x, v) in c.grid.iter().zip(&c.values) {
            let mut rec = vec![fmt_num(*x), fmt_num(*v)];
            if multi_method {
                rec.push(c.method.name().to_string());
            }
            if multi_dims {
                rec.push(c.ensemble.dims_label());
            }
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses `write_csv` output. `ensemble` and `method` fill in for absent
/// columns; a `dims` column is read against `ensemble`'s kind.
pub fn read_csv<R: Read>(input: R, ensemble: EnsembleSpec, method: Method) -> Result<Vec<CdfCurve>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (xi, vi) = match (col("x"), col("value")) {
        (Some(x), Some(v)) => (x, v),
        _ => return Err(Error::Input("CSV needs 'x' and 'value' columns".into())),
    };
    let (mi, di) = (col("method"), col("dims"));
    let mut order: Vec<(EnsembleSpec, Method)> = Vec::new();
    let mut points: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Input("short CSV row".into()));
        let num = |i: usize| -> Result<f64> {
            let s = field(i)?;
            s.parse().map_err(|_| Error::Input(format!("bad number '{s}'")))
        };
        let m = match mi {
            Some(i) => field(i)?.parse()?,
            None => method,
        };
        let e = match di {
            Some(i) => EnsembleSpec::from_label(ensemble.kind(), field(i)?)?,
            None => ensemble,
        };
        let key = match order.iter().position(|k| *k == (e, m)) {
            Some(k) => k,
            None => {
                order.push((e, m));
                order.len() - 1
            }
        };
        let slot = points.entry(key).or_default();
        slot.0.push(num(xi)?);
        slot.1.push(num(vi)?);
    }
    points
        .into_iter()
        .map(|(k, (g, v))| CdfCurve::new(order[k].0, order[k].1, g, v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub ensemble: EnsembleKind,
    pub dims: BTreeMap<String, usize>,
    pub method: Method,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: CurveMeta,
}

impl CurveRecord {
    pub fn new(curve: &CdfCurve, meta: CurveMeta) -> Self {
        let dims = match curve.ensemble {
            EnsembleSpec::WishartReal { n_min, n_max } | EnsembleSpec::WishartComplex { n_min, n_max } => {
                BTreeMap::from([("n_min".to_string(), n_min), ("n_max".to_string(), n_max)])
            }
            EnsembleSpec::Goe { n } | EnsembleSpec::Gue { n } => BTreeMap::from([("n".to_string(), n)]),
        };
        CurveRecord {
            ensemble: curve.ensemble.kind(),
            dims,
            method: curve.method,
            grid: curve.grid.clone(),
            values: curve.values.clone(),
            meta,
        }
    }

    pub fn to_curve(&self) -> Result<CdfCurve> {
        let get = |k: &str| {
            self.dims.get(k).copied().ok_or_else(|| Error::Input(format!("dims lack '{k}'")))
        };
        let e = if self.ensemble.is_wishart() {
            EnsembleSpec::from_label(self.ensemble, &format!("{}x{}", get("n_min")?, get("n_max")?))?
        } else {
            EnsembleSpec::from_label(self.ensemble, &get("n")?.to_string())?
        };
        CdfCurve::new(e, self.method, self.grid.clone(), self.values.clone())
    }
}
