use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use lambdamax::curve::{write_csv, CurveMeta, CurveRecord};
use lambdamax::sampler::{draw_largest, ks_statistic_at, EmpiricalCdf, McConfig};
use lambdamax::{CdfCurve, EnsembleSpec, Error, Method, Precision};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::{
    BenchArgs, CliError, PointArgs, QuantileArgs, SampleArgs, SamplingArgs, TableArgs, TableFormat, ValidateArgs,
};

type Res<T> = Result<T, CliError>;

fn par_eval(pool: &ThreadPool, xs: &[f64], f: impl Fn(f64) -> lambdamax::Result<f64> + Sync) -> Res<Vec<f64>> {
    Ok(pool.install(|| xs.par_iter().map(|&x| f(x)).collect::<lambdamax::Result<Vec<_>>>())?)
}

fn par_draws(pool: &ThreadPool, c: &McConfig) -> lambdamax::Result<Vec<f64>> {
    pool.install(|| {
        (0..c.n_samples as u64)
            .into_par_iter()
            .map(|i| draw_largest(&c.ensemble, c.seed, i))
            .collect()
    })
}

fn monte_carlo(pool: &ThreadPool, e: &EnsembleSpec, s: &SamplingArgs) -> Res<EmpiricalCdf> {
    let c = McConfig::new(s.seed, s.samples, *e)?;
    Ok(EmpiricalCdf::from_samples(par_draws(pool, &c)?)?)
}

fn cdf_values(pool: &ThreadPool, e: &EnsembleSpec, m: Method, xs: &[f64], precision: Precision, s: &SamplingArgs) -> Res<Vec<f64>> {
    match m {
        Method::Exact => par_eval(pool, xs, |x| e.exact_cdf_with(x, precision)),
        Method::TwGamma => par_eval(pool, xs, |x| e.approx_cdf(x)),
        Method::MonteCarlo => {
            let emp = monte_carlo(pool, e, s)?;
            Ok(xs.iter().map(|&x| emp.evaluate(x)).collect())
        }
    }
}

fn empirical_quantile(emp: &EmpiricalCdf, p: f64) -> lambdamax::Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability {p} is outside (0, 1)")));
    }
    let v = emp.sorted_values();
    let k = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Ok(v[k - 1])
}

/// One value per line for a single series; otherwise tab-separated
/// `ensemble dims method argument value` rows.
fn print_series(out: &mut dyn Write, series: &[(EnsembleSpec, Method, Vec<f64>, Vec<f64>)]) -> Res<()> {
    let single = series.len() == 1;
    for (e, m, args, values) in series {
        for (a, v) in args.iter().zip(values) {
            if single {
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "{}\t{}\t{m}\t{a}\t{v}", e.kind(), e.dims_label())?;
            }
        }
    }
    Ok(())
}

pub(crate) fn cdf(pool: &ThreadPool, a: &PointArgs, out: &mut dyn Write) -> Res<()> {
    let mut series = Vec::new();
    for e in a.ensemble.resolve()? {
        for &m in &a.method {
            series.push((e, m, a.x.clone(), cdf_values(pool, &e, m, &a.x, a.precision, &a.sampling)?));
        }
    }
    print_series(out, &series)
}

pub(crate) fn pdf(pool: &ThreadPool, a: &PointArgs, out: &mut dyn Write) -> Res<()> {
    let mut series = Vec::new();
    for e in a.ensemble.resolve()? {
        for &m in &a.method {
            let values = match m {
                Method::Exact => par_eval(pool, &a.x, |x| e.exact_pdf(x))?,
                Method::TwGamma => par_eval(pool, &a.x, |x| e.approx_pdf(x))?,
                Method::MonteCarlo => return Err(CliError::Usage("pdf has no monte-carlo method".into())),
            };
            series.push((e, m, a.x.clone(), values));
        }
    }
    print_series(out, &series)
}

pub(crate) fn quantile(pool: &ThreadPool, a: &QuantileArgs, out: &mut dyn Write) -> Res<()> {
    let mut series = Vec::new();
    for e in a.ensemble.resolve()? {
        for &m in &a.method {
            let values = match m {
                Method::Exact => par_eval(pool, &a.p, |p| e.exact_quantile(p))?,
                Method::TwGamma => par_eval(pool, &a.p, |p| e.approx_quantile(p))?,
                Method::MonteCarlo => {
                    let emp = monte_carlo(pool, &e, &a.sampling)?;
                    a.p.iter().map(|&p| empirical_quantile(&emp, p)).collect::<lambdamax::Result<Vec<_>>>()?
                }
            };
            series.push((e, m, a.p.clone(), values));
        }
    }
    print_series(out, &series)
}

fn with_output(path: &Option<std::path::PathBuf>, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Res<()>) -> Res<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

pub(crate) fn table(pool: &ThreadPool, a: &TableArgs, out: &mut dyn Write) -> Res<()> {
    let mut curves = Vec::new();
    let mut metas = Vec::new();
    for e in a.ensemble.resolve()? {
        let grid = a.grid.resolve(&e, &a.method)?;
        for &m in &a.method {
            let t = Instant::now();
            let values = cdf_values(pool, &e, m, &grid, a.precision, &a.sampling)?;
            curves.push(CdfCurve::new(e, m, grid.clone(), values)?);
            let mc = m == Method::MonteCarlo;
            metas.push(CurveMeta {
                seed: mc.then_some(a.sampling.seed),
                samples: mc.then_some(a.sampling.samples),
                runtime_ms: t.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    with_output(&a.output, out, |w| match a.format {
        TableFormat::Csv => Ok(write_csv(&curves, w)?),
        TableFormat::Json => {
            let records: Vec<CurveRecord> = curves.iter().zip(metas).map(|(c, m)| CurveRecord::new(c, m)).collect();
            serde_json::to_writer_pretty(&mut *w, &records).map_err(|e| CliError::Lib(e.into()))?;
            writeln!(w)?;
            Ok(())
        }
    })
}

pub(crate) fn validate(pool: &ThreadPool, a: &ValidateArgs, out: &mut dyn Write) -> Res<()> {
    let mut failed = Vec::new();
    for e in a.ensemble.resolve()? {
        let emp = monte_carlo(pool, &e, &a.sampling)?;
        let reference = par_eval(pool, emp.sorted_values(), |x| e.exact_cdf_with(x, a.precision))?;
        let ks = ks_statistic_at(&emp, &reference)?;
        let pass = ks <= a.tolerance;
        writeln!(
            out,
            "{e} samples={} seed={} ks={ks:.6} tolerance={} {}",
            a.sampling.samples,
            a.sampling.seed,
            a.tolerance,
            if pass { "PASS" } else { "FAIL" }
        )?;
        if !pass {
            failed.push(format!("{e} (ks {ks:.6})"));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("KS above {} for {}", a.tolerance, failed.join(", "))))
    }
}

pub(crate) fn bench(a: &BenchArgs, out: &mut dyn Write) -> Res<()> {
    if a.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let mut over = Vec::new();
    for e in a.ensemble.resolve()? {
        let x = match a.x {
            Some(x) => x,
            None => e.approx_quantile(0.5)?,
        };
        let mut best = f64::INFINITY;
        let mut value = 0.0;
        for _ in 0..a.repeat {
            let t = Instant::now();
            value = e.exact_cdf_with(x, a.precision)?;
            best = best.min(t.elapsed().as_secs_f64() * 1e3);
        }
        writeln!(out, "{e} x={x} cdf={value} runtime_ms={best:.3}")?;
        if a.budget_ms.is_some_and(|b| best > b) {
            over.push(format!("{e} ({best:.3} ms)"));
        }
    }
    if over.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("over the {} ms budget: {}", a.budget_ms.unwrap_or_default(), over.join(", "))))
    }
}

pub(crate) fn sample(pool: &ThreadPool, a: &SampleArgs, out: &mut dyn Write) -> Res<()> {
    let ensembles = a.ensemble.resolve()?;
    let [e] = ensembles[..] else {
        return Err(CliError::Usage("sample takes a single ensemble".into()));
    };
    let c = McConfig::new(a.sampling.seed, a.sampling.samples, e)?;
    let draws = par_draws(pool, &c)?;
    with_output(&a.output, out, |w| {
        for v in draws {
            writeln!(w, "{v}")?;
        }
        Ok(())
    })
}
