//! Command-line front end: argument parsing, ensemble resolution and exit
//! codes. The subcommand bodies live in `commands`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lambdamax::curve::GridSpec;
use lambdamax::{EnsembleKind, EnsembleSpec, Error, Method, Precision};

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lambdamax", version, about = "Distribution of the largest eigenvalue of Wishart, GOE and GUE matrices")]
struct Cli {
    /// Worker threads for grid points and sampling (0 = all cores).
    #[arg(long, global = true, env = "LAMBDAMAX_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CDF of λ₁ at the given points.
    Cdf(PointArgs),
    /// Density of λ₁ at the given points.
    Pdf(PointArgs),
    /// Quantiles of λ₁.
    Quantile(QuantileArgs),
    /// CDF curves on a grid, as CSV or JSON.
    Table(TableArgs),
    /// Kolmogorov–Smirnov check of the exact CDF against Monte Carlo.
    Validate(ValidateArgs),
    /// Wall time of single exact CDF evaluations.
    Bench(BenchArgs),
    /// Raw Monte Carlo draws of λ₁, one per line in index order.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[arg(long, value_parser = parse_kind)]
    ensemble: EnsembleKind,
    /// Smaller Wishart dimension.
    #[arg(long)]
    nmin: Option<usize>,
    /// Larger Wishart dimension.
    #[arg(long)]
    nmax: Option<usize>,
    /// Matrix orders (GOE/GUE), or square Wishart sizes; comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
}

#[derive(Debug, Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    x: Vec<f64>,
    /// exact, tw-gamma or monte-carlo; comma separated.
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    method: Vec<Method>,
    /// Mantissa bits for exact CDFs, or `auto`.
    #[arg(long, value_parser = parse_precision, default_value = "auto")]
    precision: Precision,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Debug, Args)]
struct QuantileArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Probabilities in (0, 1), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    method: Vec<Method>,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// `auto` or `start:stop:count`.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    grid: GridSpec,
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    method: Vec<Method>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long, value_parser = parse_precision, default_value = "auto")]
    precision: Precision,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Largest acceptable KS statistic.
    #[arg(long, default_value_t = 0.005)]
    tolerance: f64,
    #[arg(long, value_parser = parse_precision, default_value = "auto")]
    precision: Precision,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Evaluation point; defaults to the surrogate median.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Fail with exit code 4 when the fastest run exceeds this many ms.
    #[arg(long)]
    budget_ms: Option<f64>,
    #[arg(long, value_parser = parse_precision, default_value = "auto")]
    precision: Precision,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<EnsembleKind, Error> {
    s.parse()
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    if s == "auto" {
        return Ok(Precision::Auto);
    }
    match s.parse::<u32>() {
        Ok(b) if b >= 64 => Ok(Precision::Bits(b)),
        _ => Err(format!("expected `auto` or a bit count of at least 64, got '{s}'")),
    }
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Lib(Error),
    Validation(String),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) | CliError::Lib(Error::Io(_) | Error::Numerical(_)) => EXIT_FAILURE,
            CliError::Lib(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Lib(e) => e.to_string(),
            CliError::Validation(m) => format!("validation failed: {m}"),
            CliError::Io(e) => format!("i/o error: {e}"),
        }
    }
}

impl EnsembleArgs {
    fn resolve(&self) -> Result<Vec<EnsembleSpec>, CliError> {
        let kind = self.ensemble;
        if kind.is_wishart() {
            match (self.nmin, self.nmax, self.n.is_empty()) {
                (Some(a), Some(b), true) => Ok(vec![wishart(kind, a, b)?]),
                (None, None, false) => self.n.iter().map(|&n| Ok(wishart(kind, n, n)?)).collect(),
                _ => Err(CliError::Usage(format!("{kind} needs either --nmin and --nmax, or --n"))),
            }
        } else {
            if self.nmin.is_some() || self.nmax.is_some() {
                return Err(CliError::Usage(format!("{kind} takes --n, not --nmin/--nmax")));
            }
            if self.n.is_empty() {
                return Err(CliError::Usage(format!("{kind} needs --n")));
            }
            self.n
                .iter()
                .map(|&n| Ok(if kind == EnsembleKind::Goe { EnsembleSpec::goe(n) } else { EnsembleSpec::gue(n) }?))
                .collect()
        }
    }
}

fn wishart(kind: EnsembleKind, n_min: usize, n_max: usize) -> lambdamax::Result<EnsembleSpec> {
    if kind == EnsembleKind::WishartReal {
        EnsembleSpec::wishart_real(n_min, n_max)
    } else {
        EnsembleSpec::wishart_complex(n_min, n_max)
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "cannot start worker threads: {e}");
            return EXIT_FAILURE;
        }
    };
    let result = match &cli.command {
        Command::Cdf(a) => commands::cdf(&pool, a, out),
        Command::Pdf(a) => commands::pdf(&pool, a, out),
        Command::Quantile(a) => commands::quantile(&pool, a, out),
        Command::Table(a) => commands::table(&pool, a, out),
        Command::Validate(a) => commands::validate(&pool, a, out),
        Command::Bench(a) => commands::bench(a, out),
        Command::Sample(a) => commands::sample(&pool, a, out),
    };
    match result.and_then(|()| out.flush().map_err(CliError::from)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "lambdamax: {}", e.message());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ens(kind: &str, nmin: Option<usize>, nmax: Option<usize>, n: &[usize]) -> EnsembleArgs {
        EnsembleArgs { ensemble: kind.parse().unwrap(), nmin, nmax, n: n.to_vec() }
    }

    #[test]
    fn precision_flag() {
        assert_eq!(parse_precision("auto").unwrap(), Precision::Auto);
        assert_eq!(parse_precision("256").unwrap(), Precision::Bits(256));
        assert!(parse_precision("63").is_err() && parse_precision("lots").is_err());
    }

    #[test]
    fn ensemble_resolution() {
        let w = ens("wishart-complex", Some(2), Some(7), &[]).resolve().unwrap();
        assert_eq!(w, [EnsembleSpec::wishart_complex(2, 7).unwrap()]);
        let sq = ens("wishart-real", None, None, &[3, 4]).resolve().unwrap();
        assert_eq!(sq[1], EnsembleSpec::wishart_real(4, 4).unwrap());
        assert_eq!(ens("gue", None, None, &[5]).resolve().unwrap(), [EnsembleSpec::gue(5).unwrap()]);
        assert!(matches!(ens("goe", None, None, &[]).resolve(), Err(CliError::Usage(_))));
        assert!(matches!(ens("wishart-real", Some(2), None, &[]).resolve(), Err(CliError::Usage(_))));
        assert!(matches!(ens("wishart-real", Some(3), Some(2), &[]).resolve(), Err(CliError::Lib(Error::Domain(_)))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Lib(Error::Capability("big".into())).exit_code(), EXIT_DOMAIN);
        assert_eq!(CliError::Lib(Error::Numerical("nan".into())).exit_code(), EXIT_FAILURE);
        assert_eq!(CliError::Validation("ks".into()).exit_code(), EXIT_VALIDATION);
    }
}
