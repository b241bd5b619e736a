//! The `qboot` command line.
//!
//! ```text
//! qboot ci quantile        --input FILE --q Q [--method fast|classic]
//! qboot ci diff-quantile   --treatment FILE --control FILE --q Q
//! qboot study index-dist   --n N --q Q [--bootstrap R] [--exact]
//! qboot study coverage     --mode one-sample|two-sample --n N --replications R
//! qboot study approx-table --n 100,500 --q 0.01,0.5 [--bootstrap R]
//! qboot bench              --n N --bootstrap B --evaluations E
//! ```
//!
//! Exit status is 0 on success, 1 on runtime or I/O failure and 2 on usage
//! errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ci::{ci_one_sample, ci_two_sample, CiMethod, CiRequest, ClassicMode, TwoSampleData};
use crate::error::Result;
use crate::io::{read_sample, write_report, CsvColumn, Destination, InputFormat, InputSource, InputSpec, ReportFormat};
use crate::quantile::{QuantileQuery, SortedSample};
use crate::rng::RandomSource;
use crate::simulation::{
    approximation_study, bench_compare, coverage_simulation, index_distribution_study, BenchConfig, CoverageConfig,
    CoverageMode, Dgp,
};

pub const DEFAULT_SEED: u64 = 1;

const EXIT_CODES: &str = "Exit status: 0 success, 1 runtime or I/O error, 2 usage error.";

#[derive(Debug, Parser)]
#[command(
    name = "qboot",
    version,
    about = "Resampling-free Poisson bootstrap confidence intervals for quantiles",
    after_help = EXIT_CODES,
    propagate_version = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Seed for every random draw; echoed in the report
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Worker threads; 0 uses all available cores. Results do not depend on it
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Report destination; "-" is standard output
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fast,
    Classic,
}

impl From<MethodArg> for CiMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fast => CiMethod::Fast,
            MethodArg::Classic => CiMethod::Classic,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Confidence intervals from data files
    #[command(subcommand, after_help = EXIT_CODES)]
    Ci(CiCommand),
    /// Monte Carlo studies
    #[command(subcommand, after_help = EXIT_CODES)]
    Study(StudyCommand),
    /// Time the classic and fast two-sample intervals on the same data
    #[command(after_help = EXIT_CODES)]
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum CiCommand {
    /// Interval for one quantile of a sample
    #[command(after_help = EXIT_CODES)]
    Quantile(QuantileArgs),
    /// Interval for the treatment-minus-control difference in quantiles
    #[command(after_help = EXIT_CODES)]
    DiffQuantile(DiffArgs),
}

#[derive(Debug, Subcommand)]
pub enum StudyCommand {
    /// Simulated index distribution next to Bin(N+1, q)
    #[command(after_help = EXIT_CODES)]
    IndexDist(IndexDistArgs),
    /// Empirical coverage of the fast intervals
    #[command(after_help = EXIT_CODES)]
    Coverage(CoverageArgs),
    /// Maximum pmf difference over an N x q grid
    #[command(after_help = EXIT_CODES)]
    ApproxTable(ApproxArgs),
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    /// Quantile level in (0, 1)
    #[arg(long, value_parser = parse_unit_open)]
    pub q: f64,
    /// One minus the nominal coverage, in (0, 1)
    #[arg(long, default_value_t = 0.05, value_parser = parse_unit_open)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
    pub method: MethodArg,
    /// Read this CSV column (header name or 0-based index) instead of one value per line
    #[arg(long)]
    pub csv_column: Option<String>,
}

#[derive(Debug, Args)]
pub struct QuantileArgs {
    /// Data file, or "-" for standard input
    #[arg(long)]
    pub input: String,
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Bootstrap replications for --method classic
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub bootstrap: u64,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    /// Treatment data file, or "-" for standard input
    #[arg(long)]
    pub treatment: String,
    /// Control data file, or "-" for standard input
    #[arg(long)]
    pub control: String,
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Bootstrap replications [default: 100000 for fast, 10000 for classic]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub bootstrap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct IndexDistArgs {
    /// Sample size N
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Quantile level in (0, 1)
    #[arg(long, value_parser = parse_unit_open)]
    pub q: f64,
    /// Poisson bootstrap replications to simulate
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub bootstrap: u64,
    /// Also compute the exact pmf (N <= 300)
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    OneSample,
    TwoSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DgpArg {
    StandardNormal,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::OneSample)]
    pub mode: ModeArg,
    /// Sample size per group
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Monte Carlo replications (at least 100)
    #[arg(long, default_value_t = 2_000, value_parser = clap::value_parser!(u64).range(100..))]
    pub replications: u64,
    /// Index draws per two-sample interval
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub bootstrap: u64,
    /// Comma-separated quantile levels
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,0.25,0.5", value_parser = parse_unit_open)]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = 0.05, value_parser = parse_unit_open)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = DgpArg::StandardNormal)]
    pub dgp: DgpArg,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',', default_value = "100,500,2000,10000", value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Vec<u64>,
    /// Comma-separated quantile levels
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,0.25,0.5", value_parser = parse_unit_open)]
    pub q: Vec<f64>,
    /// Poisson bootstrap replications per cell
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub bootstrap: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Sample size per group
    #[arg(long, default_value_t = 1_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Bootstrap replications for both methods
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub bootstrap: u64,
    /// Timed evaluations per method (at least 10)
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(10..))]
    pub evaluations: u64,
    #[arg(long, default_value_t = 0.5, value_parser = parse_unit_open)]
    pub q: f64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_unit_open)]
    pub alpha: f64,
    /// Classic method builds every bootstrap sample instead of scanning frequencies
    #[arg(long)]
    pub materialize: bool,
}

fn parse_unit_open(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside the open interval (0, 1)"))
    }
}

/// Parses `std::env::args`, runs the command and maps failures to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version print to stdout and exit 0; usage errors exit 2
            let _ = e.print();
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| crate::Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.common, &cli.command))
}

fn dispatch(common: &CommonArgs, command: &Command) -> Result<()> {
    let format = match common.format {
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Table => ReportFormat::Table,
    };
    let dest = Destination::from_arg(&common.output);
    let seed = common.seed;
    match command {
        Command::Ci(CiCommand::Quantile(args)) => {
            let sample = load(&args.input, &args.interval)?;
            let req = request(&args.interval, args.bootstrap as usize, seed)?;
            write_report(&ci_one_sample(&sample, &req)?, format, &dest)
        }
        Command::Ci(CiCommand::DiffQuantile(args)) => {
            let data = TwoSampleData::new(
                load(&args.treatment, &args.interval)?,
                load(&args.control, &args.interval)?,
            );
            let b = args.bootstrap.unwrap_or(match args.interval.method {
                MethodArg::Fast => 100_000,
                MethodArg::Classic => 10_000,
            });
            let req = request(&args.interval, b as usize, seed)?;
            write_report(&ci_two_sample(&data, &req)?, format, &dest)
        }
        Command::Study(StudyCommand::IndexDist(args)) => {
            let report =
                index_distribution_study(args.n as usize, QuantileQuery::new(args.q)?, args.bootstrap, &RandomSource::new(seed), args.exact)?;
            write_report(&report, format, &dest)
        }
        Command::Study(StudyCommand::Coverage(args)) => {
            let cfg = CoverageConfig {
                n_per_group: args.n as usize,
                replications: args.replications as usize,
                b_replications: args.bootstrap as usize,
                q_list: queries(&args.q)?,
                alpha: args.alpha,
                dgp: match args.dgp {
                    DgpArg::StandardNormal => Dgp::StandardNormal,
                },
                mode: match args.mode {
                    ModeArg::OneSample => CoverageMode::OneSample,
                    ModeArg::TwoSample => CoverageMode::TwoSample,
                },
                seed,
            };
            write_report(&coverage_simulation(&cfg)?, format, &dest)
        }
        Command::Study(StudyCommand::ApproxTable(args)) => {
            let n_list: Vec<usize> = args.n.iter().map(|&n| n as usize).collect();
            let table = approximation_study(&n_list, &queries(&args.q)?, args.bootstrap, &RandomSource::new(seed))?;
            write_report(&table, format, &dest)
        }
        Command::Bench(args) => {
            let mut cfg = BenchConfig::new(args.n as usize, args.bootstrap as usize, args.evaluations as usize, seed);
            cfg.q = QuantileQuery::new(args.q)?;
            cfg.alpha = args.alpha;
            if args.materialize {
                cfg.classic_mode = ClassicMode::Materialize;
            }
            write_report(&bench_compare(&cfg)?, format, &dest)
        }
    }
}

fn queries(values: &[f64]) -> Result<Vec<QuantileQuery>> {
    values.iter().map(|&q| QuantileQuery::new(q)).collect()
}

fn request(args: &IntervalArgs, b: usize, seed: u64) -> Result<CiRequest> {
    CiRequest::new(args.q, args.alpha, b, args.method.into(), seed)
}

fn load(path: &str, args: &IntervalArgs) -> Result<SortedSample> {
    let format = match &args.csv_column {
        Some(col) => InputFormat::Csv(CsvColumn::from_arg(col)),
        None => InputFormat::Lines,
    };
    let input = read_sample(&InputSpec { source: InputSource::from_arg(path), format })?;
    SortedSample::from_unsorted(input.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_common_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["qboot", "ci", "quantile", "--input", "x", "--q", "0.5", "--seed", "9"]).unwrap();
        assert_eq!(cli.common.seed, 9);
        assert_eq!(cli.common.format, FormatArg::Json);
    }

    #[test]
    fn usage_errors() {
        let err = |args: &[&str]| Cli::try_parse_from(args).unwrap_err();
        let e = err(&["qboot", "ci", "quantile", "--input", "x", "--q", "1.5"]);
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("--q"));
        assert!(e.to_string().contains("(0, 1)"));
        assert_eq!(err(&["qboot", "ci", "diff-quantile", "--treatment", "t", "--q", "0.5"]).exit_code(), 2);
        assert_eq!(err(&["qboot", "bench", "--evaluations", "0"]).exit_code(), 2);
        assert_eq!(err(&["qboot", "study", "bogus"]).exit_code(), 2);
    }

    #[test]
    fn list_flags() {
        let cli = Cli::try_parse_from(["qboot", "study", "approx-table", "--n", "100,500", "--q", "0.01,0.5"]).unwrap();
        match cli.command {
            Command::Study(StudyCommand::ApproxTable(a)) => {
                assert_eq!(a.n, vec![100, 500]);
                assert_eq!(a.q, vec![0.01, 0.5]);
                assert_eq!(a.bootstrap, 1_000_000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
