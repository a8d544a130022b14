//! `confapprox`: exact and approximated conformance checking from the command line.

mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use confapprox_core::{
    approximate, avg_nearest_neighbor_distance, benchmark, exact_conformance, AlignmentConfig,
    ApproxConfig, CostFunction, ErrorClass, Method, Rule,
};

use crate::input::{load_log, load_model, LogOptions, ModelOptions};
use crate::report::Format;

#[derive(Parser)]
#[command(
    name = "confapprox",
    version,
    about = "Approximate alignment-based conformance checking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate fitness with bounds and deviation statistics.
    Approximate(RunArgs),
    /// Align every variant and report exact fitness.
    Exact(RunArgs),
    /// Compare exact and approximated runs: timings, speedup, accuracy.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Number of approximation repetitions to average.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        repeat: u64,
    },
    /// Variant statistics of an event log.
    LogStats {
        #[command(flatten)]
        log: LogOptions,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    log: LogOptions,
    #[command(flatten)]
    model: ModelOptions,
    #[arg(long, value_enum, default_value_t = MethodArg::Frequency)]
    method: MethodArg,
    /// Approximation parameter as a percentage in (0, 100].
    #[arg(long, default_value_t = 10.0, value_parser = parse_percent)]
    param: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    #[arg(long, value_enum, default_value_t = RuleArg::Default)]
    rule: RuleArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include one result row per trace variant.
    #[arg(long)]
    per_variant: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Simulation,
    Frequency,
    Random,
    Clustering,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Midpoint,
    CandidateAverage,
    LowerBound,
    Default,
}

fn parse_percent(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 && v <= 100.0 {
        Ok(v)
    } else {
        Err(format!("{s} is outside (0, 100]"))
    }
}

/// A failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<confapprox_core::Error> for Failure {
    fn from(e: confapprox_core::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Input => 2,
            ErrorClass::Model => 3,
            ErrorClass::Resource => 4,
            ErrorClass::Internal => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl RunArgs {
    fn approx_config(&self) -> Result<ApproxConfig, Failure> {
        let method = match self.method {
            MethodArg::Simulation => Method::Simulation,
            MethodArg::Frequency => Method::Frequency,
            MethodArg::Random => Method::Random,
            MethodArg::Clustering => Method::Clustering,
            MethodArg::Exact => {
                return Err(Failure::input(
                    "method `exact` has no approximation; use the `exact` subcommand",
                ))
            }
        };
        let mut config = ApproxConfig::new(method, self.param / 100.0);
        config.seed = self.seed;
        config.workers = self.workers as usize;
        config.rule = match self.rule {
            RuleArg::Midpoint => Some(Rule::Midpoint),
            RuleArg::CandidateAverage => Some(Rule::CandidateAverage),
            RuleArg::LowerBound => Some(Rule::LowerBound),
            RuleArg::Default => None,
        };
        if method == Method::Simulation && config.rule == Some(Rule::CandidateAverage) {
            return Err(Failure::input(
                "rule `candidate-average` needs candidates; the simulation method has none",
            ));
        }
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Approximate(args) => {
            let config = args.approx_config()?;
            let (log, mut key) = load_log(&args.log)?;
            let net = load_model(&args.model, &mut key)?;
            let result = approximate(&log, &net, &key, &config)?;
            Ok(report::approximation(
                &result,
                &key,
                args.param,
                args.per_variant,
                args.format,
            ))
        }
        Command::Exact(args) => {
            let (log, mut key) = load_log(&args.log)?;
            let net = load_model(&args.model, &mut key)?;
            let exact = exact_conformance(
                &log,
                &net,
                &CostFunction::standard(),
                &AlignmentConfig::default(),
                args.workers as usize,
            )?;
            Ok(report::exact(
                &exact,
                &key,
                args.seed,
                args.per_variant,
                args.format,
            ))
        }
        Command::Bench { run, repeat } => {
            let config = run.approx_config()?;
            let (log, mut key) = load_log(&run.log)?;
            let net = load_model(&run.model, &mut key)?;
            let bench = benchmark(&log, &net, &key, &config, repeat as usize)?;
            Ok(report::bench(&bench, &config, run.param, run.format))
        }
        Command::LogStats { log, format } => {
            let (log, _) = load_log(&log)?;
            let nn = match avg_nearest_neighbor_distance(&log) {
                Ok(d) => Some(d),
                Err(_) if log.variant_count() < 2 => None,
                Err(e) => return Err(e.into()),
            };
            Ok(report::log_stats(&log, nn, format))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
