use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jrp_core::model::rational::{parse_rational, DEFAULT_DIGITS};
use jrp_core::reduce::{ConstantsScheme, ReductionConfig, ReductionConstants};
use jrp_core::sync::SyncConfig;
use jrp_core::Rational;

mod commands;
mod error;
mod report;
mod suites;

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "jrp-forge",
    version,
    about = "Exact joint-replenishment evaluation, search and 3SAT reductions"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Significant digits of decimal renderings.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS)]
    pub digits: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "JRP_FORGE_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Largest number of distinct series for inclusion-exclusion.
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..=30))]
    pub subset_cap: u64,
    /// Largest number of epochs the enumeration oracle materializes.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub enumeration_cap: u64,
}

impl Global {
    pub fn sync(&self) -> SyncConfig {
        SyncConfig {
            subset_cap: self.subset_cap as usize,
            enumeration_cap: self.enumeration_cap,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    Pot,
    Descent,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Roundtrip,
    PotRatio,
}

pub fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn range_arg(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("`{x}`: {e}"));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo < 1 || hi < lo {
        return Err(format!("range {lo}:{hi} must satisfy 1 <= LO <= HI"));
    }
    Ok((lo, hi))
}

#[derive(Args, Debug, Clone)]
pub struct ReductionArgs {
    #[arg(long, value_parser = rational_arg)]
    pub alpha_c: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    pub alpha_v_bar: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    pub alpha_v: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    pub alpha_n: Option<Rational>,
    /// Constants layout: balanced or pair-products.
    #[arg(long, default_value = "balanced")]
    pub scheme: ConstantsScheme,
}

impl ReductionArgs {
    pub fn config(&self) -> ReductionConfig {
        let d = ReductionConstants::default();
        ReductionConfig {
            constants: ReductionConstants {
                alpha_c: self.alpha_c.clone().unwrap_or(d.alpha_c),
                alpha_v_bar: self.alpha_v_bar.clone().unwrap_or(d.alpha_v_bar),
                alpha_v: self.alpha_v.clone().unwrap_or(d.alpha_v),
                alpha_n: self.alpha_n.clone().unwrap_or(d.alpha_n),
            },
            scheme: self.scheme,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact cost of a policy.
    Eval {
        instance: PathBuf,
        policy: PathBuf,
        #[arg(long)]
        instance_id: Option<String>,
        #[arg(long)]
        policy_id: Option<String>,
    },
    /// Optimize a policy.
    Solve(SolveArgs),
    /// Build a JRP instance from a 3SAT formula.
    Reduce {
        cnf: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        reduction: ReductionArgs,
    },
    /// Brute-force satisfiability of a DIMACS formula.
    Sat {
        cnf: PathBuf,
        /// Refuse formulas with more variables.
        #[arg(long, default_value_t = 24)]
        n_cap: usize,
    },
    /// Run a property suite.
    Check(CheckArgs),
    /// Random instance.
    Gen {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Setup cost range LO:HI.
        #[arg(long, value_parser = range_arg, default_value = "1:100")]
        k_range: (i64, i64),
        #[arg(long, value_parser = range_arg, default_value = "1:10")]
        h_range: (i64, i64),
        #[arg(long, value_parser = range_arg, default_value = "1:10")]
        lambda_range: (i64, i64),
        #[arg(long, value_parser = range_arg, default_value = "1:100")]
        k0_range: (i64, i64),
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Power-of-two base period.
    #[arg(long, value_parser = rational_arg, default_value = "1")]
    pub base: Rational,
    /// Scan the power-of-two base over one octave.
    #[arg(long)]
    pub optimize_base: bool,
    /// Base grid points per octave.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub grid: u32,
    /// Exhaustive multipliers run over 1..=K_MAX for every commodity.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: Option<u64>,
    /// Without --k-max: multiplier window as a multiple of EOQ ratios.
    #[arg(long, default_value_t = 4.0)]
    pub span: f64,
    #[arg(long, value_parser = rational_arg)]
    pub seed_lo: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    pub seed_hi: Option<Rational>,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub profile_cap: u64,
    /// Descent start policy (default: the power-of-two policy).
    #[arg(long)]
    pub start: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_rounds: u32,
    /// Also write the policy file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// lemmas: reduction file to check.
    #[arg(long)]
    pub reduction: Option<PathBuf>,
    /// lemmas/roundtrip: DIMACS input (repeatable for roundtrip).
    #[arg(long)]
    pub cnf: Vec<PathBuf>,
    /// roundtrip: every 3-variable formula of at most 4 clauses plus the
    /// unsatisfiable 8-clause one.
    #[arg(long)]
    pub corpus: bool,
    /// lemmas: variables of the generated formula.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// lemmas: clauses of the generated formula.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// pot-ratio: number of random instances.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// pot-ratio: largest commodity count.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..=8))]
    pub max_n: u64,
    /// pot-ratio: ratio bound.
    #[arg(long, default_value_t = 1.06)]
    pub bound: f64,
    /// pot-ratio: keep the base at 1 instead of scanning it.
    #[arg(long)]
    pub fixed_base: bool,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub profile_cap: u64,
    #[command(flatten)]
    pub reduction_args: ReductionArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| CliError::input(format!("thread pool: {e}")))?;
    }
    let g = &cli.global;
    match cli.command {
        Command::Eval {
            instance,
            policy,
            instance_id,
            policy_id,
        } => commands::eval(g, &instance, &policy, instance_id, policy_id),
        Command::Solve(args) => commands::solve(g, &args),
        Command::Reduce {
            cnf,
            out,
            reduction,
        } => commands::reduce(g, &cnf, &out, &reduction.config()),
        Command::Sat { cnf, n_cap } => commands::sat(g, &cnf, n_cap),
        Command::Check(args) => suites::check(g, &args),
        Command::Gen {
            n,
            k_range,
            h_range,
            lambda_range,
            k0_range,
            rng_seed,
            out,
        } => commands::gen(
            &jrp_core::gen::InstanceSpec {
                n,
                setup: k_range.0..=k_range.1,
                holding: h_range.0..=h_range.1,
                demand: lambda_range.0..=lambda_range.1,
                joint_setup: k0_range.0..=k0_range.1,
            },
            rng_seed,
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = run(cli);
    eprintln!("wall time: {:.3}s", started.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit as u8)
        }
    }
}
