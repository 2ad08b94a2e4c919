//! `eville` — stopping rules, evidence processes, line-crossing bounds and a
//! deterministic Monte Carlo verification harness on the command line.
//!
//! Exit status: 0 success, 2 usage error, 3 a verification suite reported a
//! violation, 4 I/O error. Every run writes exactly one output file whose
//! first line is `# eville <version> seed=<seed>`.

mod config;
mod error;
mod output;
mod run;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{JobPatch, OutputFormat};
use error::CliError;

#[derive(Parser)]
#[command(name = "eville", version, about = "anytime-valid sequential testing toolkit")]
struct Cli {
    /// JSON config file merged under explicit flags (flags win)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for the Monte Carlo harness (results do not depend on this)
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Output file (default: eville-<command>.<ext>)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Emit JSON Lines instead of CSV
    #[arg(long)]
    json: bool,

    /// RNG seed (defaults to a fixed constant, never the clock)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Default)]
struct McArgs {
    /// Family specification, e.g. gaussian:mu=0,sigma=1
    #[arg(long)]
    family: Option<String>,

    /// Rule specification, e.g. abs-mean-above:threshold=1,start=10
    #[arg(long)]
    rule: Option<String>,

    /// Observations per path
    #[arg(long)]
    horizon: Option<u64>,

    /// Monte Carlo replicates
    #[arg(long = "paths")]
    n_paths: Option<u64>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate P(tau <= T) for each member of a family
    Simulate(McArgs),
    /// Grid-supremum stop probability over a family grid
    MuStar(McArgs),
    /// Closed-form line-crossing bounds
    Bound {
        #[command(subcommand)]
        cmd: BoundCmd,
    },
    /// Monte Carlo verification suites
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Mean-drift detector schedules and runs
    Slln {
        #[command(subcommand)]
        cmd: SllnCmd,
    },
    /// Exact oracle values
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Raw bound at explicit truncation K
    L1 {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long = "K")]
        k_trunc: Option<f64>,
        /// Family whose grid-supremum tail supplies r(K)
        #[arg(long)]
        family: Option<String>,
        /// Explicit r(K) instead of a family
        #[arg(long = "r-of-k")]
        r_of_k: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bound with K = gamma^(1/3), threshold 2 eps
    L1Auto {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fixed-sample mean bound P(|S_k|/k > eps)
    MeanK {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Crossing frequency of 1/alpha versus the Ville bound alpha
    Ville {
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long = "paths")]
        n_paths: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Stopped means E[E_{tau ^ T}] versus 1 over fixed-time and level rules
    Eprocess {
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long = "paths")]
        n_paths: Option<u64>,
        /// Levels of the level-crossing rules (default 5,20)
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum SllnCmd {
    /// Smallest certified k_n per n (closed-form tails required)
    Schedule {
        #[arg(long)]
        family: Option<String>,
        #[arg(long = "n-max")]
        n_max: Option<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Terminal witness values over sampled paths for a schedule file
    Run {
        /// CSV schedule with header n,k_n
        #[arg(long, value_name = "FILE")]
        schedule: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long = "paths")]
        n_paths: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// P_i(tau_n < infinity) for the two-coin construction, truncated
    TwoCoin {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        trunc: Option<u32>,
        /// Which measure (1 or 2); the value is symmetric
        #[arg(long)]
        i: Option<u8>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exact stop probability of the leading-zeros rule under binary-pn
    BinaryPn {
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn common_patch(common: CommonArgs) -> JobPatch {
    JobPatch {
        out: common.out,
        format: common.json.then_some(OutputFormat::Jsonl),
        seed: common.seed,
        ..JobPatch::default()
    }
}

fn to_patch(cmd: Cmd) -> (&'static str, JobPatch) {
    match cmd {
        Cmd::Simulate(args) => ("simulate", mc_patch(args)),
        Cmd::MuStar(args) => ("mu-star", mc_patch(args)),
        Cmd::Bound { cmd } => match cmd {
            BoundCmd::L1 {
                eps,
                gamma,
                k_trunc,
                family,
                r_of_k,
                common,
            } => (
                "bound-l1",
                JobPatch {
                    eps,
                    gamma,
                    k_trunc,
                    family,
                    r_of_k,
                    ..common_patch(common)
                },
            ),
            BoundCmd::L1Auto {
                eps,
                gamma,
                family,
                common,
            } => (
                "bound-l1-auto",
                JobPatch {
                    eps,
                    gamma,
                    family,
                    ..common_patch(common)
                },
            ),
            BoundCmd::MeanK {
                eps,
                k,
                family,
                common,
            } => (
                "bound-mean-k",
                JobPatch {
                    eps,
                    k,
                    family,
                    ..common_patch(common)
                },
            ),
        },
        Cmd::Verify { cmd } => match cmd {
            VerifyCmd::Ville {
                process,
                family,
                alpha,
                horizon,
                n_paths,
                common,
            } => (
                "verify-ville",
                JobPatch {
                    process,
                    family,
                    alpha,
                    horizon,
                    n_paths,
                    ..common_patch(common)
                },
            ),
            VerifyCmd::Eprocess {
                process,
                family,
                horizon,
                n_paths,
                levels,
                common,
            } => (
                "verify-eprocess",
                JobPatch {
                    process,
                    family,
                    horizon,
                    n_paths,
                    levels,
                    ..common_patch(common)
                },
            ),
        },
        Cmd::Slln { cmd } => match cmd {
            SllnCmd::Schedule {
                family,
                n_max,
                common,
            } => (
                "slln-schedule",
                JobPatch {
                    family,
                    n_max,
                    ..common_patch(common)
                },
            ),
            SllnCmd::Run {
                schedule,
                family,
                horizon,
                n_paths,
                common,
            } => (
                "slln-run",
                JobPatch {
                    schedule,
                    family,
                    horizon,
                    n_paths,
                    ..common_patch(common)
                },
            ),
        },
        Cmd::Oracle { cmd } => match cmd {
            OracleCmd::TwoCoin { n, trunc, i, common } => (
                "oracle-two-coin",
                JobPatch {
                    n,
                    trunc,
                    i,
                    ..common_patch(common)
                },
            ),
            OracleCmd::BinaryPn { m, n, common } => (
                "oracle-binary-pn",
                JobPatch {
                    m,
                    n,
                    ..common_patch(common)
                },
            ),
        },
    }
}

fn mc_patch(args: McArgs) -> JobPatch {
    JobPatch {
        family: args.family,
        rule: args.rule,
        horizon: args.horizon,
        n_paths: args.n_paths,
        ..common_patch(args.common)
    }
}

fn try_main() -> Result<i32, CliError> {
    let cli = Cli::parse();
    let file_patch = cli.config.as_deref().map(JobPatch::from_file).transpose()?;
    let (command, flags) = to_patch(cli.command);
    let config = JobPatch::resolve(command, flags, file_patch)?;
    match cli.workers {
        None => run::run(&config),
        Some(workers) => {
            if workers == 0 {
                return Err(error::usage("--workers must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| error::usage(format!("cannot build worker pool: {e}")))?;
            pool.install(|| run::run(&config))
        }
    }
}

fn main() -> ExitCode {
    match try_main() {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(1)),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(u8::try_from(err.exit_code()).unwrap_or(1))
        }
    }
}
