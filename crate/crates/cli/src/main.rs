use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod benchmark;
mod calibrate;
mod common;
mod explain;
mod train;
mod verify;

/// Exit code for unreadable or malformed inputs and bad arguments.
pub const EXIT_INPUT: u8 = 2;
/// Exit code when explanations disagree with the exhaustive oracle.
pub const EXIT_VERIFY: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Verification(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Parser, Debug)]
#[command(name = "minxp", version, about = "Minimum-size explanations for linear classifiers with a reject option")]
struct Cli {
    /// Tolerance for every threshold comparison.
    #[arg(long, global = true, env = "MINXP_EPSILON", default_value_t = minxp::DEFAULT_TOLERANCE)]
    epsilon: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Delimiter-separated dataset with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Label column: "last", a zero-based index, or a header name.
    #[arg(long, default_value = "last")]
    pub label_col: String,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Seed of the stratified train/test split.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitArg {
    Train,
    Test,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Minabro,
    Baseline,
    Both,
}

impl MethodArg {
    pub fn methods(self) -> Vec<minxp::Method> {
        match self {
            MethodArg::Minabro => vec![minxp::Method::Minabro],
            MethodArg::Baseline => vec![minxp::Method::Baseline],
            MethodArg::Both => vec![minxp::Method::Minabro, minxp::Method::Baseline],
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a logistic-regression scorer on the training split.
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// Keep raw feature values instead of min-max scaling to [0, 1].
        #[arg(long)]
        no_scale: bool,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        #[arg(long)]
        out_model: PathBuf,
    },
    /// Fit rejection thresholds by empirical risk minimization.
    Calibrate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Rejection cost, in (0, 1].
        #[arg(long, default_value_t = 0.24)]
        wr: f64,
        #[arg(long, value_enum, default_value_t = SplitArg::Train)]
        split: SplitArg,
        #[arg(long)]
        out_model: PathBuf,
    },
    /// Explain every selected instance and write a report.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, required_unless_present = "instance_json")]
        data: Option<PathBuf>,
        /// JSON array (or array of arrays) of raw feature values, inline or as a file path.
        #[arg(long, conflicts_with = "data")]
        instance_json: Option<String>,
        #[arg(long, default_value = "last")]
        label_col: String,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        train_fraction: f64,
        #[arg(long, value_enum, default_value_t = SplitArg::Test)]
        split: SplitArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Minabro)]
        method: MethodArg,
        #[arg(long, default_value_t = 10_000_000)]
        node_limit: u64,
        /// Per-instance solver wall-clock limit in seconds.
        #[arg(long, default_value_t = 30.0)]
        time_limit: f64,
        /// Explain at most this many instances.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out_report: PathBuf,
    },
    /// Compare explanation sizes with exhaustive search.
    Verify {
        #[arg(long, requires = "data")]
        model: Option<PathBuf>,
        #[arg(long, requires = "model")]
        data: Option<PathBuf>,
        #[arg(long, default_value = "last")]
        label_col: String,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Deliberately corrupt explanations to exercise the failure path.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Time explanations over repeated runs.
    Benchmark {
        #[arg(long, requires = "data")]
        model: Option<PathBuf>,
        #[arg(long, requires = "model")]
        data: Option<PathBuf>,
        #[arg(long, default_value = "last")]
        label_col: String,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        train_fraction: f64,
        #[arg(long, value_enum, default_value_t = SplitArg::Test)]
        split: SplitArg,
        /// Benchmark a random model with this many features instead of a dataset.
        #[arg(long, conflicts_with = "model")]
        synthetic_n: Option<usize>,
        #[arg(long, default_value_t = 50)]
        synthetic_count: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 10_000_000)]
        node_limit: u64,
        #[arg(long, default_value_t = 30.0)]
        time_limit: f64,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out_report: PathBuf,
    },
}

fn run(cli: Cli) -> CmdResult {
    let eps = cli.epsilon;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Failure::Input(anyhow::anyhow!(
            "epsilon must be finite and non-negative"
        )));
    }
    match cli.command {
        Command::Train {
            data,
            no_scale,
            max_iterations,
            out_model,
        } => train::run(&data, !no_scale, max_iterations, &out_model),
        Command::Calibrate {
            model,
            data,
            wr,
            split,
            out_model,
        } => calibrate::run(&model, &data, wr, split, &out_model),
        Command::Explain {
            model,
            data,
            instance_json,
            label_col,
            delimiter,
            seed,
            train_fraction,
            split,
            method,
            node_limit,
            time_limit,
            limit,
            out_report,
        } => {
            let source = match (data, instance_json) {
                (Some(path), _) => common::InstanceSource::Data {
                    data: DataArgs {
                        data: path,
                        label_col,
                        delimiter,
                        seed,
                        train_fraction,
                    },
                    split,
                },
                (None, Some(json)) => common::InstanceSource::Json(json),
                (None, None) => unreachable!("clap requires one source"),
            };
            explain::run(explain::Options {
                model: &model,
                source,
                methods: method.methods(),
                budget: common::budget(node_limit, time_limit)?,
                limit,
                epsilon: eps,
                out_report: &out_report,
            })
        }
        Command::Verify {
            model,
            data,
            label_col,
            delimiter,
            max_n,
            cases,
            seed,
            inject_fault,
        } => verify::run(verify::Options {
            dataset: model.zip(data).map(|(model, data)| {
                (
                    model,
                    DataArgs {
                        data,
                        label_col,
                        delimiter,
                        seed,
                        train_fraction: 0.7,
                    },
                )
            }),
            max_n,
            cases,
            seed,
            epsilon: eps,
            inject_fault,
        }),
        Command::Benchmark {
            model,
            data,
            label_col,
            delimiter,
            seed,
            train_fraction,
            split,
            synthetic_n,
            synthetic_count,
            method,
            repeats,
            node_limit,
            time_limit,
            limit,
            out_report,
        } => {
            let source = match (model.zip(data), synthetic_n) {
                (Some((model, data)), _) => benchmark::Source::Dataset {
                    model,
                    data: DataArgs {
                        data,
                        label_col,
                        delimiter,
                        seed,
                        train_fraction,
                    },
                    split,
                },
                (None, Some(n)) => benchmark::Source::Synthetic {
                    n,
                    count: synthetic_count,
                    seed,
                },
                (None, None) => {
                    return Err(Failure::Input(anyhow::anyhow!(
                        "benchmark needs --model and --data, or --synthetic-n"
                    )))
                }
            };
            benchmark::run(benchmark::Options {
                source,
                methods: method.methods(),
                repeats,
                budget: common::budget(node_limit, time_limit)?,
                limit,
                epsilon: eps,
                out_report: &out_report,
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
