//! `entmix`: batch reports on mixture entropies, divergences and deficit
//! bounds.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{render, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "entmix", version, about = "Entropy of mixtures: oracles, divergences and deficit bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (sweep defaults to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,

    /// Display information quantities in bits. Computation stays in nats.
    #[arg(long, global = true)]
    pub bits: bool,

    /// Monte Carlo seed (used for d > 2 or with --backend monte-carlo).
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,

    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 200_000)]
    pub samples: u64,

    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,

    /// Absolute and relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Subdivision budget of the adaptive quadrature.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Auto,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Mixture model JSON file.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long = "N", default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.3)]
    pub sigma: f64,
    /// Evaluate the H(X|Z) oracle: auto does so for N <= 200.
    #[arg(long, value_enum, default_value_t = OracleMode::Auto)]
    pub oracle: OracleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Auto,
    Always,
    Never,
}

#[derive(Debug, Args)]
pub struct WellArgs {
    /// Well half-separation.
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p1: f64,
    #[arg(long = "kBT", default_value_t = 1.0)]
    pub kbt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "N")]
    N,
    Lambda,
    Sigma,
    /// Landauer well separation.
    A,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Differential entropy h(f) of the model.
    Entropy(ModelArg),
    /// Concavity deficit by the oracle with its upper and lower bounds.
    Deficit {
        #[command(flatten)]
        model: ModelArg,
        /// Separation scale for the lower bound; the default certifies the
        /// largest λ with M = 1.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Divergences between two densities over a grid of skew parameters.
    Divergence {
        #[command(flatten)]
        model: ModelArg,
        /// Second density. Without it the first two components of --model are compared.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Comma list `0.2,0.5` or range `start:stop:count`.
        #[arg(long, default_value = "0.1:0.9:9")]
        t: String,
    },
    /// Every bound report that applies to the model.
    Bounds {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// H(X|Z) bounds for N equiprobable points 2λ apart under N(0, σ²) noise.
    Channel(GridArgs),
    /// Heat band for resetting a bit stored in a Gaussian double well.
    Landauer {
        #[command(flatten)]
        well: WellArgs,
        #[arg(long)]
        no_oracle: bool,
    },
    /// Varies one parameter over a range and tabulates the channel or Landauer report.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Fixed values of the other parameters. A sweep over `a` erases a
        /// random bit with well width --sigma.
        #[command(flatten)]
        grid: GridArgs,
    },
}

/// Why a command stopped, with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub status: u8,
    pub message: String,
    pub detail: Value,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure { kind: "parse", status: 2, message: message.into(), detail: Value::Null }
    }
}

impl From<entmix::Error> for Failure {
    fn from(e: entmix::Error) -> Self {
        use entmix::Error as E;
        let message = e.to_string();
        let (kind, status, detail) = match &e {
            E::Input(_) | E::Dimension { .. } => ("input", 2, Value::Null),
            E::NonConvergence { estimate, error, .. } => {
                ("non_convergence", 3, json!({"estimate": estimate, "error": error}))
            }
            E::NonFiniteIntegrand { at } => ("non_finite_integrand", 3, json!({"at": at})),
            E::PoisonedSample { index } => ("poisoned_sample", 3, json!({"index": index})),
            E::InternalConsistency(_) => ("internal_consistency", 3, Value::Null),
            E::Unsupported(_) | E::UndefinedComplement => ("unsupported", 1, Value::Null),
        };
        Failure { kind, status, message, detail }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let f = Failure::parse(e.kind().to_string());
            println!("{}", serde_json::to_string(&json!({"error": error_object(&f)})).unwrap());
            return ExitCode::from(f.status);
        }
    };
    let format = cli.output.unwrap_or(match cli.command {
        Command::Sweep { .. } => Format::Csv,
        _ => Format::Json,
    });
    let mut report = Report::new(commands::name(&cli.command), cli.bits);
    match commands::run(&cli, &mut report) {
        Ok(Some(table)) if format == Format::Csv => {
            print!("{table}");
            ExitCode::SUCCESS
        }
        Ok(_) => {
            print!("{}", render(&report.into_value(), format));
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("entmix: {}", f.message);
            let status = f.status;
            report.put("error", error_object(&f));
            // Partial reports are always JSON so the error object survives.
            print!("{}", render(&report.into_value(), Format::Json));
            ExitCode::from(status)
        }
    }
}

fn error_object(f: &Failure) -> Value {
    json!({"kind": f.kind, "status": f.status, "message": f.message, "detail": f.detail})
}
