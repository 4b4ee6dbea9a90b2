//! The `bhlab` command line.
//!
//! Exit codes: 0 when every check passed, 1 when a mathematical check
//! failed, 2 on usage or input errors.

mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Result;
use crate::norms::SearchConfig;
use crate::verify::PolynomialKind;

pub use manifest::{csv_document, json_document, jsonl_document, manifest_comment, RunManifest, Sink};

#[derive(Parser, Debug)]
#[command(name = "bhlab", version, about = "Numerical experiments on Bohnenblust-Hille type inequalities")]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism. Results do not
    /// depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for output files; printed to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base seed of every random choice.
    #[arg(long, global = true, env = "BHLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of the constants along the proof chain, with a crossover summary.
    Constants(ConstantsArgs),
    /// Convergence of the multinomial bound to `M^M`.
    Stirling(StirlingArgs),
    /// Check each step of the proof chain on given or generated polynomials.
    Verify(VerifyArgs),
    /// Search for a lower bound on the optimal constant.
    Search(SearchArgs),
    /// Growth of the best ratio with the number of variables.
    Probe(ProbeArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Stirling(_) => "stirling",
            Command::Verify(_) => "verify",
            Command::Search(_) => "search",
            Command::Probe(_) => "probe",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ConstantsArgs {
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub max_vars: u32,
    /// Inclusive range `a..b` (or a single `m`).
    #[arg(long = "m", default_value = "2..100")]
    pub m: String,
    #[arg(long, default_value_t = 1.0)]
    pub beta1: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct StirlingArgs {
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub max_vars: u32,
    #[arg(long = "m", value_delimiter = ',', default_value = "10,100,1000,2000,3000,10000")]
    pub m: Vec<u32>,
}

/// Knobs of the norm searches and the certified cover.
#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub step_tolerance: f64,
    #[arg(long, default_value_t = 64)]
    pub grid_resolution: usize,
    #[arg(long, default_value_t = 20_000)]
    pub max_cells: usize,
}

impl NormArgs {
    fn config(&self, seed: u64) -> SearchConfig {
        SearchConfig {
            starts: self.starts,
            max_iters: self.max_iters,
            step_tolerance: self.step_tolerance,
            grid_resolution: self.grid_resolution,
            max_cells: self.max_cells,
            seed,
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "generate"])))]
pub struct VerifyArgs {
    /// Polynomial JSON file: one polynomial object or an array of them.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generate `--count` random polynomials instead of reading a file.
    #[arg(long, value_enum, requires_all = ["m", "n"])]
    pub generate: Option<PolynomialKind>,
    #[arg(long = "m")]
    pub m: Option<u32>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub max_vars: u32,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Support density for `sparse-lambda`.
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    /// Comma-separated steps, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub steps: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub beta1: f64,
    /// Relative slack of the exactly computed steps.
    #[arg(long, default_value_t = crate::verify::EXACT_TOLERANCE)]
    pub tolerance: f64,
    /// Relative slack of the steps with an optimizer in the loop.
    #[arg(long, default_value_t = crate::verify::OPTIMIZER_TOLERANCE)]
    pub optimizer_tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[arg(long = "m")]
    pub m: u32,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub max_vars: u32,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ProbeArgs {
    #[arg(long = "m", default_value_t = 3)]
    pub m: u32,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub max_vars: u32,
    #[arg(long)]
    pub q: f64,
    #[arg(long = "n", value_delimiter = ',', default_value = "2,4,8,16")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 32)]
    pub budget: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
}

/// Whether every check of a run held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(Status::Passed) => 0,
        Ok(Status::Failed) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Status> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| crate::Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| {
        let sink = Sink::new(cli.out.clone())?;
        let ctx = commands::Context {
            seed: cli.seed,
            format: cli.format,
            sink: &sink,
            command: cli.command.name(),
        };
        match &cli.command {
            Command::Constants(a) => commands::constants(&ctx, a),
            Command::Stirling(a) => commands::stirling(&ctx, a),
            Command::Verify(a) => commands::verify(&ctx, a),
            Command::Search(a) => commands::search(&ctx, a),
            Command::Probe(a) => commands::probe(&ctx, a),
        }
    })
}
