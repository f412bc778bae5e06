use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "ffprog", version, about = "Experiments on polynomial progressions over finite fields")]
#[command(args_override_self = true)]
pub struct Cli {
    /// JSON object of flags (plus an optional "command"); command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads. Falls back to FFPROG_JOBS, then to all logical cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Master seed; generated and recorded when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON-lines output file (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// CSV export of the command's table.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Write 0 for every wall-clock field so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Progression count, main term and error for one set.
    Count(CountArgs),
    /// Gowers norms of one function.
    Norms(NormsArgs),
    /// Maximal normalized character sums over a range of primes.
    WeilScan(WeilScanArgs),
    /// Error of the single-polynomial twisted average over a range of primes.
    BaseScan(BaseScanArgs),
    /// Largest progression-free sets.
    Extremal(ExtremalArgs),
    /// Structured plus uniform decomposition of one function.
    Decompose(DecomposeArgs),
    /// Delta schedule, exponent signs and the bound recursion.
    Schedule(ScheduleArgs),
    /// Cauchy-Schwarz reduction to averaged U^2 norms.
    CsCheck(CsCheckArgs),
    /// Empirical error exponents of the counting theorem.
    VerifyTheorem(VerifyTheoremArgs),
    /// Runs the acceptance criteria.
    Acceptance(AcceptanceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::Norms(_) => "norms",
            Command::WeilScan(_) => "weil-scan",
            Command::BaseScan(_) => "base-scan",
            Command::Extremal(_) => "extremal",
            Command::Decompose(_) => "decompose",
            Command::Schedule(_) => "schedule",
            Command::CsCheck(_) => "cs-check",
            Command::VerifyTheorem(_) => "verify-theorem",
            Command::Acceptance(_) => "acceptance",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    pub p: Option<u64>,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Monic irreducible modulus, constant term first (e.g. "2,0,1").
    #[arg(long)]
    pub modulus: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Progression polynomials, comma separated.
    #[arg(long, default_value = "y,y^2")]
    pub polys: String,
    /// Twisting polynomials Q_j.
    #[arg(long, default_value = "")]
    pub twists: String,
    /// Character index for each twisting polynomial.
    #[arg(long, default_value = "")]
    pub psi: String,
    /// file:PATH, random:DENSITY[:seedN], explicit:0,1,3, full or empty.
    #[arg(long, default_value = "random:0.5")]
    pub set: String,
    /// Which y the count ranges over: all or nonzero.
    #[arg(long, default_value = "all")]
    pub y_rule: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NormsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Function JSON file; the field is taken from the file.
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// Use the indicator of this set instead.
    #[arg(long)]
    pub set: Option<String>,
    /// Norm indices.
    #[arg(long, default_value = "1,2,3")]
    pub s: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeilScanArgs {
    #[arg(long, default_value_t = 5)]
    pub pmin: u64,
    #[arg(long, default_value_t = 199)]
    pub pmax: u64,
    /// Explicit prime list; overrides the range.
    #[arg(long)]
    pub primes: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value = "y^3")]
    pub poly: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BaseScanArgs {
    #[arg(long, default_value_t = 11)]
    pub pmin: u64,
    #[arg(long, default_value_t = 101)]
    pub pmax: u64,
    #[arg(long)]
    pub primes: Option<String>,
    #[arg(long, default_value = "y")]
    pub p1: String,
    #[arg(long, default_value = "y^2")]
    pub twists: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExtremalArgs {
    #[arg(long, default_value = "y,2y")]
    pub polys: String,
    #[arg(long, default_value_t = 5)]
    pub pmin: u64,
    #[arg(long, default_value_t = 31)]
    pub pmax: u64,
    #[arg(long)]
    pub primes: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Branch-and-bound node budget; exceeding it marks the result inexact.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub node_budget: u64,
    #[arg(long, default_value = "nonzero")]
    pub y_rule: String,
    /// paper-literal or distinct-points.
    #[arg(long, default_value = "paper-literal")]
    pub degeneracy: String,
    /// Random greedy restarts used when the exact search runs out of budget.
    #[arg(long, default_value_t = 0)]
    pub random_iters: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// Decompose the indicator of this set instead.
    #[arg(long)]
    pub set: Option<String>,
    /// Subtract the mean of the set indicator.
    #[arg(long)]
    pub balanced: bool,
    /// Schedule parameters for the s = 2 budget.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Explicit "d1,d2,d3,d4"; overrides the schedule.
    #[arg(long)]
    pub deltas: Option<String>,
    /// Random test functions per certified candidate.
    #[arg(long, default_value_t = 1000)]
    pub adversarial_samples: usize,
    /// Directory for fa.json, fb.json and fc.json.
    #[arg(long)]
    pub parts_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScheduleArgs {
    #[arg(long, default_value_t = 4)]
    pub s: u32,
    #[arg(long, default_value_t = 0.25)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1e8)]
    pub q: f64,
    /// Exponent of the lower-level bound (defaults to gamma).
    #[arg(long)]
    pub gamma_prime: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub c2_prime: f64,
    /// Also write the bare schedule JSON here.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CsCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 3)]
    pub s: u32,
    /// Number of two-variable functions in the product.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyTheoremArgs {
    #[arg(long, default_value = "y,y^2")]
    pub polys: String,
    #[arg(long, default_value = "")]
    pub twists: String,
    /// Characters for the twists (default: all trivial).
    #[arg(long, default_value = "")]
    pub psi: String,
    #[arg(long, default_value_t = 31)]
    pub pmin: u64,
    #[arg(long, default_value_t = 499)]
    pub pmax: u64,
    #[arg(long)]
    pub primes: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Warn instead of failing when a prime is below the system threshold.
    #[arg(long)]
    pub allow_below_threshold: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AcceptanceArgs {
    /// Criterion numbers to run (default: all).
    #[arg(long)]
    pub only: Option<String>,
}
