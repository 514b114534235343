//! `normwalk` command-line tool.
//!
//! Exit status: 0 success, 1 a property was falsified (the computation itself
//! succeeded), 2 usage or input error, 3 resource cap hit.

mod commands;
mod support;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "normwalk", version, about = "Normality checks, quantum jumps and random generation of lattice polytopes")]
pub struct Cli {
    /// Output format; CSV is available for `jumps` and `survey`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for parallel checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Write the main output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normality battery for one polytope.
    Check(CheckArgs),
    /// Quantum jumps up (or down) from a polytope.
    Jumps(JumpsArgs),
    /// Walk upward through the poset of integrally closed polytopes.
    Walk(WalkArgs),
    /// All integrally closed polytopes in a box, with Hasse diagram and homology.
    Atlas(AtlasArgs),
    /// Generate polytopes from a bit stream.
    Gen(GenArgs),
    /// Generate polytopes and count normal, minimal and maximal ones.
    Survey(SurveyArgs),
    /// Pyramidal extensions and chains of rational polytopes.
    Pyramid(PyramidArgs),
}

#[derive(Args, Debug, Default)]
pub struct BitArgs {
    /// Raw bit file, read most-significant bit first.
    #[arg(long, conflicts_with_all = ["os_entropy", "fetch"])]
    pub bits: Option<PathBuf>,

    /// Draw this many bytes from the operating system.
    #[arg(long, value_name = "NBYTES", conflicts_with = "fetch")]
    pub os_entropy: Option<usize>,

    /// Where to dump OS entropy for replay.
    #[arg(long, requires = "os_entropy")]
    pub dump: Option<PathBuf>,

    /// Fetch raw bytes over HTTP.
    #[arg(long, value_name = "URL")]
    pub fetch: Option<String>,

    /// Cache file for fetched bytes.
    #[arg(long, requires = "fetch", default_value = "normwalk-fetch.bin")]
    pub cache: PathBuf,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Polytope JSON: {"dim": d, "vertices": [[..], ..]}.
    pub polytope: PathBuf,

    /// Run the bounded integral Carathéodory check with this many summands.
    #[arg(long, requires = "icp_cmax")]
    pub icp_r: Option<usize>,

    /// Largest dilation for the Carathéodory checks.
    #[arg(long)]
    pub icp_cmax: Option<u64>,

    /// Also report Carathéodory rank bounds (uses --icp-cmax).
    #[arg(long, requires = "icp_cmax")]
    pub cr: bool,

    /// Sample points for the unimodular cover test.
    #[arg(long)]
    pub ucp_trials: Option<u64>,

    /// Bit file for random cover-test samples.
    #[arg(long, requires = "ucp_trials")]
    pub seed_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct JumpsArgs {
    pub polytope: PathBuf,

    /// Search heights up to this value instead of the proven bound.
    #[arg(long)]
    pub max_height: Option<u64>,

    /// List the lattice points whose removal is a jump down.
    #[arg(long)]
    pub down: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Greedy,
    Random,
}

#[derive(Args, Debug)]
pub struct WalkArgs {
    pub polytope: PathBuf,

    #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
    pub strategy: StrategyArg,

    /// Maximum number of steps.
    #[arg(long, default_value_t = 10)]
    pub budget: usize,

    /// Exponent `s` of the partial zeta sums.
    #[arg(long, default_value_t = 1)]
    pub zeta_s: u32,

    #[command(flatten)]
    pub source: BitArgs,
}

#[derive(Args, Debug)]
pub struct AtlasArgs {
    #[arg(long)]
    pub dim: usize,

    /// Box side: [0, r]^d, or [-r, r]^d with --centered.
    #[arg(long)]
    pub radius: i64,

    #[arg(long)]
    pub centered: bool,

    /// Maximum number of convex lattice sets visited.
    #[arg(long, default_value_t = 20_000)]
    pub element_cap: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub dim: u64,

    #[arg(long, default_value_t = 1)]
    pub n_start: u64,

    #[arg(long)]
    pub n_end: Option<u64>,

    /// Points per polytope (`v`).
    #[arg(long, default_value_t = 4)]
    pub max_vertices: u64,

    /// Exponent `c` in `φ(n) = (n·d·v)^c`.
    #[arg(long, default_value_t = 1)]
    pub c_exponent: u32,

    /// Generate hexagon-type polytopes in dimension `dim + 1` instead.
    #[arg(long)]
    pub hexagon: bool,

    /// Number of hexagon-type polytopes.
    #[arg(long, default_value_t = 1, requires = "hexagon")]
    pub count: usize,

    /// Bound `A` on the exponents, `|a_k| <= A`.
    #[arg(long, default_value_t = 3, requires = "hexagon")]
    pub a_bound: u64,

    /// Draw the elementary positions from the bit stream too.
    #[arg(long, requires = "hexagon")]
    pub random_positions: bool,

    #[command(flatten)]
    pub source: BitArgs,
}

#[derive(Args, Debug)]
pub struct SurveyArgs {
    #[command(flatten)]
    pub gen: GenArgs,

    /// Comma-separated subset of normal,minimal,maximal.
    #[arg(long, default_value = "normal,minimal,maximal")]
    pub checks: String,

    /// With --format csv, also write the JSON summary here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct PyramidMode {
    /// Is Q a pyramidal extension of P?
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    pub check_extension: Option<Vec<PathBuf>>,

    /// Search for a pyramidal chain from P to Q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    pub search_chain: Option<Vec<PathBuf>>,
}

#[derive(Args, Debug)]
pub struct PyramidArgs {
    #[command(flatten)]
    pub mode: PyramidMode,

    /// Step budget for --search-chain.
    #[arg(long, default_value_t = 64)]
    pub budget: usize,

    /// Decimal digits in distance enclosures.
    #[arg(long, default_value_t = 12)]
    pub digits: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(support::exit_code(&e))
        }
    }
}
