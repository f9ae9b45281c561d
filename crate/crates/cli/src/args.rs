use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gl2lab::sampling::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "gl2lab", version, about = "Exact verification campaigns for level-p^n test functions on GL(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every sampled campaign.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Record wall-clock time in the report (the output is then no longer byte-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate the level-n test function (or its t-deformation) at a matrix.
    EvalPhi(EvalPhiArgs),
    /// Orbital ratio of the level-n test function against the level-0 one, shell by shell.
    TreeOrbital(TreeOrbitalArgs),
    /// Stabilized vertices of one matrix, or the nearest-vertex campaign over random probes.
    TreeFixedSet(TreeFixedSetArgs),
    /// Classes, principal-series characters and the surjection permutation character.
    CharTable(LevelArgs),
    /// Semisimple trace at a point by characters and by fixed points.
    SsTrace(SsTraceArgs),
    /// σ-conjugacy classes against conjugacy classes through the norm map.
    VerifyNorm(GaloisArgs),
    /// Exactness of the unit-group sequence on sampled elements.
    VerifyExactSeq(ExactSeqArgs),
    /// Base change of the unit element between congruence levels.
    VerifyBcUnit(BcUnitArgs),
    /// The deformed tower identity and its specialization.
    VerifyTower(TowerArgs),
    /// Commutation of the test function with double-coset generators.
    VerifyCentral(CentralArgs),
    /// Orbital ratios against the closed form on sampled semisimple elements.
    VerifyOrbital(OrbitalArgs),
    /// Closed-form orbital constants against the character formula.
    VerifyCr(CrossArgs),
    /// Elliptic curves over F_q with level-m structure and semisimple traces.
    Census(CensusArgs),
    /// Boundary contribution by formula and by orbit enumeration.
    Boundary(BoundaryArgs),
    /// Run every acceptance campaign at its reference parameters.
    ReportAll,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalPhiArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long)]
    pub n: u32,
    /// Matrix as `p^e * [[a,b],[c,d]]`; Galois-ring entries as `(c0,c1,...)`.
    #[arg(long)]
    pub gamma: String,
    /// Evaluate the t-deformation instead.
    #[arg(long)]
    pub deformed: bool,
    /// Working precision; defaults to 2n + 8.
    #[arg(long)]
    pub precision: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct TreeOrbitalArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub gamma: String,
    /// Working precision; defaults to 6n + 14.
    #[arg(long)]
    pub precision: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct TreeFixedSetArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Matrix to inspect; without it, random conjugated probes are checked.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Search radius around the standard vertex; defaults to max(k, 0) + 1.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Number of random probes in campaign mode.
    #[arg(long, default_value_t = 100)]
    pub probes: usize,
    #[arg(long, default_value_t = 16)]
    pub precision: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct LevelArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Ordinary,
    Supersingular,
}

#[derive(Debug, Args, Serialize)]
pub struct SsTraceArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    /// Degree of the residue field of the point.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Unit eigenvalue modulo p^n, for ordinary points.
    #[arg(long)]
    pub a: Option<u64>,
    /// Class function: `identity`, `trivial`, `steinberg` or `class:<index>`.
    #[arg(long, default_value = "identity")]
    pub function: String,
}

#[derive(Debug, Args, Serialize)]
pub struct GaloisArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct ExactSeqArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub galois: GaloisArgs,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BcUnitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub galois: GaloisArgs,
    /// Coarser congruence level `k <= n`.
    #[arg(long)]
    pub k: u32,
    /// Class functions: `identity`, `trivial`, `steinberg` or `class:<index>`.
    #[arg(long = "function", default_values_t = ["identity".to_string(), "steinberg".to_string(), "class:1".to_string()])]
    pub functions: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct TowerArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CentralArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: u32,
    /// Use the first k of: Weyl element, diag(p,1), diag(1,p), unipotent.
    #[arg(long, default_value_t = 4)]
    pub generators: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitalArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CrossArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub m: u64,
    /// Level p^n of the semisimple trace; 0 counts points.
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Must match q = p^r when given.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u64,
}
