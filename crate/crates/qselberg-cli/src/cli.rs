//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qselberg",
    version,
    about = "R-matrices, connection data and identity checks for symmetric Selberg-type Jackson integrals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a closed-form or limit matrix together with its factors.
    Matrix {
        #[arg(value_enum)]
        kind: MatrixKind,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a verification suite and emit one report per check.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    R21,
    R12,
    K,
    K1,
    K2,
    A,
    CPlus,
    CMinus,
    HLimits,
    Ck,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    All,
    Rmatrix,
    Qkz,
    Alpha,
    Limits,
    Lemmas,
    Kadell,
    Exactness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Rank one with seeded generic characters.
    #[value(name = "paper-10-1")]
    Paper101,
    /// Rank two with seeded generic characters.
    #[value(name = "paper-10-2")]
    Paper102,
    /// Rank two with `w b1 c / b2 = 1`, violating genericity.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand. Complex values are `re,im` or a
/// bare real part.
#[derive(Debug, Clone, Args)]
pub struct CommonOpts {
    /// Rank n ≥ 1.
    #[arg(long)]
    pub n: Option<usize>,
    /// Base q with 0 < |q| < 1.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Character a = q^α̃.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Character b1 = q^β₁.
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<String>,
    /// Character b2 = q^β₂.
    #[arg(long, allow_hyphen_values = true)]
    pub b2: Option<String>,
    /// Character c = q^γ.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Exponent α̃.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Exponent β₁.
    #[arg(long, allow_hyphen_values = true)]
    pub beta1: Option<String>,
    /// Exponent β₂.
    #[arg(long, allow_hyphen_values = true)]
    pub beta2: Option<String>,
    /// Exponent γ.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Point x1.
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<String>,
    /// Point x2.
    #[arg(long, allow_hyphen_values = true)]
    pub x2: Option<String>,
    /// Truncation radius of lattice sums.
    #[arg(long = "N")]
    pub n_max: Option<usize>,
    /// Sample bound: largest k of the lemma sweep, largest rank of the
    /// Kadell sweep.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Override the suite tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed of every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random parameter draws.
    #[arg(long, default_value_t = 20)]
    pub draws: usize,
    /// Named parameter set.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Parameter set as a JSON file.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
