use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Closed-form solver for sequential linear conformable fractional ODEs with
/// constant coefficients.
#[derive(Debug, Parser)]
#[command(name = "cfde", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the homogeneous basis, the particular solution and, with --ic,
    /// the fitted constants.
    Solve(Common),
    /// Check a solution against the numeric conformable derivative on a grid.
    Verify(VerifyArgs),
    /// Evaluate the solution at evenly spaced t and write CSV.
    Sample(Common),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,

    /// Solution document written by `solve --json` (`-` for stdin). Without
    /// it the equation is solved first.
    #[arg(long, value_name = "PATH")]
    pub solution: Option<String>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Equation, e.g. "T2 y + 4 T y + 3 y = exp(2 t^a)".
    #[arg(value_name = "EQUATION", conflicts_with = "file")]
    pub equation: Option<String>,

    /// Read the equation from a file.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,

    /// Fractional order α in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Several α values, solved independently.
    #[arg(
        long,
        value_name = "A,B,...",
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "alpha"
    )]
    pub alpha_list: Option<Vec<f64>>,

    /// Machine-readable output on stdout, and errors as JSON on stderr.
    #[arg(long)]
    pub json: bool,

    /// Initial values y(t0), T y(t0), ..., one per basis element.
    #[arg(long, value_name = "T0:V0,V1,...", allow_hyphen_values = true)]
    pub ic: Option<String>,

    /// Constants c1,...,cn of the basis combination (default all 1).
    #[arg(
        long,
        value_name = "C1,C2,...",
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "ic"
    )]
    pub constants: Option<Vec<f64>>,

    /// Sampling or verification range.
    #[arg(long, value_name = "LO:HI:N", allow_hyphen_values = true)]
    pub range: Option<String>,

    /// Relative residual tolerance for verify.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    /// CSV columns written by sample.
    #[arg(long, value_enum, default_value_t = Columns::Basic)]
    pub columns: Columns,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Columns {
    Basic,
    Full,
}
