use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kgflow", version, about = "Imaginary-time Lie series for Kähler geodesics on the flat torus")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Hamiltonian expression in x, y (e.g. "(1/8)*(sin(pi*x)^2+sin(pi*y)^2)^2").
    #[arg(long, global = true, conflicts_with = "hamiltonian_file")]
    pub hamiltonian: Option<String>,

    /// Read the Hamiltonian expression from a UTF-8 text file.
    #[arg(long, global = true, value_name = "PATH")]
    pub hamiltonian_file: Option<PathBuf>,

    /// Flat key=value file; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Truncation order N of the Lie series [default: 12].
    #[arg(long, global = true)]
    pub order: Option<usize>,

    /// Lattice size G [default: 50, or 200 for `critical`].
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Worker threads; falls back to KGF_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// rational (1/D) or polynomial (Σ a_k t^k) [default: rational].
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,

    /// |D| threshold for blow-up points [default: 1e-3].
    #[arg(long, global = true)]
    pub epsilon_blowup: Option<f64>,

    /// Logarithm base for the error indicator [default: e].
    #[arg(long, global = true)]
    pub log_base: Option<f64>,

    /// Output file, written atomically; standard output if absent.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rational,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Pos,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoordArg {
    Z,
    Zbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpandFormat {
    /// `m n re im pi_power` per Fourier term
    Terms,
    /// a cos/sin sum that parses back to the same polynomial
    Expression,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical Fourier form of H.
    Expand {
        #[arg(long, value_enum, default_value = "terms")]
        format: ExpandFormat,
    },
    /// Dump the Lie-series coefficients w_1..w_N.
    Series {
        #[arg(long, value_enum, default_value = "z")]
        coord: CoordArg,
    },
    /// CSV of the conformal factor on the lattice at one time.
    Field {
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
    },
    /// PGM sign map at one time, optionally mirrored as CSV.
    Signmap {
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Error indicator along the diagonal x = y ∈ [0, 0.5].
    Errmap {
        #[arg(long)]
        samples_s: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        t_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t_max: Option<f64>,
        #[arg(long)]
        samples_t: Option<usize>,
    },
    /// Print the first time at which the lattice field degenerates.
    Critical {
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        coarse_step: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Trajectory of the real-time flow from the numeric ODE integrator.
    Flow {
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand { .. } => "expand",
            Command::Series { .. } => "series",
            Command::Field { .. } => "field",
            Command::Signmap { .. } => "signmap",
            Command::Errmap { .. } => "errmap",
            Command::Critical { .. } => "critical",
            Command::Flow { .. } => "flow",
        }
    }
}
