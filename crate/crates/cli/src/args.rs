use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "qmotzkin", version, about = "Weighted Motzkin paths, boundary chains and their scaling limits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every path of length L from altitude --from to altitude --to
    /// with its weight and probability.
    Enumerate(Flags),
    /// Draw --count exact samples from the path measure of length L.
    Sample(Flags),
    /// Simulate --count trajectories of L steps of the boundary chain.
    Chain(Flags),
    /// Run the cross-identity checks; exits with status 1 if any fails.
    Verify(Flags),
    /// Local-limit error table over the N list.
    Locallimit(Flags),
    /// Special-function values at (q, x, y).
    Specialfn(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Enumerate(_) => "enumerate",
            Command::Sample(_) => "sample",
            Command::Chain(_) => "chain",
            Command::Verify(_) => "verify",
            Command::Locallimit(_) => "locallimit",
            Command::Specialfn(_) => "specialfn",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Enumerate(f)
            | Command::Sample(f)
            | Command::Chain(f)
            | Command::Verify(f)
            | Command::Locallimit(f)
            | Command::Specialfn(f) => f,
        }
    }
}

/// Every setting is optional here; unset ones fall back to the config file
/// and then to the defaults.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// key=value config file; '#' starts a comment
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Weight model: q or unit
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    #[arg(long)]
    pub rho1: Option<f64>,
    /// Boundary rate constant of the scaled initial laws
    #[arg(long)]
    pub c: Option<f64>,
    /// Path length, or number of chain steps
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Comma-separated scaling parameters
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    /// Number of marked steps at each end in the generating-function checks
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Start altitude for enumerate
    #[arg(long)]
    pub from: Option<usize>,
    /// End altitude for enumerate
    #[arg(long)]
    pub to: Option<usize>,
    /// Number of samples or trajectories
    #[arg(long)]
    pub count: Option<usize>,
    /// Chain side: x (left end) or y (right end)
    #[arg(long)]
    pub side: Option<String>,
    /// Local-limit regime: fixed-q or q-to-1
    #[arg(long)]
    pub regime: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tail tolerance for boundary truncation
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Perturb sigma on one side of the first verify cross-check
    #[arg(long)]
    pub inject_fault: bool,
}
