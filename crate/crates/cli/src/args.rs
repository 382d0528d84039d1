use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rlspec_core::numfun::DEFAULT_RAYS;
use rlspec_core::spectrum::{IMAG_TOL, RESIDUAL_TOL};

/// Spectral analysis of real linear operators z -> Cz + B conj(z).
#[derive(Debug, Parser)]
#[command(name = "rlspec", version)]
pub struct Cli {
    /// Print errors to stderr as a JSON object.
    #[arg(long, global = true)]
    pub error_json: bool,

    /// Seed for sampled consistency checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Norms, det of the complexification, coefficient eigenvalues and certificates.
    Info(InfoArgs),
    /// Coefficient matrix H of the characteristic polynomial and its SOS forms.
    Charpoly(CharpolyArgs),
    /// Spectrum as a point cloud from a sweep of rays through the origin.
    Spectrum(SpectrumArgs),
    /// Range of the numerical function against the field of values of H.
    Numfun(NumfunArgs),
    /// Operator JSON for the n x n truncation of a symbol.
    Friedrichs(FriedrichsArgs),
    /// Characteristic function table over a grid for growing truncations.
    Phi(PhiArgs),
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Operator JSON file.
    pub operator: PathBuf,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Number of random points for the SOS reconstruction check.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct CharpolyArgs {
    pub operator: PathBuf,
    /// Use the minor-expansion oracle instead of interpolation.
    #[arg(long)]
    pub exact: bool,
    /// Coefficient matrix JSON output (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Eigen SOS decomposition JSON output.
    #[arg(long)]
    pub sos: Option<PathBuf>,
    /// Cholesky SOS JSON output; fails with exit code 3 unless H is positive definite.
    #[arg(long)]
    pub cholesky: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub operator: PathBuf,
    /// Number of rays over [0, 2pi).
    #[arg(long, default_value_t = 128)]
    pub rays: usize,
    /// Largest accepted imaginary part of a ray eigenvalue.
    #[arg(long, default_value_t = IMAG_TOL)]
    pub tol: f64,
    /// Largest accepted normalized characteristic polynomial residual.
    #[arg(long, default_value_t = RESIDUAL_TOL)]
    pub residual_tol: f64,
    /// CSV output (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG scatter plot output.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NumfunArgs {
    pub operator: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RAYS)]
    pub rays: usize,
    /// Report JSON output (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-ray minima CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Compute H with the minor-expansion oracle.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct FriedrichsArgs {
    /// Symbol JSON file.
    #[arg(long)]
    pub symbol: PathBuf,
    /// Truncation size.
    #[arg(long)]
    pub n: usize,
    /// Operator JSON output (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(long)]
    pub symbol: PathBuf,
    /// Largest truncation size; sizes used are the powers of two below it and nmax itself.
    #[arg(long)]
    pub nmax: usize,
    /// Grid as polar:RMIN:RMAX:NR:NTHETA.
    #[arg(long)]
    pub grid: Option<String>,
    /// Excluded disk radius around the origin (default 0.1 times the symbol scale).
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// CSV output (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
