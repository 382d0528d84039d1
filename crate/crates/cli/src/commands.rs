use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlspec_core::charpoly::{
    charpoly_eval, cholesky_sos, coeff_matrix, emptiness_certificates, sos_decompose, CoeffMatrix, CoeffMode,
};
use rlspec_core::format::{fmt_f64, to_json_string};
use rlspec_core::numfun::range_and_coverage;
use rlspec_core::spectrum::{no_eigenvalue_certificate, spectrum_sweep};
use rlspec_core::traceclass::{phi_converge, SymbolJson, SymbolSeries, DEFAULT_LAMBDA_MIN_FACTOR};
use rlspec_core::RealLinearOperator;
use serde::Serialize;

use crate::args::{CharpolyArgs, FriedrichsArgs, InfoArgs, NumfunArgs, PhiArgs, SpectrumArgs};
use crate::error::CliError;
use crate::svg;

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes to `path`, or to stdout when `path` is `None`.
fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    to_json_string(value).expect("report types serialize")
}

pub fn load_operator(path: &Path) -> Result<RealLinearOperator> {
    RealLinearOperator::from_json_str(&read(path)?).map_err(|e| CliError::from_operator_parse(path.to_path_buf(), e))
}

pub fn load_symbol(path: &Path) -> Result<SymbolSeries> {
    let raw: SymbolJson = serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(SymbolSeries::try_from(raw)?)
}

fn coefficients(op: &RealLinearOperator, exact: bool) -> Result<CoeffMatrix> {
    let mode = if exact { CoeffMode::Exact } else { CoeffMode::Interpolation };
    Ok(coeff_matrix(op, mode)?)
}

#[derive(Debug, Serialize)]
struct SampledCheck {
    seed: u64,
    samples: usize,
    /// Largest `|Σ d_i |p_i|² − p| / (1 + |λ|)^{2n}` over the samples.
    max_sos_error: f64,
}

#[derive(Debug, Serialize)]
struct InfoReport {
    n: usize,
    operator_norm: f64,
    min_modulus: f64,
    schatten_1: f64,
    schatten_2: f64,
    det_complexification: f64,
    h_eigenvalues: Vec<f64>,
    classification: &'static str,
    spectrum: &'static str,
    real_axis_zero: Option<f64>,
    no_eigenvalue_margin: f64,
    sampled_check: SampledCheck,
}

fn classify(eig: &[f64]) -> &'static str {
    let norm = eig.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let tol = rlspec_core::charpoly::PD_THRESHOLD * norm;
    let min = eig[0];
    let max = *eig.last().expect("nonempty");
    if min > tol {
        "positive definite"
    } else if min >= -tol {
        "positive semidefinite"
    } else if max > tol {
        "indefinite"
    } else {
        "negative semidefinite"
    }
}

pub fn info(args: &InfoArgs, seed: u64) -> Result<()> {
    let op = load_operator(&args.operator)?;
    let n = op.dim();
    let h = coefficients(&op, false)?;
    let eig = h.eigenvalues();
    let cert = emptiness_certificates(&op)?;
    let no_eig = no_eigenvalue_certificate(&op);
    let spectrum = match (cert.spectrum_empty(), no_eig.certified) {
        (Some(true), _) | (_, true) => "empty",
        (Some(false), _) => "nonempty",
        (None, false) => "inconclusive",
    };

    let sos = sos_decompose(&h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 2.0 * (1.0 + op.operator_norm());
    let mut max_sos_error = 0.0f64;
    for _ in 0..args.samples {
        let lambda = Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let scale = (1.0 + lambda.norm()).powi(2 * n as i32);
        max_sos_error = max_sos_error.max((sos.eval(lambda) - charpoly_eval(&op, lambda)).abs() / scale);
    }

    let report = InfoReport {
        n,
        operator_norm: op.operator_norm(),
        min_modulus: op.min_modulus(),
        schatten_1: op.schatten_norm(1.0)?,
        schatten_2: op.schatten_norm(2.0)?,
        det_complexification: cert.det_complexification,
        classification: classify(&eig),
        h_eigenvalues: eig,
        spectrum,
        real_axis_zero: cert.real_axis_zero,
        no_eigenvalue_margin: no_eig.margin,
        sampled_check: SampledCheck { seed, samples: args.samples, max_sos_error },
    };

    let mut text = String::new();
    text.push_str(&format!("dimension            {}\n", report.n));
    text.push_str(&format!("operator norm        {}\n", fmt_f64(report.operator_norm)));
    text.push_str(&format!("minimum modulus      {}\n", fmt_f64(report.min_modulus)));
    text.push_str(&format!("schatten 1-norm      {}\n", fmt_f64(report.schatten_1)));
    text.push_str(&format!("schatten 2-norm      {}\n", fmt_f64(report.schatten_2)));
    text.push_str(&format!("det complexification {}\n", fmt_f64(report.det_complexification)));
    let eig_text: Vec<String> = report.h_eigenvalues.iter().map(|&x| fmt_f64(x)).collect();
    text.push_str(&format!("H eigenvalues        {}\n", eig_text.join(" ")));
    text.push_str(&format!("H is                 {}\n", report.classification));
    if cert.pd_certificate.is_some() {
        text.push_str("certificate          positive definite H (Cholesky SOS)\n");
    }
    if let Some(r) = report.real_axis_zero {
        text.push_str(&format!("certificate          real-axis zero at r = {}\n", fmt_f64(r)));
    }
    if no_eig.certified {
        text.push_str(&format!("certificate          no eigenvalues, margin {}\n", fmt_f64(no_eig.margin)));
    }
    text.push_str(&format!("spectrum             {}\n", report.spectrum));
    text.push_str(&format!(
        "sampled SOS check    {} (seed {}, {} points)\n",
        fmt_f64(max_sos_error),
        seed,
        args.samples
    ));
    emit(None, &text)?;
    if let Some(path) = &args.json {
        emit(Some(path), &json(&report))?;
    }
    Ok(())
}

pub fn charpoly(args: &CharpolyArgs) -> Result<()> {
    let op = load_operator(&args.operator)?;
    let h = coefficients(&op, args.exact)?;
    if let Some(path) = &args.sos {
        emit(Some(path), &json(&sos_decompose(&h).to_json()))?;
    }
    if let Some(path) = &args.cholesky {
        emit(Some(path), &json(&cholesky_sos(&h)?.to_json()))?;
    }
    emit(args.out.as_ref(), &json(&h.to_json()))
}

pub fn spectrum(args: &SpectrumArgs) -> Result<()> {
    if args.rays == 0 {
        return Err(CliError::Validation("--rays must be at least 1".into()));
    }
    if !(args.tol > 0.0) || !(args.residual_tol > 0.0) {
        return Err(CliError::Validation("tolerances must be positive".into()));
    }
    let op = load_operator(&args.operator)?;
    let cloud = spectrum_sweep(&op, args.rays, args.tol, args.residual_tol)?;
    if let Some(path) = &args.svg {
        emit(Some(path), &svg::scatter(&cloud, op.operator_norm()))?;
    }
    if cloud.rejected > 0 {
        eprintln!("note: {} ray eigenvalues failed the residual test and were dropped", cloud.rejected);
    }
    emit(args.out.as_ref(), &cloud.to_csv())
}

pub fn numfun(args: &NumfunArgs) -> Result<()> {
    if args.rays == 0 {
        return Err(CliError::Validation("--rays must be at least 1".into()));
    }
    let op = load_operator(&args.operator)?;
    let h = coefficients(&op, args.exact)?;
    let report = range_and_coverage(&h, args.rays)?;
    if let Some(path) = &args.csv {
        emit(Some(path), &report.ray_minima_csv())?;
    }
    if report.grid.unconverged_roots > 0 {
        eprintln!("note: {} critical points did not converge", report.grid.unconverged_roots);
    }
    emit(args.out.as_ref(), &json(&report))
}

pub fn friedrichs(args: &FriedrichsArgs) -> Result<()> {
    if args.n == 0 {
        return Err(CliError::Validation("--n must be at least 1".into()));
    }
    let symbol = load_symbol(&args.symbol)?;
    let op = symbol.truncation(args.n)?;
    emit(args.out.as_ref(), &json(&op.to_json()))
}

/// `polar:RMIN:RMAX:NR:NTHETA`: `NR` radii evenly spaced in `[RMIN, RMAX]`
/// times `NTHETA` angles `2πk/NTHETA`, radius-major.
pub fn parse_grid(spec: &str) -> Result<Vec<Complex64>> {
    let bad = |why: &str| CliError::Validation(format!("invalid grid {spec:?}: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 5 || parts[0] != "polar" {
        return Err(bad("expected polar:RMIN:RMAX:NR:NTHETA"));
    }
    let r_min: f64 = parts[1].parse().map_err(|_| bad("RMIN is not a number"))?;
    let r_max: f64 = parts[2].parse().map_err(|_| bad("RMAX is not a number"))?;
    let n_r: usize = parts[3].parse().map_err(|_| bad("NR is not a positive integer"))?;
    let n_theta: usize = parts[4].parse().map_err(|_| bad("NTHETA is not a positive integer"))?;
    if !(r_min > 0.0) || !(r_max >= r_min) || !r_max.is_finite() {
        return Err(bad("need 0 < RMIN <= RMAX"));
    }
    if n_r == 0 || n_theta == 0 {
        return Err(bad("NR and NTHETA must be positive"));
    }
    let mut grid = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let r = if n_r == 1 { r_min } else { r_min + (r_max - r_min) * i as f64 / (n_r - 1) as f64 };
        for k in 0..n_theta {
            grid.push(Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n_theta as f64));
        }
    }
    Ok(grid)
}

/// Powers of two below `nmax`, then `nmax`.
pub fn truncation_sizes(nmax: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = std::iter::successors(Some(1usize), |&k| k.checked_mul(2)).take_while(|&k| k < nmax).collect();
    sizes.push(nmax);
    sizes
}

pub fn phi(args: &PhiArgs) -> Result<()> {
    if args.nmax == 0 {
        return Err(CliError::Validation("--nmax must be at least 1".into()));
    }
    let symbol = load_symbol(&args.symbol)?;
    let scale = symbol.scale();
    let lambda_min = match args.lambda_min {
        Some(v) if v > 0.0 => v,
        Some(v) => return Err(CliError::Validation(format!("--lambda-min must be positive, got {v}"))),
        None if scale > 0.0 => DEFAULT_LAMBDA_MIN_FACTOR * scale,
        None => DEFAULT_LAMBDA_MIN_FACTOR,
    };
    let grid = match &args.grid {
        Some(spec) => parse_grid(spec)?,
        None => {
            let reach = symbol.truncation(args.nmax)?.operator_norm().max(lambda_min);
            parse_grid(&format!("polar:{}:{}:8:32", 2.0 * lambda_min, 2.0 * reach))?
        }
    };
    let table = phi_converge(&symbol, &grid, &truncation_sizes(args.nmax), lambda_min)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    for &k in &table.stalls {
        eprintln!(
            "warning: difference grew between n = {} and n = {}",
            table.n_list[k],
            table.n_list[k + 1]
        );
    }
    emit(args.out.as_ref(), &table.to_csv())
}
