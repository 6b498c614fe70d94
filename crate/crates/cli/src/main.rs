//! Command-line entry point: every subcommand prints one JSON report to
//! stdout. Exit codes: 0 on success, 2 on input errors, 3 on numeric
//! failures; diagnostics go to stderr.

mod json;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use json::{jc, jcomplex_list, jexact, jf, jmat};
use matjulia::funcalc::{self, Contour};
use matjulia::matrix_dyn::{
    self, classify_matrix_spectral, iterate_matrix, jordan_chevalley,
    jordan_iterate_closed_form, power_map_differential_eigenvalues, ClassifyParams,
};
use matjulia::render::{
    render_grid, write_ppm, GridSpec, Palette, RenderMode, RenderParams, SliceFamily,
};
use matjulia::scalar_dyn::{self, classify_point};
use matjulia::verify::{verify_theorem, TheoremConfig};
use matjulia::wordmap::{tuple_from_json_str, SystemKind, WordSystem};
use matjulia::{CMatrix, DynError, MatrixVerdict, MonicPoly, OrbitBehavior, ScalarVerdict};

const EXIT_OK: i32 = 0;
const EXIT_INPUT: i32 = 2;
const EXIT_NUMERIC: i32 = 3;

#[derive(Parser)]
#[command(
    name = "matjulia",
    version,
    about = "Fatou/Julia dynamics of monic polynomial maps on matrix space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one complex point under a monic polynomial.
    ClassifyScalar {
        /// Polynomial, e.g. "z^2 - 1" or "power:3".
        #[arg(long)]
        poly: String,
        /// Point as "re,im".
        #[arg(long)]
        z: String,
        #[arg(long, default_value_t = scalar_dyn::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = scalar_dyn::DEFAULT_EPS)]
        eps: f64,
    },
    /// Classify a matrix through its spectrum.
    ClassifyMatrix {
        #[arg(long)]
        poly: String,
        /// Matrix JSON file: `{"n": 2, "entries": [[[re,im],...],...]}`.
        #[arg(long)]
        matrix: PathBuf,
        /// Enforce the general-linear-group contract (reject singular input).
        #[arg(long)]
        gl: bool,
        #[arg(long, default_value_t = scalar_dyn::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = scalar_dyn::DEFAULT_PROX_DELTA)]
        prox_delta: f64,
    },
    /// Iterate a matrix orbit and report the states and norms.
    Orbit {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Closed-form iterate of a Jordan block, cross-checked by brute force.
    JordanIterate {
        #[arg(long)]
        poly: String,
        /// Eigenvalue as "re,im".
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        m: usize,
    },
    /// Eigenvalues of the differential of the iterated power map.
    DiffPower {
        /// Power-map exponent.
        #[arg(long = "M")]
        base: usize,
        /// Number of iterations.
        #[arg(long)]
        m: u32,
        /// Eigenvalues as "re,im;re,im;...".
        #[arg(long)]
        eigs: String,
    },
    /// Split a matrix into commuting semisimple plus nilpotent parts.
    JordanChevalley {
        #[arg(long)]
        matrix: PathBuf,
        /// Eigenvalue clustering tolerance; scaled default when omitted.
        #[arg(long)]
        cluster_tol: Option<f64>,
    },
    /// Compare the contour-integral evaluation of p^m against direct iteration.
    FuncalcCheck {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = funcalc::DEFAULT_NODES)]
        nodes: usize,
    },
    /// Iterate a word or polynomial system on a matrix tuple, exactly.
    WordIterate {
        /// "group" or "algebra".
        #[arg(long)]
        kind: String,
        /// Components separated by ';', e.g. "x2 ; x1^2*x2".
        #[arg(long)]
        words: String,
        /// Tuple JSON file: `{"matrices": [{"n":2,"entries":[["1","1"],["0","1"]]}, ...]}`.
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Render a Julia picture for a scalar or matrix slice.
    Render {
        #[arg(long)]
        poly: String,
        /// "scalar", "jordan:SIZE", or "affine:FILE_A,FILE_B".
        #[arg(long)]
        family: String,
        /// "spectral" or "orbit".
        #[arg(long, default_value = "spectral")]
        mode: String,
        /// Window center as "re,im".
        #[arg(long, default_value = "0,0")]
        center: String,
        #[arg(long, default_value_t = 4.0)]
        width: f64,
        /// Window height; defaults to the width (square window).
        #[arg(long)]
        height: Option<f64>,
        /// Pixels per axis.
        #[arg(long, default_value_t = 256)]
        px: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = matjulia::render::DEFAULT_RENDER_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = matrix_dyn::DEFAULT_ORBIT_BOUND)]
        bound: f64,
    },
    /// Randomized cross-check of the spectral classifier against direct orbits.
    VerifyTheorem {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        prox_margin: f64,
        #[arg(long, default_value_t = scalar_dyn::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = matrix_dyn::DEFAULT_ORBIT_BOUND)]
        bound: f64,
    },
}

enum CliError {
    Input(String),
    Numeric(DynError),
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> Self {
        match e {
            // Dimension problems come from malformed inputs at this level.
            DynError::DimensionMismatch(msg) => CliError::Input(msg),
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    fn input<E: std::fmt::Display>(e: E) -> Self {
        CliError::Input(e.to_string())
    }
}

struct Outcome {
    inputs: Value,
    result: Value,
    residuals: BTreeMap<String, f64>,
    seed: Option<u64>,
}

impl Outcome {
    fn new(inputs: Value, result: Value) -> Self {
        Outcome { inputs, result, residuals: BTreeMap::new(), seed: None }
    }

    fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_string(), value);
        self
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            emit_error("argv", "InputError", &e.to_string());
            return EXIT_INPUT;
        }
    };
    let name = command_name(&cli.command);
    match dispatch(cli.command) {
        Ok(outcome) => {
            let residuals: BTreeMap<&str, Value> = outcome
                .residuals
                .iter()
                .map(|(k, v)| (k.as_str(), jf(*v)))
                .collect();
            let mut report = json!({
                "schema": 1,
                "version": env!("CARGO_PKG_VERSION"),
                "command": name,
                "inputs": outcome.inputs,
                "result": outcome.result,
                "residuals": residuals,
            });
            if let Some(seed) = outcome.seed {
                report["seed"] = json!(seed);
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            EXIT_OK
        }
        Err(CliError::Input(msg)) => {
            emit_error(name, "InputError", &msg);
            EXIT_INPUT
        }
        Err(CliError::Numeric(e)) => {
            emit_error(name, e.name(), &e.to_string());
            EXIT_NUMERIC
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::ClassifyScalar { .. } => "classify-scalar",
        Command::ClassifyMatrix { .. } => "classify-matrix",
        Command::Orbit { .. } => "orbit",
        Command::JordanIterate { .. } => "jordan-iterate",
        Command::DiffPower { .. } => "diff-power",
        Command::JordanChevalley { .. } => "jordan-chevalley",
        Command::FuncalcCheck { .. } => "funcalc-check",
        Command::WordIterate { .. } => "word-iterate",
        Command::Render { .. } => "render",
        Command::VerifyTheorem { .. } => "verify-theorem",
    }
}

fn emit_error(command: &str, name: &str, message: &str) {
    let report = json!({
        "schema": 1,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "error": { "name": name, "message": message },
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("error report serializes"));
    eprintln!("matjulia {command}: {name}: {message}");
}

fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::ClassifyScalar { poly, z, max_iter, eps } => {
            classify_scalar(&poly, &z, max_iter, eps)
        }
        Command::ClassifyMatrix { poly, matrix, gl, max_iter, prox_delta } => {
            classify_matrix(&poly, &matrix, gl, max_iter, prox_delta)
        }
        Command::Orbit { poly, matrix, m } => orbit(&poly, &matrix, m),
        Command::JordanIterate { poly, alpha, size, m } => jordan_iterate(&poly, &alpha, size, m),
        Command::DiffPower { base, m, eigs } => diff_power(base, m, &eigs),
        Command::JordanChevalley { matrix, cluster_tol } => {
            jordan_chevalley_cmd(&matrix, cluster_tol)
        }
        Command::FuncalcCheck { poly, m, matrix, nodes } => funcalc_check(&poly, m, &matrix, nodes),
        Command::WordIterate { kind, words, tuple, m } => word_iterate(&kind, &words, &tuple, m),
        Command::Render {
            poly,
            family,
            mode,
            center,
            width,
            height,
            px,
            out,
            threads,
            max_iter,
            bound,
        } => render(
            &poly, &family, &mode, &center, width, height, px, &out, threads, max_iter, bound,
        ),
        Command::VerifyTheorem { poly, n, trials, seed, prox_margin, max_iter, bound } => {
            verify(&poly, n, trials, seed, prox_margin, max_iter, bound)
        }
    }
}

fn parse_poly(s: &str) -> Result<MonicPoly, CliError> {
    MonicPoly::from_str(s).map_err(CliError::input)
}

fn parse_pair(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || CliError::Input(format!("expected \"re,im\", got {s:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn load_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    CMatrix::from_json_str(&text).map_err(CliError::Input)
}

fn classify_scalar(poly: &str, z: &str, max_iter: usize, eps: f64) -> Result<Outcome, CliError> {
    let p = parse_poly(poly)?;
    let point = parse_pair(z)?;
    if max_iter == 0 || !eps.is_finite() || eps <= 0.0 {
        return Err(CliError::Input("max_iter must be >= 1 and eps > 0".into()));
    }
    let class = classify_point(&p, point, max_iter, eps);
    let mut result = json!({ "iterations_used": class.iterations_used });
    match class.verdict {
        ScalarVerdict::BasinInfinity { escape_iter } => {
            result["verdict"] = json!("BasinInfinity");
            result["escape_iter"] = json!(escape_iter);
        }
        ScalarVerdict::AttractingBasin { period, multiplier } => {
            result["verdict"] = json!("AttractingBasin");
            result["period"] = json!(period);
            result["multiplier"] = jc(multiplier);
        }
        ScalarVerdict::BoundedNonAttracting => result["verdict"] = json!("BoundedNonAttracting"),
        ScalarVerdict::Undecided => result["verdict"] = json!("Undecided"),
    }
    let inputs = json!({
        "poly": p.to_string(),
        "z": jc(point),
        "max_iter": max_iter,
        "eps": eps,
    });
    Ok(Outcome::new(inputs, result))
}

fn matrix_verdict_value(mc: &matjulia::MatrixClass) -> Value {
    let mut result = json!({
        "spectrum": jcomplex_list(mc.spectrum.eigenvalues()),
    });
    match &mc.verdict {
        MatrixVerdict::Fatou { reason } => {
            result["verdict"] = json!("Fatou");
            result["reason"] = json!(match reason {
                matjulia::FatouReason::AllEigenvaluesFatou => "AllEigenvaluesFatou",
                matjulia::FatouReason::UniformEscape => "UniformEscape",
            });
        }
        MatrixVerdict::Julia { witness } => {
            result["verdict"] = json!("Julia");
            result["witness"] = jc(*witness);
        }
        MatrixVerdict::Undecided { proximate_eigenvalues } => {
            result["verdict"] = json!("Undecided");
            result["proximate_eigenvalues"] = jcomplex_list(proximate_eigenvalues);
        }
    }
    let classes: Vec<Value> = mc
        .eigen_classes
        .iter()
        .map(|(l, c)| {
            json!({
                "eigenvalue": jc(*l),
                "class": match c {
                    matjulia::PerturbedVerdict::JuliaProximate => "julia_proximate",
                    matjulia::PerturbedVerdict::Undecided => "undecided",
                    matjulia::PerturbedVerdict::Decisive(sc) => match sc.verdict {
                        ScalarVerdict::BasinInfinity { .. } => "basin_infinity",
                        ScalarVerdict::AttractingBasin { .. } => "attracting_basin",
                        ScalarVerdict::BoundedNonAttracting => "bounded_non_attracting",
                        ScalarVerdict::Undecided => "undecided",
                    },
                },
            })
        })
        .collect();
    result["eigen_classes"] = Value::Array(classes);
    result
}

fn classify_matrix(
    poly: &str,
    matrix: &Path,
    gl: bool,
    max_iter: usize,
    prox_delta: f64,
) -> Result<Outcome, CliError> {
    let p = parse_poly(poly)?;
    let x = load_matrix(matrix)?;
    if gl {
        x.inverse().map_err(|_| CliError::Numeric(DynError::SingularMatrix))?;
    }
    let params = ClassifyParams { max_iter, prox_delta, ..ClassifyParams::default() };
    let mc = classify_matrix_spectral(&p, &x, &params)?;
    let inputs = json!({
        "poly": p.to_string(),
        "matrix": jmat(&x),
        "gl": gl,
        "max_iter": max_iter,
        "prox_delta": prox_delta,
    });
    Ok(Outcome::new(inputs, matrix_verdict_value(&mc)))
}

fn orbit(poly: &str, matrix: &Path, m: usize) -> Result<Outcome, CliError> {
    let p = parse_poly(poly)?;
    let x = load_matrix(matrix)?;
    let orbit = iterate_matrix(&p, &x, m);
    let states: Vec<Value> = orbit.states.iter().map(jmat).collect();
    let norms: Vec<Value> = orbit.states.iter().map(|s| jf(s.frobenius_norm())).collect();
    let inputs = json!({ "poly": p.to_string(), "matrix": jmat(&x), "m": m });
    let result = json!({
        "orbit": states,
        "norms": norms,
        "truncated": orbit.truncated,
    });
    Ok(Outcome::new(inputs, result))
}

fn orbit_value(behavior: &OrbitBehavior) -> Value {
    match behavior {
        OrbitBehavior::Bounded => json!("Bounded"),
        OrbitBehavior::Escaped { iter } => json!({ "Escaped": { "iter": iter } }),
        OrbitBehavior::Inconclusive => json!("Inconclusive"),
    }
}

fn jordan_iterate(poly: &str, alpha: &str, size: usize, m: usize) -> Result<Outcome, CliError> {
    let p = parse_poly(poly)?;
    let a = parse_pair(alpha)?;
    if size == 0 {
        return Err(CliError::Input("size must be at least 1".into()));
    }
    let closed = jordan_iterate_closed_form(&p, a, size, m)?;
    let brute = iterate_matrix(&p, &CMatrix::jordan_block(a, size), m);
    let inputs = json!({
        "poly": p.to_string(),
        "alpha": jc(a),
        "size": size,
        "m": m,
    });
    let mut outcome = Outcome::new(inputs, json!({ "matrix": jmat(&closed) }));
    if !brute.truncated {
        let direct = brute.states.last().expect("orbit is nonempty");
        outcome = outcome.residual(
            "closed_vs_brute_rel",
            matjulia::cmatrix::rel_frobenius_distance(&closed, direct),
        );
    }
    Ok(outcome)
}

fn diff_power(base: usize, m: u32, eigs: &str) -> Result<Outcome, CliError> {
    if base < 2 {
        return Err(CliError::Input("power-map exponent must be at least 2".into()));
    }
    let values: Vec<Complex64> = eigs
        .split(';')
        .map(parse_pair)
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Input("need at least one eigenvalue".into()));
    }
    let mu = power_map_differential_eigenvalues(base, m, &values)?;
    let inputs = json!({ "M": base, "m": m, "eigs": jcomplex_list(&values) });
    Ok(Outcome::new(inputs, json!({ "mu": jmat(&mu) })))
}

fn jordan_chevalley_cmd(matrix: &Path, cluster_tol: Option<f64>) -> Result<Outcome, CliError> {
    let x = load_matrix(matrix)?;
    let tol = cluster_tol.unwrap_or_else(|| matrix_dyn::jc_cluster_tol(x.frobenius_norm()));
    let dec = jordan_chevalley(&x, tol)?;
    let inputs = json!({ "matrix": jmat(&x), "cluster_tol": tol });
    let result = json!({
        "semisimple": jmat(&dec.semisimple),
        "nilpotent": jmat(&dec.nilpotent),
    });
    Ok(Outcome::new(inputs, result)
        .residual("reconstruction_rel", dec.residuals.reconstruction)
        .residual("nilpotency_defect", dec.residuals.nilpotency_defect)
        .residual("commutator", dec.residuals.commutator))
}

fn funcalc_check(poly: &str, m: usize, matrix: &Path, nodes: usize) -> Result<Outcome, CliError> {
    let p = parse_poly(poly)?;
    let x = load_matrix(matrix)?;
    // Auto-placed contour: one circle around the whole spectrum with
    // clearance proportional to the spectral spread.
    let spectrum = x.eigenvalues(matjulia::cmatrix::DEFAULT_DEFLATION_TOL)?;
    let centroid = spectrum.eigenvalues().iter().sum::<Complex64>()
        / spectrum.eigenvalues().len().max(1) as f64;
    let spread = spectrum
        .eigenvalues()
        .iter()
        .map(|&l| (l - centroid).norm())
        .fold(0.0, f64::max);
    let radius = 1.3 * spread + 0.3;
    let contour = Contour::circle(centroid, radius, nodes)?;
    let quad = funcalc::contour_eval(&p, m, &x, &contour)?;
    let direct_orbit = iterate_matrix(&p, &x, m);
    if direct_orbit.truncated {
        return Err(CliError::Numeric(DynError::Overflow("direct matrix iterate")));
    }
    let direct = direct_orbit.states.last().expect("orbit is nonempty");
    let err = matjulia::cmatrix::frobenius_distance(&quad, direct);
    let inputs = json!({
        "poly": p.to_string(),
        "m": m,
        "matrix": jmat(&x),
        "nodes": nodes,
        "contour": { "center": jc(centroid), "radius": radius },
    });
    let result = json!({
        "quadrature_result": jmat(&quad),
        "direct_result": jmat(direct),
        "frobenius_error": jf(err),
    });
    Ok(Outcome::new(inputs, result).residual("frobenius_error", err))
}

fn word_iterate(kind: &str, words: &str, tuple: &Path, m: usize) -> Result<Outcome, CliError> {
    let kind = match kind {
        "group" => SystemKind::Group,
        "algebra" => SystemKind::Algebra,
        other => {
            return Err(CliError::Input(format!(
                "kind must be \"group\" or \"algebra\", got {other:?}"
            )))
        }
    };
    let system = WordSystem::parse(kind, words).map_err(CliError::input)?;
    let text = std::fs::read_to_string(tuple)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", tuple.display())))?;
    let start = tuple_from_json_str(&text).map_err(CliError::input)?;
    let trajectory = system.iterate(&start, m)?;
    let steps: Vec<Value> = trajectory
        .iter()
        .map(|tuple| Value::Array(tuple.iter().map(jexact).collect()))
        .collect();
    let inputs = json!({
        "kind": match kind { SystemKind::Group => "group", SystemKind::Algebra => "algebra" },
        "words": system.component_strings(),
        "arity": system.arity(),
        "m": m,
    });
    Ok(Outcome::new(inputs, json!({ "trajectory": steps })))
}

#[allow(clippy::too_many_arguments)]
fn render(
    poly: &str,
    family: &str,
    mode: &str,
    center: &str,
    width: f64,
    height: Option<f64>,
    px: usize,
    out: &Path,
    threads: Option<usize>,
    max_iter: usize,
    bound: f64,
) -> Result<Outcome, CliError> {
    let p = parse_poly(poly)?;
    let center = parse_pair(center)?;
    let height = height.unwrap_or(width);
    let spec = GridSpec::new(center, width, height, px, px).map_err(CliError::Input)?;
    let family_parsed = parse_family(family)?;
    let mode_parsed = match mode {
        "spectral" => RenderMode::Spectral,
        "orbit" => RenderMode::DirectOrbit,
        other => {
            return Err(CliError::Input(format!(
                "mode must be \"spectral\" or \"orbit\", got {other:?}"
            )))
        }
    };
    let params = RenderParams { max_iter, bound, threads, ..RenderParams::default() };
    let grid = render_grid(&p, &spec, &family_parsed, mode_parsed, &params);
    let bytes = write_ppm(&grid, &Palette::default());
    std::fs::write(out, &bytes)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", out.display())))?;
    let histogram: BTreeMap<&str, usize> = grid.histogram();
    let sidecar_path = {
        let mut s = out.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    };
    let sidecar = json!({
        "spec": spec,
        "mode": grid.mode,
        "params": {
            "max_iter": max_iter,
            "bound": bound,
            "proximity_delta": spec.proximity_delta(),
        },
        "histogram": histogram,
    });
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar).expect("sidecar"))
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", sidecar_path.display())))?;
    let inputs = json!({
        "poly": p.to_string(),
        "family": family,
        "mode": mode,
        "center": jc(center),
        "width": width,
        "height": height,
        "px": px,
        "max_iter": max_iter,
    });
    let result = json!({
        "out": out.display().to_string(),
        "sidecar": sidecar_path.display().to_string(),
        "ppm_bytes": bytes.len(),
        "histogram": histogram,
    });
    Ok(Outcome::new(inputs, result))
}

fn parse_family(family: &str) -> Result<SliceFamily, CliError> {
    if family == "scalar" {
        return Ok(SliceFamily::Scalar);
    }
    if let Some(size) = family.strip_prefix("jordan:") {
        let size: usize = size
            .parse()
            .map_err(|_| CliError::Input(format!("bad jordan size in {family:?}")))?;
        if size < 2 {
            return Err(CliError::Input("jordan slice size must be at least 2".into()));
        }
        return Ok(SliceFamily::Jordan { size });
    }
    if let Some(paths) = family.strip_prefix("affine:") {
        let (a_path, b_path) = paths.split_once(',').ok_or_else(|| {
            CliError::Input("affine family needs two files: affine:<fileA>,<fileB>".into())
        })?;
        let a = load_matrix(Path::new(a_path))?;
        let b = load_matrix(Path::new(b_path))?;
        return SliceFamily::affine(a, b).map_err(CliError::Input);
    }
    Err(CliError::Input(format!(
        "family must be \"scalar\", \"jordan:<size>\" or \"affine:<fileA>,<fileB>\", got {family:?}"
    )))
}

#[allow(clippy::too_many_arguments)]
fn verify(
    poly: &str,
    n: usize,
    trials: usize,
    seed: u64,
    prox_margin: f64,
    max_iter: usize,
    bound: f64,
) -> Result<Outcome, CliError> {
    let p = parse_poly(poly)?;
    if n == 0 || trials == 0 {
        return Err(CliError::Input("n and trials must be at least 1".into()));
    }
    let cfg = TheoremConfig { n, trials, seed, prox_margin, max_iter, bound };
    let report = verify_theorem(&p, &cfg);
    let disagreements: Vec<Value> = report
        .disagreements
        .iter()
        .map(|d| {
            json!({
                "trial": d.trial,
                "matrix": jmat(&d.matrix),
                "sampled_eigenvalues": jcomplex_list(&d.sampled_eigenvalues),
                "expected_escape": d.expected_escape,
                "spectral_verdict": d.spectral_verdict,
                "orbit": orbit_value(&d.orbit),
            })
        })
        .collect();
    let inputs = json!({
        "poly": p.to_string(),
        "n": n,
        "trials": trials,
        "prox_margin": prox_margin,
        "max_iter": max_iter,
        "bound": bound,
    });
    let result = json!({
        "trials": report.trials,
        "agreements": report.agreements,
        "disagreements": disagreements,
    });
    Ok(Outcome::new(inputs, result).seeded(seed))
}
