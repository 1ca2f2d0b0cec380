//! `ospos`: command-line access to the reflection-positivity toolkit.
//! Every subcommand reads JSON (inline or from files), writes one JSON
//! report to stdout, and exits 0 on success, 2 on a named precondition or
//! schema violation, 1 on an internal failure. Reports are deterministic
//! for fixed inputs, flags, and seed.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use ospos_core::covariance::{reflected_semigroup, CovarianceFunction};
use ospos_core::error::Error as CoreError;
use ospos_core::hilbert::{hermitian_eigen_desc, Operator};
use ospos_core::hs::{convergence_study, HsDiscretization};
use ospos_core::json::{
    real_rows, vector_json, MatrixInput, MatrixJson, ReflectionJson, SubspaceJson, TripleJson,
};
use ospos_core::markov::{markov_check, negative_witness_search, WitnessResult};
use ospos_core::reflection::{contraction_from_subspace, intersection_kernel_check, os_positivity};
use ospos_core::renorm::{build_renormalized, induce_operator, induce_semigroup_generator};
use ospos_core::scalar::Tolerances;
use ospos_core::two_block::TwoBlockModel;

mod schemas;

#[derive(Parser)]
#[command(
    name = "ospos",
    version,
    about = "Reflection positivity diagnostics on finite-dimensional spaces"
)]
struct Cli {
    /// Print the published JSON schemas and exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Test a subspace for positivity of the reflected form and extract
    /// the contraction it is a graph of.
    Geometry {
        /// Reflection JSON ({"ambient_dim", "fixed_space"}), inline or a file path.
        #[arg(long)]
        theta: String,
        /// Subspace JSON ({"ambient_dim", "frame"}), inline or a file path.
        #[arg(long)]
        subspace: String,
    },
    /// Build the renormalized quotient of a subspace and optionally push a
    /// unitary or a skew-adjoint generator through it.
    Renorm {
        /// Input JSON {"theta", "h_plus", "u"?, "a"?, "t0"?}, inline or a file path.
        #[arg(long)]
        input: String,
    },
    /// Markov check and randomized search for a reflection making the
    /// form negative somewhere on the positive side.
    Markov {
        /// Triple JSON ({"center", "plus", "minus"}), inline or a file path.
        #[arg(long)]
        triple: String,
        /// Number of candidate reflections to try.
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Seed for the candidate generator; runs are reproducible.
        #[arg(long)]
        seed: u64,
        /// Override every residual tolerance for this run.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Characteristic projections and Markov defect of the two-block
    /// contraction model.
    Twoblock {
        /// The contraction as a JSON matrix, e.g. "[[0.5]]".
        #[arg(long)]
        c: String,
    },
    /// Gram positivity, multiplicative structure, and the compressed shift
    /// of a stationary covariance on a time grid.
    Covariance {
        /// Built-in covariance: ou, intexp, rational, or damped.
        #[arg(long)]
        name: Option<String>,
        /// Sampled covariance as JSON {"t": value, ...}, inline or a file path.
        #[arg(long)]
        table: Option<String>,
        /// Comma-separated time grid.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        grid: Vec<f64>,
        /// Shift for the compressed semigroup step.
        #[arg(long, allow_negative_numbers = true)]
        shift: Option<f64>,
    },
    /// Spectrum of the scaled fractional kernel compressed to the
    /// whitened quadrature Gram.
    Hs {
        /// Kernel exponent in (0, 1).
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        /// Dilation scale, must exceed 1.
        #[arg(long)]
        a: f64,
        /// Quadrature size.
        #[arg(long)]
        n: usize,
        /// Number of leading eigenvalues to report.
        #[arg(long)]
        k: usize,
        /// Also run the refinement study over n/8, n/4, n/2, n.
        #[arg(long)]
        converge: bool,
    },
}

/// A failure with a stable machine-readable kind and the exit code the
/// contract assigns to it.
struct Failure {
    kind: &'static str,
    message: String,
    exit: u8,
}

impl Failure {
    fn schema(message: impl Into<String>) -> Self {
        Failure {
            kind: "SchemaError",
            message: message.into(),
            exit: 2,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let kind = match &e {
            CoreError::DimensionMismatch { .. } => "DimensionMismatch",
            CoreError::NotHermitian { .. } => "NotHermitian",
            CoreError::NotProjection { .. } => "NotProjection",
            CoreError::NotInvolution { .. } => "NotInvolution",
            CoreError::NotOsPositive { .. } => "NotOsPositive",
            CoreError::NotPositive { .. } => "NotPositive",
            CoreError::NotAGraph { .. } => "NotAGraph",
            CoreError::NotContraction { .. } => "NotContraction",
            CoreError::DomainNotInFixedSpace { .. } => "DomainNotInFixedSpace",
            CoreError::CodomainNotInReflectedSpace { .. } => "CodomainNotInReflectedSpace",
            CoreError::NotMaximal { .. } => "NotMaximal",
            CoreError::NoConvergence { .. } => "NoConvergence",
            CoreError::NotAFactorization { .. } => "NotAFactorization",
            CoreError::NotUnitary { .. } => "NotUnitary",
            CoreError::NotReflectionSymmetric { .. } => "NotReflectionSymmetric",
            CoreError::NotInvariant { .. } => "NotInvariant",
            CoreError::NotSkewAdjoint { .. } => "NotSkewAdjoint",
            CoreError::NonPositiveSpectrum { .. } => "NonPositiveSpectrum",
            CoreError::SemigroupLawViolation { .. } => "SemigroupLawViolation",
            CoreError::PreconditionFailed(_) => "PreconditionFailed",
            CoreError::InvalidPartition { .. } => "InvalidPartition",
            CoreError::NegativeTime { .. } => "NegativeTime",
            CoreError::GridTooSmall => "GridTooSmall",
            CoreError::InvalidS { .. } => "InvalidS",
            CoreError::InvalidScale { .. } => "InvalidScale",
            CoreError::QuadratureFailure(_) => "QuadratureFailure",
            CoreError::RankDeficient { .. } => "RankDeficient",
        };
        Failure {
            kind,
            message: e.to_string(),
            exit: 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.schema {
        println!("{}", schemas::bundle());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("{}", error_value("SchemaError", "no subcommand given"));
        return ExitCode::from(2);
    };
    let outcome = std::panic::catch_unwind(move || run(command));
    match outcome {
        Ok(Ok(report)) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Ok(Err(failure)) => {
            eprintln!("{}", error_value(failure.kind, &failure.message));
            ExitCode::from(failure.exit)
        }
        Err(_) => {
            eprintln!("{}", error_value("Internal", "unexpected failure"));
            ExitCode::from(1)
        }
    }
}

fn error_value(kind: &str, message: &str) -> Value {
    json!({"error": {"kind": kind, "message": message}})
}

fn run(command: Command) -> Result<Value, Failure> {
    let tols = base_tolerances()?;
    match command {
        Command::Geometry { theta, subspace } => geometry(&theta, &subspace, &tols),
        Command::Renorm { input } => renorm(&input, &tols),
        Command::Markov {
            triple,
            trials,
            seed,
            tol,
        } => {
            let tols = match tol {
                Some(t) => Tolerances::uniform(t),
                None => tols,
            };
            markov(&triple, trials, seed, &tols)
        }
        Command::Twoblock { c } => twoblock(&c, &tols),
        Command::Covariance {
            name,
            table,
            grid,
            shift,
        } => covariance(name.as_deref(), table.as_deref(), &grid, shift, &tols),
        Command::Hs {
            s,
            a,
            n,
            k,
            converge,
        } => hs(s, a, n, k, converge, &tols),
    }
}

/// Default tolerances, uniformly overridden by the OSPOS_TOL variable.
fn base_tolerances() -> Result<Tolerances<f64>, Failure> {
    match std::env::var("OSPOS_TOL") {
        Ok(text) => {
            let value: f64 = text.parse().map_err(|_| {
                Failure::schema(format!("OSPOS_TOL must be a number, got {text:?}"))
            })?;
            if !(value > 0.0 && value.is_finite()) {
                return Err(Failure::schema(format!(
                    "OSPOS_TOL must be positive and finite, got {value}"
                )));
            }
            Ok(Tolerances::uniform(value))
        }
        Err(_) => Ok(Tolerances::default()),
    }
}

/// Inline JSON if the argument looks like it, file contents otherwise.
fn load_text(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Failure {
        kind: "IoError",
        message: format!("cannot read {arg}: {e}"),
        exit: 2,
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let text = load_text(arg)?;
    serde_json::from_str(&text).map_err(|e| Failure::schema(format!("{what}: {e}")))
}

fn tolerances_value(tols: &Tolerances<f64>) -> Value {
    json!({
        "tol_proj": tols.tol_proj,
        "tol_ortho": tols.tol_ortho,
        "tol_psd": tols.tol_psd,
        "rank_svd": tols.rank_svd,
        "rank_gram": tols.rank_gram,
    })
}

fn report(
    module: &str,
    operation: &str,
    tols: &Tolerances<f64>,
    seed: Option<u64>,
    inputs: Value,
    results: Value,
) -> Value {
    let mut map = Map::new();
    map.insert("module".into(), json!(module));
    map.insert("operation".into(), json!(operation));
    map.insert("tolerances".into(), tolerances_value(tols));
    if let Some(seed) = seed {
        map.insert("seed".into(), json!(seed));
    }
    map.insert("inputs".into(), inputs);
    map.insert("results".into(), results);
    Value::Object(map)
}

fn matrix_value(m: &ospos_core::Matrix) -> Value {
    serde_json::to_value(MatrixJson::from_matrix(m)).expect("matrix serializes")
}

fn geometry(theta_arg: &str, subspace_arg: &str, tols: &Tolerances<f64>) -> Result<Value, Failure> {
    let theta_json: ReflectionJson = parse_json(theta_arg, "reflection input")?;
    let subspace_json: SubspaceJson = parse_json(subspace_arg, "subspace input")?;
    let theta = theta_json.to_reflection()?;
    let subspace = subspace_json.to_subspace()?;
    let psd = os_positivity(&theta, &subspace, tols)?;
    let inputs = json!({
        "theta": serde_json::to_value(&theta_json).expect("reflection serializes"),
        "subspace": serde_json::to_value(&subspace_json).expect("subspace serializes"),
    });
    let positivity = json!({
        "min_eigenvalue": psd.min_eigenvalue,
        "tol": psd.tol,
        "passed": psd.passed,
        "witness": psd.witness.as_ref().map(vector_json),
    });
    let mut results = Map::new();
    results.insert("os_positivity".into(), positivity);
    if psd.passed {
        let contraction = contraction_from_subspace(&theta, &subspace, tols)?;
        results.insert(
            "contraction".into(),
            json!({
                "norm": contraction.norm(),
                "domain_dim": contraction.domain.dim(),
                "kernel_dim": contraction.kernel(tols).dim(),
            }),
        );
        let maximal = contraction.domain.dim() == theta.fixed_space().dim();
        let kernel_check = if maximal {
            let check = intersection_kernel_check(&theta, &contraction, tols)?;
            json!({
                "max_distance": check.max_distance,
                "passed": check.passed,
                "intersection_dim": check.meet_plus_minus.dim(),
            })
        } else {
            Value::Null
        };
        results.insert("kernel_check".into(), kernel_check);
    }
    Ok(report(
        "reflection",
        "os_positivity",
        tols,
        None,
        inputs,
        Value::Object(results),
    ))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RenormInput {
    theta: ReflectionJson,
    h_plus: SubspaceJson,
    #[serde(default)]
    u: Option<MatrixInput>,
    #[serde(default)]
    a: Option<MatrixInput>,
    #[serde(default)]
    t0: Option<f64>,
}

fn renorm(input_arg: &str, tols: &Tolerances<f64>) -> Result<Value, Failure> {
    let input: RenormInput = parse_json(input_arg, "renormalization input")?;
    let theta = input.theta.to_reflection()?;
    let h_plus = input.h_plus.to_subspace()?;
    let space = build_renormalized(&theta, &h_plus, tols)?;
    let mut inputs = Map::new();
    inputs.insert(
        "theta".into(),
        serde_json::to_value(&input.theta).expect("reflection serializes"),
    );
    inputs.insert(
        "h_plus".into(),
        serde_json::to_value(&input.h_plus).expect("subspace serializes"),
    );
    let mut results = Map::new();
    results.insert("k_dim".into(), json!(space.k_dim()));
    results.insert(
        "gram_eigenvalues".into(),
        json!(space.gram_eigenvalues().to_vec()),
    );
    if input.u.is_some() && input.a.is_some() {
        return Err(Failure::schema(
            "give either a unitary u or a generator a, not both",
        ));
    }
    if let Some(u_input) = &input.u {
        let u = Operator::new(u_input.to_matrix()?)?;
        inputs.insert("u".into(), matrix_value(u.matrix()));
        let induced = induce_operator(&space, &u, tols)?;
        let (spectrum, _) = hermitian_eigen_desc(&induced.matrix);
        results.insert(
            "u_tilde_spectrum".into(),
            json!({
                "eigenvalues": spectrum,
                "hermitian_residual": induced.hermitian_residual,
                "spectral_radius": induced.spectral_radius,
                "invariance_residual": induced.invariance_residual,
            }),
        );
    }
    if let Some(a_input) = &input.a {
        let a = a_input.to_matrix()?;
        let t0 = input.t0.unwrap_or(1.0);
        inputs.insert("a".into(), matrix_value(&a));
        inputs.insert("t0".into(), json!(t0));
        let semigroup = induce_semigroup_generator(&space, &a, t0, tols)?;
        let (step_spectrum, _) = hermitian_eigen_desc(&semigroup.step.matrix);
        let (generator_spectrum, _) = hermitian_eigen_desc(&semigroup.generator);
        results.insert(
            "u_tilde_spectrum".into(),
            json!({
                "eigenvalues": step_spectrum,
                "generator_eigenvalues": generator_spectrum,
                "law_residual": semigroup.law_residual,
                "t0": semigroup.t0,
            }),
        );
    }
    Ok(report(
        "renormalize",
        "build_renormalized",
        tols,
        None,
        Value::Object(inputs),
        Value::Object(results),
    ))
}

fn markov(
    triple_arg: &str,
    trials: u64,
    seed: u64,
    tols: &Tolerances<f64>,
) -> Result<Value, Failure> {
    let triple_json: TripleJson = parse_json(triple_arg, "triple input")?;
    let triple = triple_json.to_triple()?;
    let check = markov_check(&triple, tols);
    let epsilon = 1e-8;
    let witness = negative_witness_search(&triple, trials as usize, seed, epsilon, tols)?;
    let witness_value = match &witness {
        WitnessResult::Found {
            theta,
            witness,
            value,
            trials_used,
        } => json!({
            "status": "found",
            "reflection": serde_json::to_value(ReflectionJson::from_reflection(theta))
                .expect("reflection serializes"),
            "witness": vector_json(witness),
            "value": value,
            "trials_used": trials_used,
        }),
        WitnessResult::NotFound {
            trials,
            admissible,
            best_value,
        } => json!({
            "status": "not_found",
            "trials": trials,
            "admissible": admissible,
            "best_value": best_value,
        }),
        WitnessResult::Inapplicable { markov_residual } => json!({
            "status": "inapplicable",
            "markov_residual": markov_residual,
        }),
    };
    let inputs = json!({
        "triple": serde_json::to_value(&triple_json).expect("triple serializes"),
        "trials": trials,
        "epsilon": epsilon,
    });
    let results = json!({
        "markov": {
            "residual": check.residual,
            "tol": check.tol,
            "is_markov": check.is_markov,
        },
        "witness_search": witness_value,
    });
    Ok(report(
        "markov",
        "negative_witness_search",
        tols,
        Some(seed),
        inputs,
        results,
    ))
}

fn twoblock(c_arg: &str, tols: &Tolerances<f64>) -> Result<Value, Failure> {
    let c_input: MatrixInput = parse_json(c_arg, "contraction input")?;
    let c = c_input.to_matrix()?;
    let model = TwoBlockModel::new(c.clone())?;
    let equivalence = model.markov_equivalence(tols);
    let identities = model.identity_residuals();
    let inputs = json!({ "c": matrix_value(&c) });
    let results = json!({
        "e_plus": matrix_value(&model.char_projection_plus()),
        "e_minus": matrix_value(&model.char_projection_minus()),
        "triple": serde_json::to_value(TripleJson::from_triple(&model.triple()))
            .expect("triple serializes"),
        "markov": {
            "is_markov": equivalence.is_markov,
            "residual": equivalence.residual,
            "off_diagonal_product": equivalence.off_diagonal_product,
            "c_norm": equivalence.c_norm,
        },
        "identity_residuals": {
            "graph_row": identities.graph_row,
            "graph_cross": identities.graph_cross,
            "defect_row": identities.defect_row,
            "defect_cross": identities.defect_cross,
            "off_diagonal_adjoint": identities.off_diagonal_adjoint,
        },
        "condition_number": model.condition_number(),
    });
    Ok(report(
        "two_block",
        "model_report",
        tols,
        None,
        inputs,
        results,
    ))
}

fn covariance(
    name: Option<&str>,
    table: Option<&str>,
    grid: &[f64],
    shift: Option<f64>,
    tols: &Tolerances<f64>,
) -> Result<Value, Failure> {
    let (cov, mut inputs) = match (name, table) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(Failure::schema(
                "give exactly one of --name or --table",
            ));
        }
        (Some(name), None) => {
            let cov = CovarianceFunction::catalog()
                .into_iter()
                .find(|r| r.name() == name)
                .ok_or_else(|| {
                    Failure::schema(format!(
                        "unknown covariance {name:?}; built-ins are ou, intexp, rational, damped"
                    ))
                })?;
            let mut inputs = Map::new();
            inputs.insert("name".into(), json!(name));
            (cov, inputs)
        }
        (None, Some(table_arg)) => {
            let samples: std::collections::BTreeMap<String, f64> =
                parse_json(table_arg, "covariance table")?;
            let mut pairs = Vec::with_capacity(samples.len());
            for (key, value) in &samples {
                let t: f64 = key.parse().map_err(|_| {
                    Failure::schema(format!("table key {key:?} is not a number"))
                })?;
                pairs.push((t, *value));
            }
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
            let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let values: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let cov = CovarianceFunction::from_table("table", &times, &values)?;
            let mut inputs = Map::new();
            inputs.insert("table".into(), json!({ "times": times, "values": values }));
            inputs.insert(
                "interpolation".into(),
                json!("linear between samples, clamped at the ends; an approximation of the sampled function"),
            );
            (cov, inputs)
        }
    };
    inputs.insert("grid".into(), json!(grid));

    let mut results = Map::new();
    let stationary = cov.stationary_gram(grid, None, tols)?;
    results.insert(
        "stationary_gram".into(),
        json!({
            "min_eigenvalue": stationary.report.min_eigenvalue,
            "passed": stationary.report.passed,
        }),
    );
    let nonnegative = grid.iter().all(|&t| t >= 0.0);
    if nonnegative {
        let reflected = cov.os_gram(grid, None, tols)?;
        results.insert(
            "os_gram".into(),
            json!({
                "min_eigenvalue": reflected.report.min_eigenvalue,
                "passed": reflected.report.passed,
            }),
        );
        let mut pairs = Vec::new();
        for (i, &s) in grid.iter().enumerate() {
            for &t in &grid[i..] {
                pairs.push((s, t));
            }
        }
        let semigroup = cov.semigroup_check(&pairs, 1e-12)?;
        results.insert(
            "semigroup".into(),
            json!({
                "max_residual": semigroup.max_residual,
                "pairs": pairs.len(),
                "multiplicative": semigroup.passed,
            }),
        );
    } else {
        results.insert(
            "os_gram".into(),
            json!({ "skipped": "grid contains negative times" }),
        );
    }
    if let Some(s) = shift {
        inputs.insert("shift".into(), json!(s));
        let compressed = reflected_semigroup(&cov, grid, s, tols)?;
        results.insert(
            "reflected_shift".into(),
            json!({
                "k_dim": compressed.k_dim,
                "matrix": real_rows(&compressed.matrix),
                "law_residual": compressed.law_residual,
                "base_eigenvalues": compressed.base_eigenvalues,
            }),
        );
    }
    Ok(report(
        "covariance",
        "gram_and_shift",
        tols,
        None,
        Value::Object(inputs),
        Value::Object(results),
    ))
}

fn hs(
    s: f64,
    a: f64,
    n: usize,
    k: usize,
    converge: bool,
    tols: &Tolerances<f64>,
) -> Result<Value, Failure> {
    let disc = HsDiscretization::build(s, n, tols)?;
    let spectrum = disc.dilation_spectrum(a, k, tols)?;
    let conditioning = disc.gram_conditioning(tols);
    let reference: Vec<f64> = (0..k).map(|m| a.powf(s - 1.0 - 2.0 * m as f64)).collect();
    let relative_errors: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .zip(&reference)
        .map(|(&ev, &r)| (ev - r).abs() / r)
        .collect();
    let inputs = json!({ "s": s, "a": a, "n": n, "k": k });
    let mut results = Map::new();
    results.insert("eigenvalues".into(), json!(spectrum.eigenvalues));
    results.insert("reference".into(), json!(reference));
    results.insert("relative_errors".into(), json!(relative_errors));
    results.insert("quotient_dim".into(), json!(spectrum.quotient_dim));
    results.insert(
        "gram_condition".into(),
        json!({
            "lambda_max": conditioning.lambda_max,
            "lambda_min_kept": conditioning.lambda_min_kept,
            "kept": conditioning.kept,
            "effective_condition": conditioning.lambda_max / conditioning.lambda_min_kept,
        }),
    );
    if converge {
        let mut sizes: Vec<usize> = [n / 8, n / 4, n / 2, n]
            .into_iter()
            .filter(|&m| m >= 2)
            .collect();
        sizes.dedup();
        let study = convergence_study(s, a, &sizes, k, tols)?;
        results.insert(
            "convergence".into(),
            json!({
                "sizes": study.sizes,
                "spectra": study.spectra,
                "successive_changes": study.successive_changes,
                "decay_ratio": study.decay_ratio,
                "leading_exponent": study.leading_exponent,
            }),
        );
    }
    Ok(report(
        "hs_kernel",
        "dilation_spectrum",
        tols,
        None,
        inputs,
        Value::Object(results),
    ))
}
