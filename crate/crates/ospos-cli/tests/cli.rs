//! End-to-end tests for the `ospos` binary.
//!
//! Every successful report is validated against the schema bundle printed by
//! `ospos --schema`, so these tests pin both the numerical behavior and the
//! published output contract. The validator below covers exactly the
//! draft-07 subset the shipped schemas use.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ospos"));
    // Keep ambient tolerance overrides from leaking into the fixtures.
    cmd.env_remove("OSPOS_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Runs the CLI expecting success and returns the parsed stdout report.
fn run_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

/// Runs the CLI expecting failure; returns the exit code and error envelope.
fn run_err(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    assert!(!out.status.success(), "command {args:?} unexpectedly passed");
    let code = out.status.code().expect("exit code");
    let envelope = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    (code, envelope)
}

fn error_kind(envelope: &Value) -> &str {
    envelope["error"]["kind"].as_str().expect("error kind")
}

fn schema_bundle() -> Value {
    let out = run(&["--schema"]);
    assert!(out.status.success(), "--schema failed");
    serde_json::from_slice(&out.stdout).expect("schema bundle is JSON")
}

/// Validates `value` against the report schema named `name` in the bundle.
fn check_report(name: &str, value: &Value) {
    let bundle = schema_bundle();
    let schema = bundle.get(name).unwrap_or_else(|| panic!("schema {name}"));
    if let Err(message) = validate(schema, value, &bundle, name) {
        panic!("report does not match schema {name}: {message}");
    }
}

/// Structural validator for the draft-07 subset used by the shipped schemas:
/// $ref, type, const, required, properties, additionalProperties, items,
/// oneOf, minItems, maxItems, minimum.
fn validate(schema: &Value, value: &Value, bundle: &Value, path: &str) -> Result<(), String> {
    let obj = match schema.as_object() {
        Some(obj) => obj,
        None => return Err(format!("{path}: schema is not an object")),
    };
    if let Some(reference) = obj.get("$ref").and_then(Value::as_str) {
        let key = reference
            .strip_prefix("ospos/")
            .and_then(|rest| rest.strip_suffix(".json"))
            .ok_or_else(|| format!("{path}: unresolvable $ref {reference}"))?;
        let target = bundle
            .get(key)
            .ok_or_else(|| format!("{path}: $ref {reference} missing from bundle"))?;
        return validate(target, value, bundle, path);
    }
    if let Some(expected) = obj.get("const") {
        if expected != value {
            return Err(format!("{path}: expected const {expected}, got {value}"));
        }
    }
    if let Some(kinds) = obj.get("type") {
        let names: Vec<&str> = match kinds {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: malformed type keyword")),
        };
        if !names.iter().any(|&name| type_matches(name, value)) {
            return Err(format!("{path}: value {value} is not of type {names:?}"));
        }
    }
    if let Some(minimum) = obj.get("minimum").and_then(Value::as_f64) {
        let number = value
            .as_f64()
            .ok_or_else(|| format!("{path}: minimum applied to non-number"))?;
        if number < minimum {
            return Err(format!("{path}: {number} below minimum {minimum}"));
        }
    }
    if let Some(branches) = obj.get("oneOf").and_then(Value::as_array) {
        let mut matched = 0;
        let mut failures = Vec::new();
        for (i, branch) in branches.iter().enumerate() {
            match validate(branch, value, bundle, &format!("{path}/oneOf[{i}]")) {
                Ok(()) => matched += 1,
                Err(message) => failures.push(message),
            }
        }
        if matched != 1 {
            return Err(format!(
                "{path}: {matched} of {} oneOf branches matched; {failures:?}",
                branches.len()
            ));
        }
    }
    if let Some(map) = value.as_object() {
        if let Some(required) = obj.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    return Err(format!("{path}: missing required key {key:?}"));
                }
            }
        }
        let empty = serde_json::Map::new();
        let properties = obj
            .get("properties")
            .and_then(Value::as_object)
            .unwrap_or(&empty);
        for (key, subschema) in properties {
            if let Some(member) = map.get(key) {
                validate(subschema, member, bundle, &format!("{path}/{key}"))?;
            }
        }
        match obj.get("additionalProperties") {
            Some(Value::Bool(false)) => {
                for key in map.keys() {
                    if !properties.contains_key(key) {
                        return Err(format!("{path}: unexpected key {key:?}"));
                    }
                }
            }
            Some(extra @ Value::Object(_)) => {
                for (key, member) in map {
                    if !properties.contains_key(key) {
                        validate(extra, member, bundle, &format!("{path}/{key}"))?;
                    }
                }
            }
            _ => {}
        }
    }
    if let Some(list) = value.as_array() {
        if let Some(items) = obj.get("items") {
            for (i, member) in list.iter().enumerate() {
                validate(items, member, bundle, &format!("{path}[{i}]"))?;
            }
        }
        if let Some(min) = obj.get("minItems").and_then(Value::as_u64) {
            if (list.len() as u64) < min {
                return Err(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(max) = obj.get("maxItems").and_then(Value::as_u64) {
            if (list.len() as u64) > max {
                return Err(format!("{path}: more than {max} items"));
            }
        }
    }
    Ok(())
}

fn type_matches(name: &str, value: &Value) -> bool {
    match name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "number" => value.is_number(),
        "integer" => value.is_i64() || value.is_u64(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        _ => false,
    }
}

/// Builds subspace JSON from real column vectors.
fn subspace_json(ambient: usize, columns: &[&[f64]]) -> String {
    let rows: Vec<String> = (0..ambient)
        .map(|r| {
            let entries: Vec<String> = columns.iter().map(|col| col[r].to_string()).collect();
            format!("[{}]", entries.join(","))
        })
        .collect();
    format!(
        "{{\"ambient_dim\":{ambient},\"frame\":{{\"dim\":{ambient},\"entries\":[{}]}}}}",
        rows.join(",")
    )
}

fn reflection_json(ambient: usize, fixed_columns: &[&[f64]]) -> String {
    format!(
        "{{\"ambient_dim\":{ambient},\"fixed_space\":{}}}",
        subspace_json(ambient, fixed_columns)
    )
}

fn triple_json(center: &str, plus: &str, minus: &str) -> String {
    format!("{{\"center\":{center},\"plus\":{plus},\"minus\":{minus}}}")
}

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[test]
fn schema_bundle_lists_every_published_schema() {
    let bundle = schema_bundle();
    let expected = [
        "matrix",
        "tolerances",
        "subspace",
        "reflection",
        "triple",
        "error",
        "report-geometry",
        "report-renorm",
        "report-markov",
        "report-twoblock",
        "report-covariance",
        "report-hs",
    ];
    let map = bundle.as_object().expect("bundle is an object");
    assert_eq!(map.len(), expected.len());
    for name in expected {
        let id = bundle[name]["$id"].as_str().expect("schema id");
        assert_eq!(id, format!("ospos/{name}.json"));
    }
}

#[test]
fn geometry_reports_boundary_contraction() {
    let theta = reflection_json(2, &[&[1.0, 0.0]]);
    let graph = subspace_json(2, &[&[INV_SQRT2, INV_SQRT2]]);
    let report = run_ok(&["geometry", "--theta", &theta, "--subspace", &graph]);
    check_report("report-geometry", &report);

    assert_eq!(report["module"], "reflection");
    let results = &report["results"];
    assert!(results["os_positivity"]["passed"].as_bool().unwrap());
    let min_eig = results["os_positivity"]["min_eigenvalue"].as_f64().unwrap();
    assert!(min_eig.abs() <= 1e-12, "graph of an isometry sits on the boundary");
    let norm = results["contraction"]["norm"].as_f64().unwrap();
    assert!((norm - 1.0).abs() <= 1e-9);
    assert_eq!(results["kernel_check"]["passed"], true);
    assert_eq!(results["kernel_check"]["intersection_dim"], 0);
}

#[test]
fn geometry_reports_failure_with_witness() {
    let theta = reflection_json(2, &[&[1.0, 0.0]]);
    let negative = subspace_json(2, &[&[0.0, 1.0]]);
    let report = run_ok(&["geometry", "--theta", &theta, "--subspace", &negative]);
    check_report("report-geometry", &report);

    let positivity = &report["results"]["os_positivity"];
    assert_eq!(positivity["passed"], false);
    assert!((positivity["min_eigenvalue"].as_f64().unwrap() + 1.0).abs() <= 1e-12);
    assert!(positivity["witness"].is_array(), "failed check carries a witness");
    assert!(report["results"].get("contraction").is_none());
}

#[test]
fn renorm_compresses_a_conjugate_phase_pair() {
    let fixed = [INV_SQRT2, INV_SQRT2];
    let input = format!(
        "{{\"theta\":{},\"h_plus\":{},\"u\":[[[0.6,0.8],[0,0]],[[0,0],[0.6,-0.8]]]}}",
        reflection_json(2, &[&fixed]),
        subspace_json(2, &[&fixed]),
    );
    let report = run_ok(&["renorm", "--input", &input]);
    check_report("report-renorm", &report);

    let results = &report["results"];
    assert_eq!(results["k_dim"], 1);
    let gram = results["gram_eigenvalues"][0].as_f64().unwrap();
    assert!((gram - 1.0).abs() <= 1e-12);
    let spectrum = &results["u_tilde_spectrum"];
    // The compression of diag(w, conj w) acts as Re w on the quotient line.
    assert!((spectrum["eigenvalues"][0].as_f64().unwrap() - 0.6).abs() <= 1e-12);
    assert!(spectrum["hermitian_residual"].as_f64().unwrap() <= 1e-12);
    assert!(spectrum["spectral_radius"].as_f64().unwrap() <= 1.0 + 1e-12);
}

#[test]
fn renorm_accepts_the_trivial_semigroup_generator() {
    let fixed = [INV_SQRT2, INV_SQRT2];
    let input = format!(
        "{{\"theta\":{},\"h_plus\":{},\"a\":[[0,0],[0,0]],\"t0\":1.0}}",
        reflection_json(2, &[&fixed]),
        subspace_json(2, &[&fixed]),
    );
    let report = run_ok(&["renorm", "--input", &input]);
    check_report("report-renorm", &report);

    let spectrum = &report["results"]["u_tilde_spectrum"];
    assert!((spectrum["eigenvalues"][0].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert!(spectrum["generator_eigenvalues"][0].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(spectrum["law_residual"], 0.0);
    assert_eq!(spectrum["t0"], 1.0);
}

#[test]
fn renorm_rejects_a_rotation_that_breaks_the_semigroup_law() {
    // diag(i, -i) compresses to cos(t) on the quotient line; the doubled
    // step misses the square by sin(t)^2, so the law gate must fire.
    let fixed = [INV_SQRT2, INV_SQRT2];
    let input = format!(
        "{{\"theta\":{},\"h_plus\":{},\"a\":[[[0,1],[0,0]],[[0,0],[0,-1]]],\"t0\":1.0}}",
        reflection_json(2, &[&fixed]),
        subspace_json(2, &[&fixed]),
    );
    let (code, envelope) = run_err(&["renorm", "--input", &input]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "SemigroupLawViolation");
}

#[test]
fn renorm_rejects_a_generator_that_is_not_skew() {
    let fixed = [INV_SQRT2, INV_SQRT2];
    let input = format!(
        "{{\"theta\":{},\"h_plus\":{},\"a\":[[1,0],[0,1]]}}",
        reflection_json(2, &[&fixed]),
        subspace_json(2, &[&fixed]),
    );
    let (code, envelope) = run_err(&["renorm", "--input", &input]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "NotSkewAdjoint");
}

#[test]
fn renorm_rejects_both_operator_and_generator() {
    let fixed = [INV_SQRT2, INV_SQRT2];
    let input = format!(
        "{{\"theta\":{},\"h_plus\":{},\"u\":[[1]],\"a\":[[1]]}}",
        reflection_json(2, &[&fixed]),
        subspace_json(2, &[&fixed]),
    );
    let (code, envelope) = run_err(&["renorm", "--input", &input]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "SchemaError");
}

#[test]
fn markov_search_finds_a_negative_tilted_pair() {
    let triple = triple_json(
        &subspace_json(2, &[]),
        &subspace_json(2, &[&[1.0, 0.0]]),
        &subspace_json(2, &[&[INV_SQRT2, INV_SQRT2]]),
    );
    let report = run_ok(&["markov", "--triple", &triple, "--seed", "7"]);
    check_report("report-markov", &report);

    assert_eq!(report["seed"], 7);
    let search = &report["results"]["witness_search"];
    assert_eq!(search["status"], "found");
    let value = search["value"].as_f64().unwrap();
    assert!((value + INV_SQRT2).abs() <= 1e-9, "tilted pair attains -1/sqrt(2)");
    assert!(search["reflection"]["fixed_space"]["frame"]["entries"].is_array());
}

#[test]
fn markov_search_reports_inapplicable_on_a_markov_triple() {
    let line = subspace_json(2, &[&[1.0, 0.0]]);
    let triple = triple_json(&line, &line, &line);
    let report = run_ok(&["markov", "--triple", &triple, "--seed", "1"]);
    check_report("report-markov", &report);

    let results = &report["results"];
    assert_eq!(results["markov"]["is_markov"], true);
    assert_eq!(results["witness_search"]["status"], "inapplicable");
    assert_eq!(results["witness_search"]["markov_residual"], 0.0);
}

#[test]
fn markov_search_exhausts_trials_on_a_coupled_triple() {
    // Graph triple of the scalar two-block model with c = 1/2; no negative
    // adapted reflection is expected for a nonzero coupling.
    let g1 = 0.8944271909999159;
    let g2 = 0.4472135954999579;
    let triple = triple_json(
        &subspace_json(2, &[&[1.0, 0.0]]),
        &subspace_json(2, &[&[g1, g2]]),
        &subspace_json(2, &[&[g1, -g2]]),
    );
    let report = run_ok(&["markov", "--triple", &triple, "--seed", "11", "--trials", "60"]);
    check_report("report-markov", &report);

    let results = &report["results"];
    assert_eq!(results["markov"]["is_markov"], false);
    let search = &results["witness_search"];
    assert_eq!(search["status"], "not_found");
    assert_eq!(search["trials"], 60);
}

#[test]
fn markov_reports_are_deterministic_per_seed() {
    let triple = triple_json(
        &subspace_json(2, &[]),
        &subspace_json(2, &[&[1.0, 0.0]]),
        &subspace_json(2, &[&[INV_SQRT2, INV_SQRT2]]),
    );
    let first = run(&["markov", "--triple", &triple, "--seed", "42"]);
    let second = run(&["markov", "--triple", &triple, "--seed", "42"]);
    let third = run(&["markov", "--triple", &triple, "--seed", "43"]);
    assert!(first.status.success() && second.status.success() && third.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed, byte-identical report");
    assert_ne!(first.stdout, third.stdout, "seed is part of the report");
}

#[test]
fn markov_requires_a_seed() {
    let triple = triple_json(
        &subspace_json(2, &[]),
        &subspace_json(2, &[&[1.0, 0.0]]),
        &subspace_json(2, &[&[0.0, 1.0]]),
    );
    let out = run(&["markov", "--triple", &triple]);
    assert_eq!(out.status.code(), Some(2), "clap rejects a missing seed");
}

#[test]
fn twoblock_reports_the_scalar_half_model() {
    let report = run_ok(&["twoblock", "--c", "[[0.5]]"]);
    check_report("report-twoblock", &report);

    let results = &report["results"];
    let e_plus = &results["e_plus"]["entries"];
    let expected = [[0.8, 0.4], [0.4, 0.2]];
    for (i, row) in expected.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            // Matrix entries serialize as [re, im] pairs.
            let got = e_plus[i][j][0].as_f64().unwrap();
            let imag = e_plus[i][j][1].as_f64().unwrap();
            assert!((got - want).abs() <= 1e-12, "E+[{i}][{j}] = {got}, want {want}");
            assert_eq!(imag, 0.0);
        }
    }
    let markov = &results["markov"];
    assert_eq!(markov["is_markov"], false);
    assert!((markov["residual"].as_f64().unwrap() - 0.2).abs() <= 1e-12);
    assert!((markov["c_norm"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    assert!(results["identity_residuals"]["off_diagonal_adjoint"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn twoblock_rejects_an_expansive_coupling() {
    let (code, envelope) = run_err(&["twoblock", "--c", "[[1.5]]"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "NotContraction");
}

#[test]
fn covariance_catalog_run_hits_the_quotient_closed_form() {
    let report = run_ok(&[
        "covariance", "--name", "ou", "--grid", "0,1,2,3", "--shift", "1",
    ]);
    check_report("report-covariance", &report);

    let results = &report["results"];
    assert_eq!(results["stationary_gram"]["passed"], true);
    assert_eq!(results["os_gram"]["passed"], true);
    assert_eq!(results["semigroup"]["multiplicative"], true);
    assert!(results["semigroup"]["max_residual"].as_f64().unwrap() <= 1e-12);

    let shift = &results["reflected_shift"];
    assert_eq!(shift["k_dim"], 1);
    let compressed = shift["matrix"][0][0].as_f64().unwrap();
    assert!(
        (compressed - (-1.0f64).exp()).abs() <= 1e-9,
        "unit shift of the exponential covariance compresses to e^-1"
    );
    assert!(shift["law_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn covariance_table_input_is_interpolated() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("table.json");
    std::fs::write(&path, r#"{"0": 1.0, "1": 0.5, "2": 0.25}"#).expect("write table");
    let report = run_ok(&[
        "covariance", "--table", path.to_str().unwrap(), "--grid", "0,0.5,1,1.5",
    ]);
    check_report("report-covariance", &report);

    assert_eq!(report["inputs"]["table"]["times"], serde_json::json!([0.0, 1.0, 2.0]));
    let label = report["inputs"]["interpolation"].as_str().unwrap();
    assert!(label.contains("approximation"), "interpolation is labeled honestly");
    assert!(report["results"]["stationary_gram"]["min_eigenvalue"].is_number());
}

#[test]
fn covariance_skips_reflected_gram_on_negative_times() {
    let report = run_ok(&["covariance", "--name", "ou", "--grid", "-1,0,1"]);
    check_report("report-covariance", &report);

    let results = &report["results"];
    assert_eq!(results["stationary_gram"]["passed"], true);
    assert!(results["os_gram"]["skipped"].is_string());
    assert!(results.get("semigroup").is_none());
}

#[test]
fn covariance_requires_exactly_one_source() {
    let (code, envelope) = run_err(&["covariance", "--grid", "0,1"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "SchemaError");

    let (code, envelope) = run_err(&[
        "covariance", "--name", "ou", "--table", "{}", "--grid", "0,1",
    ]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "SchemaError");

    let (code, envelope) = run_err(&["covariance", "--name", "unknown", "--grid", "0,1"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "SchemaError");
}

#[test]
fn hs_report_tracks_the_dilation_ladder() {
    let report = run_ok(&["hs", "--s", "0.5", "--a", "2", "--n", "50", "--k", "3"]);
    check_report("report-hs", &report);

    let results = &report["results"];
    let reference: Vec<f64> = results["reference"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    // Scaled-kernel compression ladder a^(s-1-2m) at s = 1/2, a = 2.
    let expected = [INV_SQRT2, INV_SQRT2 / 4.0, INV_SQRT2 / 16.0];
    for (got, want) in reference.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-15);
    }
    let errors = results["relative_errors"].as_array().unwrap();
    assert!(errors[0].as_f64().unwrap() <= 1e-9);
    assert!(errors[1].as_f64().unwrap() <= 1e-7);
    assert!(errors[2].as_f64().unwrap() <= 1e-5);
    assert!(results["gram_condition"]["effective_condition"].as_f64().unwrap() >= 1.0);
}

#[test]
fn hs_convergence_study_is_reported_on_request() {
    let report = run_ok(&["hs", "--s", "0.5", "--a", "2", "--n", "64", "--k", "2", "--converge"]);
    check_report("report-hs", &report);

    let convergence = &report["results"]["convergence"];
    assert_eq!(
        convergence["sizes"],
        serde_json::json!([8, 16, 32, 64]),
        "doubling ladder below the requested size"
    );
    let changes = convergence["successive_changes"].as_array().unwrap();
    assert_eq!(changes.len(), 3);
    for change in changes {
        assert!(change.as_f64().unwrap() <= 1e-4, "spectra settle along the ladder");
    }
}

#[test]
fn hs_rejects_exponents_outside_the_open_interval() {
    let (code, envelope) = run_err(&["hs", "--s", "1.5", "--a", "2", "--n", "20", "--k", "2"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "InvalidS");
}

#[test]
fn malformed_json_fails_with_a_schema_error() {
    let (code, envelope) = run_err(&["twoblock", "--c", "{not json"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "SchemaError");
    check_report("error", &envelope);
}

#[test]
fn missing_input_file_fails_with_an_io_error() {
    let (code, envelope) = run_err(&["twoblock", "--c", "/nonexistent/c.json"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "IoError");
}

#[test]
fn file_and_inline_inputs_produce_identical_reports() {
    let theta = reflection_json(2, &[&[1.0, 0.0]]);
    let graph = subspace_json(2, &[&[INV_SQRT2, INV_SQRT2]]);
    let dir = tempfile::tempdir().expect("tempdir");
    let theta_path = dir.path().join("theta.json");
    let graph_path = dir.path().join("graph.json");
    std::fs::write(&theta_path, &theta).expect("write theta");
    std::fs::write(&graph_path, &graph).expect("write graph");

    let inline = run(&["geometry", "--theta", &theta, "--subspace", &graph]);
    let from_files = run(&[
        "geometry",
        "--theta",
        theta_path.to_str().unwrap(),
        "--subspace",
        graph_path.to_str().unwrap(),
    ]);
    assert!(inline.status.success() && from_files.status.success());
    assert_eq!(inline.stdout, from_files.stdout);
}

#[test]
fn tolerance_override_is_recorded_in_the_report() {
    let out = bin()
        .env("OSPOS_TOL", "1e-6")
        .args(["twoblock", "--c", "[[0.5]]"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).expect("report");
    assert_eq!(report["tolerances"]["tol_psd"], 1e-6);
    assert_eq!(report["tolerances"]["tol_proj"], 1e-6);

    let out = bin()
        .env("OSPOS_TOL", "not-a-number")
        .args(["twoblock", "--c", "[[0.5]]"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let (code, envelope) = run_err(&[]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&envelope), "SchemaError");
}
