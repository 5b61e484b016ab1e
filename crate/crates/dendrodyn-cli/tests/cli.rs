//! End-to-end CLI tests: report shapes against the shipped schemas,
//! deterministic output, and exit codes.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dendrodyn"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

fn fixtures(dir: &Path) {
    write(
        dir,
        "refl.json",
        r#"{
  "tree": {"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "len": "1"}]},
  "vertex_images": {"a": {"vertex": "b"}, "b": {"vertex": "a"}}
}"#,
    );
    write(
        dir,
        "tent.json",
        r#"{
  "tree": {"vertices": ["a", "m", "b"],
           "edges": [{"u": "a", "v": "m", "len": "1/2"}, {"u": "m", "v": "b", "len": "1/2"}]},
  "vertex_images": {"a": {"vertex": "a"}, "m": {"vertex": "b"}, "b": {"vertex": "a"}}
}"#,
    );
    write(
        dir,
        "pts.json",
        r#"[{"edge": 0, "offset": "3/10"}, {"vertex": "a"}, {"edge": 0, "offset": "1/2"}]"#,
    );
    write(
        dir,
        "segs.json",
        r#"[{"subtree": [{"edge": 0, "offset": "1/5"}, {"edge": 0, "offset": "3/5"}]}]"#,
    );
    write(
        dir,
        "sets.json",
        r#"[{"finite_set": [{"edge": 0, "offset": "3/10"}, {"edge": 0, "offset": "9/10"}]}]"#,
    );
    write(
        dir,
        "ytree.json",
        r#"{"vertices": ["c", "a", "b", "d"],
 "edges": [{"u": "c", "v": "a", "len": "1"}, {"u": "c", "v": "b", "len": "1"}, {"u": "c", "v": "d", "len": "1"}]}"#,
    );
    write(
        dir,
        "ypts.json",
        r#"[{"vertex": "a"}, {"vertex": "b"}, {"vertex": "d"}, {"vertex": "c"}]"#,
    );
}

/// Minimal JSON Schema checker covering the subset the shipped schemas use:
/// type, const, pattern, required, properties, additionalProperties, items,
/// oneOf.
fn check_schema(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
        let hits = options
            .iter()
            .filter(|s| check_schema(s, value, path).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("{path}: oneOf matched {hits} branches"));
        }
        return Ok(());
    }
    if let Some(want) = schema.get("const") {
        if want != value {
            return Err(format!("{path}: expected const {want}"));
        }
    }
    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.is_i64() || value.is_u64(),
            "number" => value.is_number(),
            "boolean" => value.is_boolean(),
            other => return Err(format!("{path}: unsupported schema type {other}")),
        };
        if !ok {
            return Err(format!("{path}: expected {ty}, got {value}"));
        }
    }
    if let Some(pattern) = schema.get("pattern").and_then(Value::as_str) {
        // The only pattern in use is the rational "p/q" form.
        let s = value.as_str().ok_or_else(|| format!("{path}: not a string"))?;
        if pattern.contains('/') {
            let stripped = s.strip_prefix('-').unwrap_or(s);
            let mut halves = stripped.split('/');
            let num = halves.next().unwrap_or("");
            let den = halves.next().unwrap_or("");
            let digits = |t: &str| !t.is_empty() && t.chars().all(|c| c.is_ascii_digit());
            if !(digits(num) && digits(den) && halves.next().is_none()) {
                return Err(format!("{path}: {s:?} is not a p/q rational"));
            }
        }
    }
    if value.is_object() {
        let obj = value.as_object().unwrap();
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for r in required {
                let key = r.as_str().unwrap();
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required field {key}"));
                }
            }
        }
        if let Some(props) = props {
            if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                for key in obj.keys() {
                    if !props.contains_key(key) {
                        return Err(format!("{path}: unexpected field {key}"));
                    }
                }
            }
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    check_schema(sub, v, &format!("{path}.{key}"))?;
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            check_schema(items, v, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn validate(kind: &str, report: &Value) {
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{kind}.schema.json"));
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(&schema_path).unwrap()).unwrap();
    if let Err(e) = check_schema(&schema, report, kind) {
        panic!("{kind} report fails its schema: {e}\n{report:#}");
    }
}

#[test]
fn star_entropy_certificate_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["star", "entropy", "--k", "2", "--n", "3"], dir.path());
    let report = stdout_json(&out);
    validate("entropy", &report);
    assert_eq!(report["kind"], "entropy");
    assert_eq!(report["family_size"], 8);
    assert_eq!(report["pairs_checked"], 28);
    assert_eq!(report["min_separation"], "1/2");
}

#[test]
fn map_check_reports_fold_witness() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = run(&["map", "check", "--map", "tent.json"], dir.path());
    let report = stdout_json(&out);
    validate("map_check", &report);
    assert_eq!(report["monotone"], false);
    assert_eq!(report["witness"]["target"], "vertex:m");
    let pre: Vec<&str> = vec![
        report["witness"]["preimage_a"].as_str().unwrap(),
        report["witness"]["preimage_b"].as_str().unwrap(),
    ];
    assert!(pre.contains(&"edge:0@1/4") && pre.contains(&"edge:1@1/4"));
    // The reflection is monotone and invertible.
    let out = run(&["map", "check", "--map", "refl.json"], dir.path());
    let report = stdout_json(&out);
    assert_eq!(report["monotone"], true);
    assert_eq!(report["cellwise_bijective"], true);
}

#[test]
fn odometer_full_cycle_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["odometer", "--base", "2,2,2,2", "--depth", "4", "--samples", "3"],
        dir.path(),
    );
    let report = stdout_json(&out);
    validate("odometer", &report);
    assert_eq!(report["cycle_length"], "16");
    assert_eq!(report["single_cycle"], true);
    for sample in report["samples"].as_array().unwrap() {
        let certs = sample["certificates"].as_array().unwrap();
        assert_eq!(certs.len(), 5, "certificates for every M <= 4");
    }
}

#[test]
fn omega_reports_in_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = run(
        &["omega", "--map", "refl.json", "--samples", "pts.json"],
        dir.path(),
    );
    let report = stdout_json(&out);
    validate("omega", &report);
    let samples = report["samples"].as_array().unwrap();
    assert_eq!(samples[0]["omega_points"].as_array().unwrap().len(), 2);
    assert_eq!(samples[2]["recurrence"], "fixed");
    let out = run(
        &[
            "omega",
            "--map",
            "refl.json",
            "--samples",
            "pts.json",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sample,resolved,period,omega_size,recurrence"));
    assert_eq!(text.lines().count(), 4, "header plus one row per sample");
}

#[test]
fn hyper_orbit_and_companion_reports() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = run(
        &[
            "hyper", "orbit", "--map", "refl.json", "--elements", "segs.json", "--space", "t2",
        ],
        dir.path(),
    );
    let report = stdout_json(&out);
    validate("hyper_orbit", &report);
    assert_eq!(report["elements"][0]["resolved"], true);
    assert_eq!(report["elements"][0]["period"], 2);
    let out = run(
        &[
            "hyper",
            "companion",
            "--map",
            "refl.json",
            "--elements",
            "sets.json",
            "--space",
            "f2",
        ],
        dir.path(),
    );
    let report = stdout_json(&out);
    validate("hyper_companion", &report);
    assert_eq!(
        report["elements"][0]["nearest_periodic_distance"],
        "0/1"
    );
    let out = run(
        &[
            "hyper", "liyorke", "--map", "refl.json", "--space", "f3", "--pairs", "40",
            "--horizon", "1000",
        ],
        dir.path(),
    );
    let report = stdout_json(&out);
    validate("liyorke_scan", &report);
    assert_eq!(report["li_yorke_exceptions"], 0);
}

#[test]
fn star_chaos_certificate_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "star",
            "chaos",
            "--lambda",
            "1/2",
            "--lambda-prime",
            "1",
            "--alphas",
            "4",
            "--horizon",
            "256",
        ],
        dir.path(),
    );
    let report = stdout_json(&out);
    validate("omega_chaos", &report);
    assert_eq!(report["witnesses"].as_array().unwrap().len(), 4);
}

#[test]
fn entropy_curve_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = run(
        &[
            "entropy", "--map", "refl.json", "--pool-size", "30", "--n-max", "3",
            "--eps-list", "1/10,1/2", "--format", "csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,eps,count,rate"));
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    // JSON variant validates too.
    let out = run(
        &[
            "entropy", "--map", "refl.json", "--pool-size", "30", "--n-max", "2",
        ],
        dir.path(),
    );
    validate("entropy_curve", &stdout_json(&out));
}

#[test]
fn corpus_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "corpus",
        "--maps",
        "2",
        "--samples",
        "5",
        "--pairs",
        "10",
        "--companions",
        "3",
        "--seed",
        "42",
        "--horizon",
        "2000",
    ];
    let out1 = run(&args, dir.path());
    let report = stdout_json(&out1);
    validate("corpus", &report);
    assert_eq!(report["passed"], true);
    let out2 = bin()
        .args(args)
        .env("DENDRODYN_THREADS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out2.status.success());
    assert_eq!(
        out1.stdout, out2.stdout,
        "byte-identical output for identical config and seed"
    );
}

#[test]
fn geom_report_on_y_tree() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = run(
        &["geom", "--tree", "ytree.json", "--points", "ypts.json"],
        dir.path(),
    );
    let report = stdout_json(&out);
    validate("geom", &report);
    assert_eq!(report["distances"][0]["distance"], "2/1");
    // Hull of all three leaves plus the interior center: endpoints are the
    // leaves only.
    let ends: Vec<&str> = report["hull_endpoints"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(ends, vec!["vertex:a", "vertex:b", "vertex:d"]);
    assert_eq!(report["orders"][3], 3);
}

#[test]
fn malformed_inputs_exit_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    write(dir.path(), "bad.json", "{\"vertices\": [\"a\"],\n \"edges\": oops}");
    let out = run(&["geom", "--tree", "bad.json", "--points", "pts.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:2:"), "diagnostic with position: {err}");
    // Unknown vertex in a map file.
    write(
        dir.path(),
        "badmap.json",
        r#"{"tree": {"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "len": "1"}]},
            "vertex_images": {"a": {"vertex": "zz"}, "b": {"vertex": "a"}}}"#,
    );
    let out = run(&["map", "check", "--map", "badmap.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zz"));
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("cert.json");
    let out = run(
        &[
            "star",
            "entropy",
            "--k",
            "3",
            "--n",
            "2",
            "--out",
            out_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["family_size"], 9);
}

#[test]
fn budget_cap_is_an_explicit_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["star", "entropy", "--k", "4", "--n", "8", "--budget", "100000"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}
