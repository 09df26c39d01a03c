//! End-to-end tests of the command-line interface: exit codes, output
//! determinism, NDJSON streaming, and JSON schema conformance.

use serde_json::Value;
use std::process::{Command, Output};

fn dimerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimerlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = dimerlab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn pfaffians_numeric_matches_known_values() {
    let text = stdout_of(&[
        "pfaffians",
        "--m",
        "4",
        "--n",
        "4",
        "--weights",
        "1",
        "1",
        "1",
    ]);
    assert!(text.contains("Pf A1 = -768"));
    assert!(text.contains("Pf A2 = 1024"));
    assert!(text.contains("sign pattern: match"));
}

#[test]
fn pfaffians_accepts_rational_weights() {
    let text = stdout_of(&[
        "pfaffians",
        "--m",
        "4",
        "--n",
        "3",
        "--weights",
        "1/2",
        "3/2",
        "2",
        "--format",
        "csv",
    ]);
    // PfA1 = -4 zh zd (3 zv^2 + zd^2)(4 zh^2 + 3 zv^2 + 3 zd^2) at (1/2, 3/2, 2)
    // = -4 * (1/2) * 2 * (27/4 + 4) * (1 + 27/4 + 12) = -43 * 79/4 = -3397/4
    assert!(text.contains("1,-3397/4"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    // odd m
    let out = dimerlab(&["pfaffians", "--m", "5", "--n", "3", "--symbolic"]);
    assert_eq!(out.status.code(), Some(2));
    // negative weight
    let out = dimerlab(&[
        "pfaffians",
        "--m",
        "4",
        "--n",
        "3",
        "--weights",
        "-1",
        "1",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // zero weight where strict positivity is required
    let out = dimerlab(&["free-energy", "--weights", "1", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed flags (clap)
    let out = dimerlab(&["pfaffians", "--m", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn size_limits_exit_three() {
    let out = dimerlab(&[
        "pfaffians",
        "--m",
        "6",
        "--n",
        "5",
        "--symbolic",
        "--method",
        "expansion",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = dimerlab(&["enumerate", "--m", "8", "--n", "6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_passes_on_small_lattices() {
    for (m, n) in [(4, 3), (4, 4), (4, 6)] {
        let out = dimerlab(&["verify", "--m", &m.to_string(), "--n", &n.to_string()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stdout)
        );
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("overall: PASS"));
        assert!(!text.contains("FAIL "));
    }
}

#[test]
fn partition_on_six_by_six_reconstructs_z() {
    // mn = 36 is beyond the enumeration cross-check, so Z comes from the
    // four exact Pfaffians alone
    let json: Value = serde_json::from_str(&stdout_of(&[
        "partition",
        "--m",
        "6",
        "--n",
        "6",
        "--weights",
        "1",
        "1",
        "1",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(json["z"], "10045824");
    assert_eq!(json["oracle_residuals"], Value::Null);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = [
        "pfaffians",
        "--m",
        "4",
        "--n",
        "4",
        "--symbolic",
        "--method",
        "interpolation",
        "--format",
        "json",
    ];
    let capped = Command::new(env!("CARGO_BIN_EXE_dimerlab"))
        .args(args)
        .env("DIMERLAB_THREADS", "1")
        .output()
        .expect("binary runs");
    assert!(capped.status.success());
    assert_eq!(String::from_utf8(capped.stdout).unwrap(), stdout_of(&args));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "partition",
        "--m",
        "4",
        "--n",
        "3",
        "--symbolic",
        "--format",
        "json",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
    let args = [
        "free-energy",
        "--weights",
        "1",
        "1",
        "1",
        "--format",
        "json",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
}

#[test]
fn partition_symbolic_reports_odd_n_equalities() {
    let json: Value = serde_json::from_str(&stdout_of(&[
        "partition",
        "--m",
        "4",
        "--n",
        "3",
        "--symbolic",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(json["equal_z00_z10"], Value::Bool(true));
    assert_eq!(json["equal_z01_z11"], Value::Bool(true));
    assert_eq!(json["identities_exact"], Value::Bool(true));
}

#[test]
fn partition_numeric_cross_checks_enumeration() {
    let json: Value = serde_json::from_str(&stdout_of(&[
        "partition",
        "--m",
        "4",
        "--n",
        "4",
        "--weights",
        "1",
        "1",
        "1",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(json["z"], "1920");
    assert_eq!(json["classes"]["z00"], "576");
    assert_eq!(json["classes"]["z10"], "448");
    let residuals = json["oracle_residuals"].as_array().unwrap();
    assert!(residuals.iter().all(|r| r == "0"));
}

#[test]
fn enumerate_streams_ndjson() {
    let text = stdout_of(&["enumerate", "--m", "4", "--n", "3"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 344);
    let first: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["pairs"].as_array().unwrap().len(), 6);
    assert_eq!(first["signs"].as_array().unwrap().len(), 4);
    let total_h: u64 = lines
        .iter()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["counts"]["Nh"]
                .as_u64()
                .unwrap()
        })
        .sum();
    // 8 all-horizontal configurations contribute 6 each; spot total is stable
    assert!(total_h >= 48);
}

#[test]
fn out_flag_writes_files() {
    let dir = std::env::temp_dir().join("dimerlab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    let report_arg = report.to_str().unwrap().to_string();
    let out = dimerlab(&[
        "pfaffians",
        "--m",
        "4",
        "--n",
        "3",
        "--symbolic",
        "--format",
        "json",
        "--out",
        &report_arg,
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["command"], "pfaffians");
    let ndjson = dir.join("configs.ndjson");
    let ndjson_arg = ndjson.to_str().unwrap().to_string();
    let out = dimerlab(&["enumerate", "--m", "4", "--n", "3", "--out", &ndjson_arg]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(&ndjson).unwrap().lines().count(),
        344
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn free_energy_prints_golden_value() {
    let text = stdout_of(&["free-energy", "--weights", "1", "1", "1", "--grid", "1024"]);
    assert!(text.contains("0.857189074930"), "{text}");
}

#[test]
fn asymptotics_csv_columns() {
    let text = stdout_of(&[
        "asymptotics",
        "--weights",
        "1",
        "1",
        "1",
        "--sizes",
        "8x8,16x16",
        "--format",
        "csv",
    ]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("m,n,orientation,log_det_per_site,deviation")
    );
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("8,8,4,"));
}

#[test]
fn asymptotics_scaling_shift() {
    // per-site log det shifts by ln 2 when every weight doubles
    let extract = |weights: &str| -> f64 {
        let json: Value = serde_json::from_str(&stdout_of(&[
            "asymptotics",
            "--weights",
            weights,
            weights,
            weights,
            "--sizes",
            "8x8",
            "--format",
            "json",
        ]))
        .unwrap();
        json["convergence"]["rows"][0]["log_det_per_site"]
            .as_f64()
            .unwrap()
    };
    let base = extract("1");
    let doubled = extract("2");
    assert!((doubled - base - std::f64::consts::LN_2).abs() < 1e-10);
}

// ---------------------------------------------------------------------------
// JSON schema conformance

#[test]
fn json_reports_validate_against_schema() {
    let schema_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schemas/report.json"
    ))
    .unwrap();
    let schema: Value = serde_json::from_str(&schema_text).unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "pfaffians",
            "--m",
            "4",
            "--n",
            "3",
            "--symbolic",
            "--format",
            "json",
        ],
        vec![
            "pfaffians",
            "--m",
            "4",
            "--n",
            "4",
            "--weights",
            "1",
            "1/2",
            "1",
            "--format",
            "json",
        ],
        vec![
            "partition",
            "--m",
            "4",
            "--n",
            "3",
            "--symbolic",
            "--format",
            "json",
        ],
        vec![
            "partition",
            "--m",
            "4",
            "--n",
            "4",
            "--weights",
            "1",
            "1",
            "1",
            "--format",
            "json",
        ],
        vec!["verify", "--m", "4", "--n", "3", "--format", "json"],
        vec![
            "free-energy",
            "--weights",
            "1",
            "1",
            "1",
            "--format",
            "json",
        ],
        vec![
            "asymptotics",
            "--weights",
            "1",
            "1",
            "1",
            "--sizes",
            "8x8,12x8",
            "--fourier-max-freq",
            "2",
            "--format",
            "json",
        ],
    ];
    for args in invocations {
        let doc: Value = serde_json::from_str(&stdout_of(&args)).unwrap();
        validate(&schema, &schema, &doc).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

/// Minimal JSON Schema checker covering the subset used by
/// schemas/report.json: type, enum, properties/required, items,
/// minItems/maxItems, oneOf, and local $ref.
fn validate(root: &Value, schema: &Value, doc: &Value) -> Result<(), String> {
    if let Some(reference) = schema["$ref"].as_str() {
        let target = reference
            .strip_prefix("#/")
            .ok_or("only local refs supported")?
            .split('/')
            .fold(root, |acc, key| &acc[key]);
        if target.is_null() {
            return Err(format!("dangling $ref {reference}"));
        }
        return validate(root, target, doc);
    }
    if let Some(options) = schema["oneOf"].as_array() {
        let hits = options
            .iter()
            .filter(|option| validate(root, option, doc).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("oneOf matched {hits} branches"));
        }
        return Ok(());
    }
    if let Some(allowed) = schema["enum"].as_array() {
        if !allowed.contains(doc) {
            return Err(format!("{doc} not in enum {allowed:?}"));
        }
        return Ok(());
    }
    let type_ok = |name: &str| match name {
        "object" => doc.is_object(),
        "array" => doc.is_array(),
        "string" => doc.is_string(),
        "integer" => doc.is_i64() || doc.is_u64(),
        "number" => doc.is_number(),
        "boolean" => doc.is_boolean(),
        "null" => doc.is_null(),
        _ => false,
    };
    match &schema["type"] {
        Value::String(name) => {
            if !type_ok(name) {
                return Err(format!("expected {name}, got {doc}"));
            }
        }
        Value::Array(names) => {
            if !names.iter().any(|n| type_ok(n.as_str().unwrap())) {
                return Err(format!("expected one of {names:?}, got {doc}"));
            }
        }
        _ => {}
    }
    if doc.is_null() {
        return Ok(());
    }
    if let Some(obj) = doc.as_object() {
        if let Some(required) = schema["required"].as_array() {
            for key in required {
                if !obj.contains_key(key.as_str().unwrap()) {
                    return Err(format!("missing required field {key}"));
                }
            }
        }
        if let Some(props) = schema["properties"].as_object() {
            for (key, sub) in props {
                if let Some(value) = obj.get(key) {
                    validate(root, sub, value).map_err(|e| format!("{key}: {e}"))?;
                }
            }
        }
    }
    if let Some(arr) = doc.as_array() {
        if let Some(min) = schema["minItems"].as_u64() {
            if (arr.len() as u64) < min {
                return Err(format!("array shorter than {min}"));
            }
        }
        if let Some(max) = schema["maxItems"].as_u64() {
            if (arr.len() as u64) > max {
                return Err(format!("array longer than {max}"));
            }
        }
        if schema["items"].is_object() {
            for (i, item) in arr.iter().enumerate() {
                validate(root, &schema["items"], item).map_err(|e| format!("[{i}]: {e}"))?;
            }
        }
    }
    Ok(())
}
