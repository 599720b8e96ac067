//! End-to-end tests of the `stabrank` binary: exit-status contract,
//! report envelopes, JSON/CSV numeric parity, and certificate round trips.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    run_in(args, None)
}

fn run_in(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stabrank"));
    cmd.args(args);
    if let Some(dir) = cache {
        cmd.env("STABRANK_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn report(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON envelope")
}

#[test]
fn verify_identities_exits_zero() {
    let out = run(&["verify", "--suite", "identities"]);
    assert_eq!(out.status.code(), Some(0));
    let env = report(&out);
    assert_eq!(env["command"], "verify");
    assert_eq!(env["report"][0]["passed"], true);
    assert_eq!(env["config"]["seed"], 7);
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stab_enum_counts_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(&["stab-enum", "--p", "2", "--n", "2"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let env = report(&out);
    assert_eq!(env["report"]["count"], 60);
    assert_eq!(env["report"]["count_matches_formula"], true);
    // over-budget request refuses with exit 2
    let refused = run(&["stab-enum", "--p", "7", "--n", "3"]);
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn stab_enum_writes_catalog_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.json");
    let out = run_in(
        &[
            "stab-enum",
            "--p",
            "2",
            "--n",
            "1",
            "--out",
            path.to_str().unwrap(),
        ],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0));
    let file: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(file["format_version"], 1);
    assert_eq!(file["count"], 6);
    assert_eq!(file["states"].as_array().unwrap().len(), 6);
}

#[test]
fn stab_rank_magic_and_plus() {
    let dir = tempfile::tempdir().unwrap();
    let magic = run_in(
        &["stab-rank", "--p", "2", "--n", "1", "--state", "magic"],
        Some(dir.path()),
    );
    assert_eq!(magic.status.code(), Some(0));
    let env = report(&magic);
    assert_eq!(env["report"]["rank"], 2);
    assert_eq!(env["report"]["witness_reverified"], true);
    let plus = run_in(
        &["stab-rank", "--p", "2", "--n", "1", "--state", "plus"],
        Some(dir.path()),
    );
    assert_eq!(report(&plus)["report"]["rank"], 1);
}

#[test]
fn certificate_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("rank2.json");
    let out = run(&[
        "rank2",
        "--p",
        "2",
        "--n",
        "2",
        "--state",
        "magic",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    // |x|/8 has degree 3: rank2 refuses the precondition with exit 2
    assert_eq!(out.status.code(), Some(2));
    // use a quadratic via a polynomial file instead
    let poly_path = dir.path().join("poly.txt");
    std::fs::write(&poly_path, "2 2 0 0 ; 0 1 | 1 | 1 ; 1 0 | 1 | 1\n").unwrap();
    let state_arg = format!("file:{}", poly_path.display());
    let out2 = run(&[
        "rank2",
        "--p",
        "2",
        "--n",
        "2",
        "--state",
        &state_arg,
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out2.status.code(), Some(0));
    let env: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    assert_eq!(env["report"]["rank"], 2);
    // extract the embedded certificate and re-verify it standalone
    let cert_path = dir.path().join("cert.json");
    std::fs::write(
        &cert_path,
        serde_json::to_vec(&env["report"]["certificate"]).unwrap(),
    )
    .unwrap();
    let verified = run(&["verify-certificate", cert_path.to_str().unwrap()]);
    assert_eq!(verified.status.code(), Some(0));
    assert_eq!(report(&verified)["report"]["ok"], true);
    // corrupt the certificate: exit 1 (mathematical assertion failed)
    let mut cert: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&cert_path).unwrap()).unwrap();
    cert["rank"] = serde_json::json!(1);
    std::fs::write(&cert_path, serde_json::to_vec(&cert).unwrap()).unwrap();
    let rejected = run(&["verify-certificate", cert_path.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(1));
}

#[test]
fn stab_rank_accepts_state_files() {
    let dir = tempfile::tempdir().unwrap();
    // |0⟩ as an explicit state vector: rank 1
    let state = serde_json::json!({
        "p": 2, "n": 1, "m": 8, "norm_dim": 0,
        "amps": ["8:1,0,0,0", "8:0,0,0,0"]
    });
    let path = dir.path().join("zero.json");
    std::fs::write(&path, serde_json::to_vec(&state).unwrap()).unwrap();
    let state_arg = format!("file:{}", path.display());
    let out = run_in(
        &["stab-rank", "--p", "2", "--n", "1", "--state", &state_arg],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["report"]["rank"], 1);
}

#[test]
fn frank_magic_one_qubit() {
    let out = run(&[
        "frank", "--p", "2", "--n", "1", "--state", "magic", "--d", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // e(|x|/8) is itself within the degree-2 dictionary span only through
    // combinations; at d = 3 the dictionary includes no cubic, so rank 2
    let env = report(&out);
    assert_eq!(env["report"]["rank"], 2);
}

#[test]
fn corr_scan_and_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let scan = run(&["corr-scan", "--p", "2", "--n", "2"]);
    assert_eq!(scan.status.code(), Some(0));
    let env = report(&scan);
    assert_eq!(env["report"]["holds"], true);
    let pipe = run_in(
        &["pipeline", "--p", "2", "--n", "1", "--state", "magic"],
        Some(dir.path()),
    );
    assert_eq!(pipe.status.code(), Some(0));
    let penv = report(&pipe);
    assert_eq!(penv["report"]["restricted_identity_ok"], true);
    assert_eq!(penv["report"]["chain_consistent"], true);
}

#[test]
fn pipeline_rejects_invalid_decomposition_file() {
    let dir = tempfile::tempdir().unwrap();
    // a single-term "decomposition" that does not reproduce the magic state
    let decomp = serde_json::json!({
        "p": 2, "n": 1, "m": 8,
        "terms": [{"subspace": "2 1 1 ; 1 ; 0", "q_terms": "2 1 0 0", "coeff": "8:1,0,0,0"}]
    });
    let path = dir.path().join("decomp.json");
    std::fs::write(&path, serde_json::to_vec(&decomp).unwrap()).unwrap();
    let state_arg = format!("file:{}", path.display());
    let out = run(&["pipeline", "--p", "2", "--n", "1", "--state", &state_arg]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("basis point"),
        "error names the first failing basis point: {msg}"
    );
}

#[test]
fn claim1_and_nor_check() {
    let claim = run(&[
        "claim1", "--p", "2", "--n", "6", "--rmax", "2", "--seed", "11",
    ]);
    assert_eq!(claim.status.code(), Some(0));
    let env = report(&claim);
    assert_eq!(env["report"]["dim_bound_holds"], true);
    let nor = run(&["nor-check", "--n", "4", "--d", "3", "--rmax", "1"]);
    assert_eq!(nor.status.code(), Some(0));
    let nenv = report(&nor);
    assert_eq!(nenv["report"]["all_have_second_root"], true);
    assert_eq!(nenv["report"]["tuples_checked"], 1024);
}

#[test]
fn csv_and_json_reports_carry_identical_numeric_content() {
    let dir = tempfile::tempdir().unwrap();
    let jout = run_in(
        &[
            "stab-rank",
            "--p",
            "2",
            "--n",
            "1",
            "--state",
            "magic",
            "--format",
            "json",
        ],
        Some(dir.path()),
    );
    let cout = run_in(
        &[
            "stab-rank",
            "--p",
            "2",
            "--n",
            "1",
            "--state",
            "magic",
            "--format",
            "csv",
        ],
        Some(dir.path()),
    );
    let json_env = report(&jout);
    // flatten the JSON envelope the same way the CSV writer does and
    // compare against the parsed CSV rows (wall_ms may differ between runs)
    let csv_text = String::from_utf8(cout.stdout).unwrap();
    let mut csv_rows = BTreeMap::new();
    for line in csv_text.lines().skip(1) {
        let (k, v) = split_csv_row(line);
        if k != "wall_ms" {
            csv_rows.insert(k, v);
        }
    }
    let mut json_rows = BTreeMap::new();
    flatten(&json_env, "", &mut json_rows);
    json_rows.remove("wall_ms");
    assert_eq!(csv_rows, json_rows);
}

fn split_csv_row(line: &str) -> (String, String) {
    // rows are `key,value` with RFC-style quoting
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted => {
                if chars.peek() == Some(&'"') {
                    cur.push('"');
                    chars.next();
                } else {
                    quoted = false;
                }
            }
            '"' => quoted = true,
            ',' if !quoted => {
                fields.push(std::mem::take(&mut cur));
            }
            other => cur.push(other),
        }
    }
    fields.push(cur);
    assert_eq!(fields.len(), 2, "row: {line}");
    (fields[0].clone(), fields[1].clone())
}

fn flatten(value: &serde_json::Value, prefix: &str, rows: &mut BTreeMap<String, String>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(v, &key, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, &format!("{prefix}[{i}]"), rows);
            }
        }
        serde_json::Value::Null => {
            rows.insert(prefix.to_string(), String::new());
        }
        serde_json::Value::Bool(b) => {
            rows.insert(prefix.to_string(), b.to_string());
        }
        serde_json::Value::Number(n) => {
            rows.insert(prefix.to_string(), n.to_string());
        }
        serde_json::Value::String(s) => {
            rows.insert(prefix.to_string(), s.clone());
        }
    }
}
