use std::process::{Command, Output};

use serde_json::Value;

fn starres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starres"))
        .args(args)
        .env_remove("STARRES_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn markov_depolarizing_is_free() {
    let out = starres(&["witness", "markov", "--input", r#"{"a":0.3333333333333333,"b":0.3333333333333333,"c":0.3333333333333334}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let crit = (7.0 - 3.0 * 5f64.sqrt()) / 8.0;
    assert!(v["value"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["margin"].as_f64().unwrap() + crit).abs() < 1e-12);
    assert!((v["critical"].as_f64().unwrap() - crit).abs() < 1e-15);
    assert_eq!(v["witness_positive"], Value::Bool(false));
}

#[test]
fn unisto_row_is_certified() {
    let out = starres(&["witness", "unisto", "--input", r#"{"row":[0.5,0.5,0,0]}"#]);
    assert_eq!(out.status.code(), Some(2));
    let margin = json(&out)["margin"].as_f64().unwrap();
    assert!((margin - (0.5 - 1.0 / (2.0 * 2f64.sqrt()))).abs() < 1e-12);
}

#[test]
fn unisto_accepts_full_matrix_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    std::fs::write(&path, "0.5,0.5,0,0\n0,0.5,0.5,0\n0,0,0.5,0.5\n0.5,0,0,0.5\n").unwrap();
    let out = starres(&["witness", "unisto", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, "0.5,0.5,0,0\n0.5,0.5,0,0\n0,0,0.5,0.5\n0.5,0,0,0.5\n").unwrap();
    assert_eq!(starres(&["witness", "unisto", "--input", path.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn totalcorr_three_by_three_is_unsupported() {
    let out = starres(&["witness", "totalcorr", "--input", "[[0.1,0.1,0.1],[0.1,0.1,0.1],[0.1,0.1,0.2]]"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn totalcorr_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, "b0,b1\n0.25,0.25\n0.25,0.25\n").unwrap();
    let out = starres(&["witness", "totalcorr", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["value"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn markov_accepts_choi_matrix() {
    let choi = "[[0.375,0,0,0.125],[0,0.125,-0.125,0],[0,-0.125,0.125,0],[0.125,0,0,0.375]]";
    let out = starres(&["witness", "markov", "--input", choi]);
    let v = json(&out);
    assert_eq!(out.status.code(), Some(2), "{v}");
    assert!((v["value"].as_f64().unwrap() - 0.125).abs() < 1e-9);
}

#[test]
fn malformed_inputs_exit_64() {
    for input in [r#"{"x":[0,0"#, r#"{"row":[0.5,0.5]}"#, r#"{"a":0.9,"b":0.9,"c":0.9}"#, "/no/such/file.json"] {
        let app = if input.contains("row") { "unisto" } else if input.contains("\"a\"") { "markov" } else { "discord" };
        assert_eq!(starres(&["witness", app, "--input", input]).status.code(), Some(64), "{input}");
    }
    assert_eq!(starres(&["witness", "quantum"]).status.code(), Some(64));
    assert_eq!(starres(&["sweep", "markov", "--resolution", "1"]).status.code(), Some(64));
}

#[test]
fn unwritable_output_exits_73() {
    let out = starres(&["sweep", "markov", "--resolution", "3", "--output", "/no/such/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(73));
}

#[test]
fn markov_sweep_shape_and_boundary_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let out = starres(&["sweep", "markov", "--resolution", "200", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["a", "b", "c", "value", "witness"]);
    let rows: Vec<Vec<f64>> = reader.records().map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200 * 200);
    for r in &rows {
        assert!((r[0] + r[1] + r[2] - 1.0).abs() < 1e-12);
        assert!((r[4] - (r[3] - (7.0 - 3.0 * 5f64.sqrt()) / 8.0)).abs() < 1e-12);
    }
}

#[test]
fn sweeps_are_deterministic_across_worker_counts() {
    for app in ["discord", "totalcorr", "unisto", "markov"] {
        let one = starres(&["sweep", app, "--resolution", "9", "--workers", "1"]);
        let many = starres(&["sweep", app, "--resolution", "9", "--workers", "4"]);
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, many.stdout, "{app}");
    }
}

#[test]
fn sweep_json_format() {
    let out = starres(&["sweep", "totalcorr", "--resolution", "3", "--format", "json"]);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["witness"].as_f64().is_some()));
}

#[test]
fn discord_sweep_stays_in_tetrahedron() {
    let out = starres(&["sweep", "discord", "--resolution", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t1,t2,t3,value"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert!(rows.iter().any(|r| r[..3] == [-1.0, -1.0, -1.0]));
    assert!(!rows.iter().any(|r| r[..3] == [1.0, 1.0, 1.0]));
}

#[test]
fn game_sim_reports_analytic_value() {
    let out = starres(&["game-sim", "--ls", "0.5,0.5", "--trials", "200000", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["analytic"].as_f64(), Some(0.625));
    assert_eq!(v["trials"].as_u64(), Some(200_000));
    assert!((v["empirical"].as_f64().unwrap() - 0.625).abs() < 5.0 * v["stderr"].as_f64().unwrap());
    let again = starres(&["game-sim", "--ls", "0.5,0.5", "--trials", "200000", "--seed", "4"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn validate_games_and_broken_fixture() {
    let out = starres(&["validate", "games", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], Value::Bool(true));

    let out = starres(&["validate", "geometry", "--broken-fixture"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let fortress = &v["checks"][0];
    assert_eq!(fortress["passed"], Value::Bool(false));
    assert_eq!(fortress["counterexample"].as_array().unwrap().len(), 3);
}

#[test]
fn validate_all_passes() {
    let out = starres(&["validate", "all", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
