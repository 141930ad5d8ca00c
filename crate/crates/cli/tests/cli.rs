use std::io::Write;
use std::process::{Command, Output, Stdio};

fn cftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cftlab")).args(args).output().expect("binary runs")
}

fn eval_stdin(request: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cftlab"))
        .args(["eval", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(request.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const WORKED: &str = r#"{"dim":4,"slots":[{"x":["0","1","0","0"],"lambda":["1","0"]},
    {"x":["0","0","0","0"],"lambda":["0","1"],"lambda_bar":["0","1"]}]}"#;

#[test]
fn identities_pass_and_are_reproducible() {
    let args = ["verify", "--suite", "identities", "--dim", "4", "--trials", "5", "--seed", "42", "--backend", "exact"];
    let a = cftlab(&args);
    let b = cftlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
    assert_eq!(r["seed"], 42);
    assert!(String::from_utf8_lossy(&a.stderr).contains("wall time"));
}

#[test]
fn other_seeds_pass() {
    let run = |seed: &str| cftlab(&["verify", "--suite", "identities", "--dim", "3", "--trials", "4", "--seed", seed]);
    let (a, b) = (run("1"), run("2"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
}

#[test]
fn float_backend_passes() {
    let o = cftlab(&["verify", "--suite", "invariance", "--dim", "4", "--trials", "10", "--backend", "float"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["backend"], "float");
}

#[test]
fn zero_tolerance_float_fails_with_replayable_frame() {
    let o = cftlab(&[
        "verify",
        "--suite",
        "identities",
        "--dim",
        "4",
        "--trials",
        "3",
        "--backend",
        "float",
        "--tolerance",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    let failures = r["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert!(failures[0]["frame"]["slots"].is_array());
}

#[test]
fn bad_dimension_is_a_usage_error() {
    assert_eq!(cftlab(&["verify", "--suite", "identities", "--dim", "5"]).status.code(), Some(2));
    assert_eq!(cftlab(&["verify", "--suite", "wick", "--dim", "3", "--trials", "1"]).status.code(), Some(2));
    assert_eq!(cftlab(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn eval_psi2_on_worked_frame() {
    let o = eval_stdin(&format!(r#"{{"id":"PSI2","frame":{WORKED}}}"#));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["value"]["exact"], "1/2*pi^-2");
    let re = v["value"]["re"].as_f64().unwrap();
    assert!((re - 0.5 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
}

#[test]
fn eval_reads_files() {
    let path = std::env::temp_dir().join(format!("cftlab-req-{}.json", std::process::id()));
    std::fs::write(&path, format!(r#"{{"id":"JR2","r":2,"normalization":"3","frame":{WORKED}}}"#)).unwrap();
    let o = cftlab(&["eval", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["value"]["exact"].is_string());
}

#[test]
fn malformed_rational_names_the_field() {
    let bad = WORKED.replacen(r#""1","0"]"#, r#""1","0/"]"#, 1);
    let o = eval_stdin(&format!(r#"{{"id":"PSI2","frame":{bad}}}"#));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("slots[0].lambda[1]"));
}

#[test]
fn unknown_fields_and_ids_are_schema_errors() {
    assert_eq!(eval_stdin(&format!(r#"{{"id":"PSI2","frame":{WORKED},"extra":1}}"#)).status.code(), Some(2));
    assert_eq!(eval_stdin(&format!(r#"{{"id":"NOPE","frame":{WORKED}}}"#)).status.code(), Some(2));
    assert_eq!(eval_stdin(&format!(r#"{{"id":"JR2","frame":{WORKED}}}"#)).status.code(), Some(2));
    assert_eq!(eval_stdin("not json").status.code(), Some(2));
}

#[test]
fn lightlike_pair_is_named() {
    let req = r#"{"id":"PSI2","frame":{"dim":4,"slots":[{"x":["1","1","0","0"],"lambda":["1","0"]},
        {"x":["0","0","0","0"],"lambda":["0","1"]}]}}"#;
    let o = eval_stdin(req);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("slots 1 and 2"));
}

#[test]
fn stanev_reports_divergence() {
    let req = r#"{"id":"STANEV4","frame":{"dim":4,"slots":[
        {"x":["0","1","0","0"],"lambda":["1","2"]},{"x":["0","0","3","0"],"lambda":["0","1"]},
        {"x":["1/2","0","0","5"],"lambda":["1","1"]},{"x":["0","-2","1","1"],"lambda":["3","1"]}]}}"#;
    let o = eval_stdin(req);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["value"]["exact"].is_string());
    assert!(v["divergence"]["residual"].as_f64().unwrap().is_finite());
    assert_eq!(v["divergence"]["tolerance"], 1e-8);
}

#[test]
fn lie_table_csv_and_json_agree() {
    let c = cftlab(&["lie", "--n-max", "3", "--m-max", "5", "--format", "csv"]);
    let j = cftlab(&["lie", "--n-max", "3", "--m-max", "5", "--format", "json"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(j.status.code(), Some(0));
    let csv = String::from_utf8(c.stdout).unwrap();
    let rows = json(&j);
    let mut from_json = Vec::new();
    for row in rows.as_array().unwrap() {
        for e in row["entries"].as_array().unwrap() {
            from_json.push(format!(
                "{},{},{},{},{},{}",
                row["n"],
                row["c"].as_str().unwrap(),
                e["m"],
                e["value"].as_str().unwrap(),
                e["fit_residual"].as_str().unwrap(),
                e["interpolation_residual"].as_str().unwrap()
            ));
        }
    }
    let lines: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(lines, from_json);
    assert!(lines.iter().all(|l| l.ends_with(",0,0")));
    assert!(lines.contains(&"3,6,4,144,0,0"));
}

#[test]
fn lie_over_budget_exits_2() {
    let o = cftlab(&["lie", "--n-max", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn thread_cap_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_cftlab"))
        .args(["lie", "--n-max", "2"])
        .env("CFTLAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_cftlab"))
        .args(["lie", "--n-max", "2"])
        .env("CFTLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
