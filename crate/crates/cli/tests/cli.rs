use assert_cmd::Command;
use serde_json::Value;

fn iterfrac() -> Command {
    let mut cmd = Command::cargo_bin("iterfrac").unwrap();
    cmd.env_remove("ITERFRAC_BITS");
    cmd
}

fn run_json(args: &[&str]) -> Value {
    let out = iterfrac().args(args).assert().success().get_output().stdout.clone();
    serde_json::from_slice(&out).expect("stdout is JSON")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn geometric_integer_iterate() {
    let v = run_json(&["iterate", "--preset", "geometric", "--s", "3", "--order", "6", "--method", "matrix"]);
    assert_eq!(strings(&v["ordinary"]), ["1", "3", "9", "27", "81", "243"]);
    assert_eq!(v["mode"], "exact");
}

#[test]
fn half_iterate_of_quadratic() {
    let v = run_json(&["iterate", "--preset", "quad", "--s", "1/2", "--order", "4", "--method", "schroder"]);
    assert_eq!(strings(&v["ordinary"]), ["1", "1/2", "-1/4", "1/4"]);
}

#[test]
fn inline_series_document() {
    let doc = r#"{"kind":"ordinary","values":["0","1","1","0"],"mode":"exact"}"#;
    let v = run_json(&["iterate", "--series", doc, "--s", "2", "--order", "3"]);
    assert_eq!(strings(&v["ordinary"]), ["1", "2", "2"]);
}

#[test]
fn irrational_multiplier_falls_back_to_numeric() {
    let v = run_json(&["iterate", "--preset", "moebius(4)", "--s", "1/2", "--order", "3"]);
    assert_eq!(v["mode"], "numeric");
    let c2: f64 = v["ordinary"][1]["re"].as_str().unwrap().parse().unwrap();
    assert!((c2 - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn all_methods_agree() {
    let v = run_json(&["iterate", "--preset", "moebius(2)", "--s", "3", "--order", "6", "--all-methods"]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["max_discrepancy"], 0.0);
    let ok = v["methods"].as_array().unwrap().iter().filter(|m| m["status"] == "ok").count();
    assert!(ok >= 5);
}

#[test]
fn domain_error_exits_one_with_name() {
    iterfrac()
        .args(["iterate", "--preset", "moebius(2)", "--s", "1/2", "--order", "4", "--method", "schroder"])
        .assert()
        .code(1)
        .stderr(predicates::str::starts_with("UnitaryRequired"));
    iterfrac()
        .args(["iterate", "--preset", "moebius(4)", "--s", "1/2", "--order", "4", "--mode", "exact"])
        .assert()
        .code(1)
        .stderr(predicates::str::starts_with("ExactInfeasible"));
}

#[test]
fn usage_errors_exit_two_and_list_flags() {
    iterfrac().args(["iterate", "--s", "1"]).assert().code(2);
    iterfrac()
        .args(["iterate", "--preset", "quad", "--s", "1", "--method", "nope"])
        .assert()
        .code(2)
        .stderr(predicates::str::contains("--order"));
    iterfrac().args(["frobnicate"]).assert().code(2);
}

#[test]
fn itlog_of_geometric_is_x_squared() {
    let v = run_json(&["itlog", "--preset", "geometric", "--order", "5"]);
    assert_eq!(strings(&v["ordinary"]), ["0", "1", "0", "0", "0"]);
}

#[test]
fn bell_stirling_value() {
    let v = run_json(&["bell", "--preset", "expm1", "--n", "4", "--k", "2"]);
    assert_eq!(v["exponential"], "7");
}

#[test]
fn q_numbers() {
    assert_eq!(run_json(&["qbinom", "--q", "2", "--s", "4", "--p", "2"])["value"], "35");
    assert_eq!(run_json(&["qfact", "--q", "2", "--n", "3"])["value"], "21");
    assert_eq!(run_json(&["qfact", "--q", "0.5", "--n", "2"])["value"]["bits"], 128);
}

#[test]
fn bits_from_environment() {
    let out = iterfrac()
        .env("ITERFRAC_BITS", "64")
        .args(["qfact", "--q", "0.5", "--n", "2"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["value"]["bits"], 64);
}

#[test]
fn output_is_deterministic() {
    let args = ["iterate", "--preset", "moebius(3)", "--s", "0.3+0.1i", "--order", "6", "--all-methods"];
    let a = iterfrac().args(args).assert().success().get_output().stdout.clone();
    let b = iterfrac().args(args).assert().success().get_output().stdout.clone();
    assert_eq!(a, b);
}

#[test]
fn validate_passes() {
    let v = run_json(&["validate", "--order", "8"]);
    assert_eq!(v["failed"], 0);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn bench_small_grid() {
    let v = run_json(&["bench", "--order", "4", "--s", "2,1/2"]);
    let cells = v.as_array().unwrap();
    assert_eq!(cells.len(), 4);
    assert!(cells.iter().all(|c| !c["timings"].as_array().unwrap().is_empty()));
}

#[test]
fn table_rendering() {
    let out = iterfrac()
        .args(["iterate", "--preset", "quad", "--s", "1/2", "--order", "4", "--table"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("n\\k"));
    assert_eq!(text.lines().count(), 6);
}
