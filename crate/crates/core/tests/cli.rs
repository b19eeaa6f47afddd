use std::process::{Command, Output};

use serde_json::Value;

fn ktrunc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ktrunc")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn kgroup_prints_versioned_json() {
    let out = ktrunc(&["kgroup", "-p", "2", "-e", "3", "-i", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["total"], 4);
    assert_eq!(v["bands"]["1"], 3);
    assert_eq!(v["bands"]["5"], 1);
}

#[test]
fn closed_and_witt_forms_print_the_same_bands() {
    let closed = json(&ktrunc(&["kgroup", "-p", "3", "-e", "5", "-i", "7", "--form", "closed"]));
    let witt = json(&ktrunc(&["kgroup", "-p", "3", "-e", "5", "-i", "7", "--form", "witt"]));
    assert_eq!(closed["bands"], witt["bands"]);
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["kgroup", "-p", "4", "-e", "3", "-i", "2"][..],
        &["kgroup", "-p", "2", "-e", "0", "-i", "2"],
        &["functorial", "-p", "2", "-m", "3", "-n", "5", "-i", "1", "-j", "1"],
        &["band", "-p", "3", "-e", "2", "-i", "1", "-j", "3"],
    ] {
        let out = ktrunc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("invalid input"), "{args:?}");
    }
}

#[test]
fn functorial_reports_oracle_cokernel() {
    let v = json(&ktrunc(&["functorial", "-p", "2", "-m", "4", "-n", "2", "-i", "3", "-j", "1", "--oracle"]));
    assert_eq!(v["ell"], 2);
    assert_eq!(v["ell_prime"], 2);
    assert_eq!(v["oracle"]["n_length"], 1);
    assert_eq!(v["oracle"]["cokernel_length"], 1);
}

#[test]
fn mult_single_product_reports_both_verdicts() {
    let v = json(&ktrunc(&["mult", "--mode", "aa", "-p", "3", "-e", "2", "--i1", "1", "--j1", "2", "--i2", "1", "--j2", "2", "--oracle"]));
    assert_eq!(v["theorem"]["nonzero"], true);
    assert_eq!(v["oracle"]["mode"], "window");
    assert_eq!(v["oracle"]["lambda"], 2);
}

#[test]
fn verify_passing_suite_exits_0() {
    let out = ktrunc(&["verify", "--quick", "--suite", "legendre", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["failures"], 0);
}

#[test]
fn verify_failing_suite_exits_3_with_counterexample() {
    // the literal min(ℓ′, t+1) cap is contradicted by the chain-map oracle
    let out = ktrunc(&["verify", "--quick", "--suite", "pi-star-oracle"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("FAIL pi-star-oracle"));
    assert!(text.contains("first counterexample"));
}

#[test]
fn quick_verify_fails_exactly_the_known_suites() {
    let out = ktrunc(&["verify", "--quick", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    let failing: Vec<&str> = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["failures"] != 0)
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["pi-star-oracle", "theorem-oracle"]);
}

#[test]
fn figure_respects_out_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ktrunc"))
        .args(["figure", "interlock", "-p", "2", "-m", "12", "-n", "11"])
        .env("KTRUNC_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let name = "interlock-p2-m12-n11-i300-j180";
    let written = std::fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
    let golden = std::fs::read_to_string(format!("{}/tests/golden/{name}.csv", env!("CARGO_MANIFEST_DIR"))).unwrap();
    assert_eq!(written, golden);
}

#[test]
fn band_dumps_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = ktrunc(&["band", "-p", "2", "-e", "3", "-i", "2", "-j", "1", "--dump-matrices", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["schema_version"], 1);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["mult", "--mode", "ab", "-p", "2", "-e", "3", "--j1", "1", "--j2", "3", "--range", "8"];
    assert_eq!(ktrunc(&args).stdout, ktrunc(&args).stdout);
}
