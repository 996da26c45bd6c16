use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn potential(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../potentials").join(name)
}

fn gasbound(args: &[&str]) -> Output {
    gasbound_env(args, &[])
}

fn gasbound_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gasbound"));
    cmd.args(args).env_remove("GASBOUND_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn pot(name: &str) -> String {
    potential(name).to_str().unwrap().to_owned()
}

#[test]
fn constants_of_the_hard_rod() {
    let out = gasbound(&["constants", "--potential", &pot("hardrod.toml"), "--beta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["c_phi"], 2.0);
    assert_eq!(v["tool"], "gasbound");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    for key in ["a_phi", "p_phi", "c_hat_phi", "beta", "error"] {
        assert!(v[key].is_number(), "{key}");
    }
}

#[test]
fn threshold_with_fixed_delta() {
    let out = gasbound(&["threshold", "--potential", &pot("hardrod.toml"), "--beta", "1", "--delta", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let new = v["new_threshold"].as_f64().unwrap();
    assert!((new - std::f64::consts::E / 2.0).abs() <= 1e-15, "{new}");
}

#[test]
fn delta_below_attraction_is_a_computational_failure() {
    let out = gasbound(&["threshold", "--potential", &pot("sqwell.toml"), "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("attraction"));
}

#[test]
fn verify_square_well_passes() {
    let out = gasbound(&["verify", "--potential", &pot("sqwell.toml"), "--lambda", "0.1", "--volume", "1.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["check"].as_str().unwrap()).collect();
    for c in ["logz", "recursion", "correspondence", "selfmap", "contraction", "zerofree"] {
        assert!(names.contains(&c), "{c} missing from {names:?}");
    }
    for r in rows {
        assert_eq!(r["pass"], true, "{r}");
        assert!(r["residual"].as_f64().unwrap() <= r["tolerance"].as_f64().unwrap());
        assert!(r["config_hash"].is_string() && r["version"].is_string());
    }
}

#[test]
fn verify_reports_a_failed_check_with_exit_two() {
    // The hard-rod window has a zero at λ ≈ −0.708, inside the disk of radius e/2.
    let out = gasbound(&["verify", "--potential", &pot("hardrod.toml"), "--checks", "logz,zerofree"]);
    assert_eq!(out.status.code(), Some(2));
    let rows = json(&out);
    assert_eq!(rows[0]["pass"], true);
    assert_eq!(rows[1]["check"], "zerofree");
    assert_eq!(rows[1]["pass"], false);
}

#[test]
fn verify_accepts_complex_activity() {
    let out = gasbound(&["verify", "--potential", &pot("sqwell.toml"), "--lambda", "0.1+0.05i", "--checks", "logz,recursion"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn monte_carlo_output_is_independent_of_thread_count() {
    for args in [
        vec!["vk", "--potential", "kac.toml", "--k", "3", "--samples", "2e5", "--seed", "9"],
        vec!["delta", "--potential", "sqwell.toml", "--kmax", "3", "--samples", "1e5", "--convention", "leading"],
    ] {
        let args: Vec<String> = args.iter().map(|a| if a.ends_with(".toml") { pot(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let one = gasbound_env(&args, &[("GASBOUND_THREADS", "1")]);
        let many = gasbound_env(&args, &[("GASBOUND_THREADS", "5")]);
        let default = gasbound(&args);
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, many.stdout);
        assert_eq!(one.stdout, default.stdout);
    }
}

#[test]
fn sweep_csv_header_is_frozen() {
    let out = gasbound(&["sweep", "--potential", &pot("sqwell.toml"), "--beta-min", "0.5", "--beta-max", "2", "--steps", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "beta,c_phi,a_phi,delta,lambda_tilde,z_tilde_sq,new,pr,py,ratio_pr,ratio_py");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split(',').count() == 11));
}

#[test]
fn sweep_json_rows() {
    let out = gasbound(&["sweep", "--potential", &pot("hardrod.toml"), "--beta-min", "1", "--beta-max", "3", "--steps", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["config_hash"].is_string());
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn hash_ignores_formatting_and_tracks_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let reformatted = dir.path().join("rod.conf");
    std::fs::write(&reformatted, "# same rod, different layout\n\ncore_radius=1\nkind = \"hard_sphere\"\n").unwrap();
    let hash = |path: &str, beta: &str| json(&gasbound(&["constants", "--potential", path, "--beta", beta]))["config_hash"].clone();
    assert_eq!(hash(&pot("hardrod.toml"), "1"), hash(reformatted.to_str().unwrap(), "1"));
    assert_ne!(hash(&pot("hardrod.toml"), "1"), hash(&pot("hardrod.toml"), "2"));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let out = gasbound(&["constants", "--potential", &pot("hardsphere3d.toml"), "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!((v["c_phi"].as_f64().unwrap() - 4.0 * std::f64::consts::PI / 3.0).abs() <= 1e-8);
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "kind = hard_sphere\ncore_radius = 1\ncolour = blue\n").unwrap();
    assert_eq!(gasbound(&["constants", "--potential", bad.to_str().unwrap()]).status.code(), Some(64));
    assert_eq!(gasbound(&["constants", "--potential", "/nonexistent/rod.toml"]).status.code(), Some(64));
    assert_eq!(gasbound(&["constants"]).status.code(), Some(64));
    assert_eq!(gasbound(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(gasbound(&["vk", "--potential", &pot("hardrod.toml"), "--k", "1", "--samples", "many"]).status.code(), Some(64));
    let threads = gasbound_env(&["constants", "--potential", &pot("hardrod.toml")], &[("GASBOUND_THREADS", "0")]);
    assert_eq!(threads.status.code(), Some(64));
}

#[test]
fn help_is_available_per_subcommand() {
    for sub in ["constants", "threshold", "vk", "delta", "verify", "sweep"] {
        let out = gasbound(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("--potential"));
    }
}
