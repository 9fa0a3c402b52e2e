use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value as Json;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

use ifm_cavity::cli::OUT_DIR_ENV;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ifm-cavity"));
    cmd.env_remove(OUT_DIR_ENV);
    cmd
}

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("run.toml");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn json(path: &Path) -> Json {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn coeffs_default_reports_present_absorption() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["coeffs"], None);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&tmp.path().join("out/coeffs.csv"));
    assert_eq!(
        header,
        ["state", "reflection", "transmission", "absorption", "eta"]
    );
    assert_eq!(rows[1][0], "present");
    assert!((f(&rows[1][3]) - 0.0189).abs() < 5e-5);
    assert_eq!(f(&rows[0][3]), 0.0);
}

#[test]
fn coeffs_without_object_absorbs_nothing() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["coeffs"],
        Some("[cavity]\nkappa_3_hz = 0.0\n"),
    );
    assert!(out.status.success());
    let (_, rows) = csv_rows(&tmp.path().join("out/coeffs.csv"));
    assert_eq!(f(&rows[1][3]), 0.0);
}

#[test]
fn invalid_xi_exits_2_and_names_field() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["coeffs"], Some("[cavity]\nxi = 1.5\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xi"));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["coeffs"], Some("[cavity]\nkappa_a = 1.0\n"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_grid_exits_2() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["sweep-xi"], Some("[sweep]\nxi_count = 0\n"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_xi_blocks_per_n0() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["sweep-xi"],
        Some("[sweep]\nxi_min = 0.1\nxi_max = 0.9\nxi_count = 9\nn0_values = [5.0, 55.0]\n"),
    );
    assert!(out.status.success());
    let (header, rows) = csv_rows(&tmp.path().join("out/sweep_xi.csv"));
    assert_eq!(
        header,
        ["n0", "xi", "eta_tot", "snr1", "snr2", "zeta1", "zeta2"]
    );
    assert_eq!(rows.len(), 18);
    assert!(rows[..9].iter().all(|r| r[0] == "5.0"));
    assert!(rows[9..].iter().all(|r| r[0] == "55.0"));
    // SNR peaks at critical coupling in both ports.
    for col in [3, 4] {
        let best = rows[..9]
            .iter()
            .max_by(|a, b| f(&a[col]).total_cmp(&f(&b[col])))
            .unwrap();
        assert_eq!(f(&best[1]), 0.5);
    }
    let raw = fs::read(tmp.path().join("out/sweep_xi.csv")).unwrap();
    assert!(!raw.contains(&b'\r'));
}

#[test]
fn optimize_json_keys_and_headline_optima() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["optimize"], None);
    assert!(out.status.success());
    let doc = json(&tmp.path().join("out/optimize.json"));
    let rows = doc.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        keys,
        [
            "search",
            "port",
            "xi_star",
            "n0_star",
            "zeta_star",
            "eta_tot",
            "snr",
            "feasible"
        ]
    );
    let cond = |port: &str| {
        rows.iter()
            .find(|r| r["search"] == "conditional" && r["port"] == port)
            .unwrap()
    };
    assert!((cond("transmission")["xi_star"].as_f64().unwrap() - 0.03).abs() <= 0.02);
    assert!((cond("reflection")["xi_star"].as_f64().unwrap() - 0.4).abs() <= 0.05);
}

#[test]
fn optimize_strongly_absorbing_object_prefers_critical_coupling() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["optimize"],
        Some("[cavity]\nkappa_3_hz = 1.5e12\n\n[constraints]\n"),
    );
    assert!(out.status.success());
    let doc = json(&tmp.path().join("out/optimize.json"));
    let rows = doc.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((r["xi_star"].as_f64().unwrap() - 0.5).abs() < 0.01);
    }
}

#[test]
fn impossible_constraints_exit_3_with_report() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["optimize"],
        Some("[constraints]\nmin_eta_tot = 0.9999\nmin_snr = 20.0\n"),
    );
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&tmp.path().join("out/optimize.json"));
    let infeasible: Vec<_> = doc
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["search"] == "conditional")
        .collect();
    assert_eq!(infeasible.len(), 2);
    assert!(infeasible.iter().all(|r| r["feasible"] == false));
}

#[test]
fn param_map_writes_two_maps_per_port() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["param-map"],
        Some("[param_map]\nkappa3_count = 3\ndelta_p_count = 3\n"),
    );
    assert!(out.status.success());
    for port in ["reflection", "transmission"] {
        for kind in ["argmax_xi", "max_zeta"] {
            let (header, rows) =
                csv_rows(&tmp.path().join(format!("out/param_map_{kind}_{port}.csv")));
            assert_eq!(header, ["kappa3", "deltaP", "value"]);
            assert_eq!(rows.len(), 9);
        }
    }
}

#[test]
fn security_curve_starts_secure_and_transmission_dominates() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["security-curve"], None);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&tmp.path().join("out/security_curve.csv"));
    assert_eq!(
        header,
        [
            "snr",
            "n0_reflection",
            "eta_tot_reflection",
            "n0_transmission",
            "eta_tot_transmission"
        ]
    );
    assert_eq!(rows.len(), 100);
    assert_eq!(f(&rows[0][0]), 0.0);
    assert_eq!(f(&rows[0][2]), 1.0);
    assert_eq!(f(&rows[0][4]), 1.0);
    assert!(rows.iter().all(|r| f(&r[4]) >= f(&r[2])));

    let manifest = json(&tmp.path().join("out/security-curve.manifest.json"));
    assert_eq!(
        manifest["details"]["xi_transmission_source"],
        "conditional optimum"
    );
}

#[test]
fn montecarlo_reports_seed_and_generator() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["montecarlo", "--seed", "7"],
        Some("[montecarlo]\nn0_values = [55]\ntrials = 20000\n"),
    );
    assert!(out.status.success());
    let doc = json(&tmp.path().join("out/montecarlo.json"));
    let rows = doc.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r["seed"], 7);
        assert!(r["snr_rel_dev"].as_f64().unwrap().abs() < 0.1);
    }
    let manifest = json(&tmp.path().join("out/montecarlo.manifest.json"));
    assert_eq!(manifest["seeds"], serde_json::json!([7]));
    assert!(manifest["rng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn manifest_digests_match_files() {
    let tmp = TempDir::new().unwrap();
    assert!(run(tmp.path(), &["sweep-xi", "--format", "json"], None)
        .status
        .success());
    let manifest = json(&tmp.path().join("out/sweep-xi.manifest.json"));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    let path = tmp
        .path()
        .join("out")
        .join(outputs[0]["file"].as_str().unwrap());
    let bytes = fs::read(&path).unwrap();
    assert_eq!(path.extension().unwrap(), "json");
    assert_eq!(outputs[0]["bytes"], bytes.len());
    assert_eq!(outputs[0]["sha256"], hex::encode(Sha256::digest(&bytes)));
}

#[test]
fn manifest_config_echo_reproduces_outputs() {
    let tmp = TempDir::new().unwrap();
    let first = tmp.path().join("first");
    let status = bin()
        .args(["montecarlo", "--seed", "11", "--out"])
        .arg(&first)
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = json(&first.join("montecarlo.manifest.json"));

    // Replay the echoed config, redirecting the output.
    let mut config = manifest["config"].clone();
    let second = tmp.path().join("second");
    config["output"]["dir"] = Json::from(second.to_string_lossy().into_owned());
    let echo = tmp.path().join("echo.json");
    fs::write(&echo, serde_json::to_vec(&config).unwrap()).unwrap();
    let status = bin()
        .arg("montecarlo")
        .arg("--config")
        .arg(&echo)
        .status()
        .unwrap();
    assert!(status.success());

    assert_eq!(
        fs::read(first.join("montecarlo.json")).unwrap(),
        fs::read(second.join("montecarlo.json")).unwrap()
    );
    let replay = json(&second.join("montecarlo.manifest.json"));
    assert_eq!(
        manifest["outputs"][0]["sha256"],
        replay["outputs"][0]["sha256"]
    );
}

#[test]
fn output_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("from_env");
    let status = bin().arg("coeffs").env(OUT_DIR_ENV, &dir).status().unwrap();
    assert!(status.success());
    assert!(dir.join("coeffs.csv").exists());
    assert!(dir.join("coeffs.manifest.json").exists());
}
