use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn run(args: &[&str]) -> i32 {
    let mut v = vec!["selfsim"];
    v.extend_from_slice(args);
    selfsim::run(v)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn solve_linear_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run(&[
        "solve",
        "--law",
        "linear",
        "--c0",
        "2",
        "--vl",
        "0",
        "--wl",
        "0",
        "--vr",
        "0",
        "--wr",
        "1",
        "--eps",
        "0.01",
        "--out-dir",
        out,
        "--dump-measures",
    ]);
    assert_eq!(code, 0);
    let s = json(&dir.path().join("summary.json"));
    assert!((s["w_star"].as_f64().unwrap() - 0.5).abs() <= 0.05);
    assert_eq!(s["converged"], Value::Bool(true));
    assert_eq!(s["config"]["law"]["c0"].as_f64(), Some(2.0));
    assert_eq!(s["config"]["solver"]["eps"].as_f64(), Some(0.01));
    for key in [
        "tv_w",
        "tv_v",
        "weighted_tv_w",
        "conservation_defect",
        "residual_ode",
        "rho_minus",
        "rho_plus",
        "denominator_D",
    ] {
        assert!(s[key].is_number(), "{key}");
    }

    let header = csv::Reader::from_path(dir.path().join("profile.csv"))
        .unwrap()
        .headers()
        .unwrap()
        .clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["y", "w", "v", "phi_minus", "phi_plus"]
    );
    let r = rows(&dir.path().join("profile.csv"));
    assert_eq!(r.len(), 4001);
    // 17 significant digits
    let digits = r[1][0].split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(digits.len(), 17);

    assert!(dir.path().join("measure_minus.csv").exists());
    assert!(dir.path().join("measure_plus.csv").exists());
    let plot = fs::read_to_string(dir.path().join("plot.gp")).unwrap();
    assert!(plot.contains("'profile.csv'"));
}

#[test]
fn identical_inputs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let code = run(&[
            "solve",
            "--law",
            "hardening",
            "--params",
            "1,1",
            "--wl",
            "0.5",
            "--vr",
            "-0.3",
            "--grid",
            "1201",
            "--eps",
            "0.02",
            "--out-dir",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let p = |d: &tempfile::TempDir| fs::read(d.path().join("profile.csv")).unwrap();
    assert_eq!(p(&a), p(&b));
}

#[test]
fn sweep_example_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&[
        "sweep",
        "--eps",
        "0.08,0.04,0.02,0.01",
        "--gamma",
        "0.125",
        "--jobs",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = rows(&dir.path().join("sweep_summary.csv"));
    assert_eq!(r.len(), 4);
    assert_eq!(r[2][1].parse::<f64>().unwrap(), 0.125);
    let s = json(&dir.path().join("sweep_summary.json"));
    assert_eq!(s["monotone"], Value::Bool(true));
    assert_eq!(s["distances_w"].as_array().unwrap().len(), 3);
    assert_eq!(s["config"]["sweep"]["jobs"].as_u64(), Some(3));
    for k in 0..4 {
        assert!(dir.path().join(format!("profile_{k}.csv")).exists());
    }
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (d, jobs) in [(&a, "1"), (&b, "4")] {
        let code = run(&[
            "sweep",
            "--eps",
            "0.04,0.02",
            "--grid",
            "1201",
            "--jobs",
            jobs,
            "--out-dir",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let p = |d: &tempfile::TempDir| fs::read(d.path().join("sweep_summary.csv")).unwrap();
    assert_eq!(p(&a), p(&b));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[law]\nkind = \"linear\"\nc0 = 2.0\n\n[solver]\nwr = 1.0\neps = 0.05\ngrid = 801\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let code = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--eps",
        "0.02",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let s = json(&out.join("summary.json"));
    assert_eq!(s["config"]["solver"]["eps"].as_f64(), Some(0.02));
    assert_eq!(s["config"]["solver"]["grid"].as_u64(), Some(801));
}

#[test]
fn boundary_reports_trace() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&[
        "boundary",
        "--law",
        "linear",
        "--c0",
        "2",
        "--wb",
        "1",
        "--vr",
        "0",
        "--wr",
        "0",
        "--eps",
        "0.02",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let s = json(&dir.path().join("summary.json"));
    assert!((s["v0_trace"].as_f64().unwrap() + 2.0).abs() <= 0.1);
}

#[test]
fn oracle_matches_profile() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&[
        "oracle",
        "--law",
        "linear",
        "--c0",
        "2",
        "--wr",
        "1",
        "--eps",
        "0.02",
        "--grid",
        "2001",
        "--t-final",
        "1",
        "--X",
        "5",
        "--cells",
        "1000",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let s = json(&dir.path().join("oracle_summary.json"));
    assert!(s["distance_w"].as_f64().unwrap() < 0.05);
    assert!(s["w_defect"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(s["config"]["oracle"]["X"].as_f64(), Some(5.0));
}

#[test]
fn eigen_report_from_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let sys = data("psystem.toml");
    let code = run(&[
        "eigen",
        "--system",
        sys.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = rows(&dir.path().join("eigen_report.csv"));
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|row| row.last().unwrap().is_empty()));
    let lax = rows(&dir.path().join("lax_report.csv"));
    assert_eq!(lax[0][3], "true");
    assert_eq!(lax[1][3], "false");
    let s = json(&dir.path().join("eigen_summary.json"));
    for slope in s["perturbation"]["slopes"].as_array().unwrap() {
        assert!((slope.as_f64().unwrap() - 1.0).abs() < 0.1);
    }
}

#[test]
fn tabulated_eigen_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("table.csv"),
        "u1,u2,a11,a12,a21,a22,b11,b12,b21,b22\n0,0.5,0,-1.75,-1,0,1.1,0.1,0.1,0.9\n",
    )
    .unwrap();
    fs::write(dir.path().join("sys.toml"), "n = 2\ntable_file = \"table.csv\"\n").unwrap();
    let out = dir.path().join("out");
    let code = run(&[
        "eigen",
        "--system",
        dir.path().join("sys.toml").to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = rows(&out.join("eigen_report.csv"));
    assert_eq!(r.len(), 1);
    let dev: f64 = r[0][15].parse().unwrap();
    assert!(dev < 1e-10);
}

#[test]
fn nsystem_from_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let sys = data("coupled.toml");
    let code = run(&[
        "nsystem",
        "--system",
        sys.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let s = json(&dir.path().join("nsystem_summary.json"));
    assert!(s["contraction"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c.as_f64().unwrap() < 1.0));
    assert_eq!(s["system"]["grid"].as_u64(), Some(1201));
}

#[test]
fn check_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["check", "--out-dir", dir.path().to_str().unwrap()]), 0);
    let r = rows(&dir.path().join("check.csv"));
    assert!(r.iter().all(|row| row[1] == "true"), "{r:?}");
}

#[test]
fn config_error_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[law]\nkind = \"linear\"\n\n[solver]\ngrid = \"many\"\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(["solve", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));
}

#[test]
fn solver_failure_exits_1_with_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args([
            "solve",
            "--law",
            "cubic",
            "--wl",
            "-1.2",
            "--wr",
            "1.2",
            "--grid",
            "401",
            "--max-iter",
            "3",
        ])
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not_converged"));
}

#[test]
fn bad_expression_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.toml");
    fs::write(
        &sys,
        "n = 2\nflux = [\"u1 + x\", \"u2\"]\nw_b = [0, 0]\nw_r = [0.01, 0]\n",
    )
    .unwrap();
    assert_eq!(run(&["nsystem", "--system", sys.to_str().unwrap()]), 2);
    assert_eq!(run(&["solve", "--eps", "0.1,0.05"]), 2);
    assert_eq!(run(&["bogus"]), 2);
}
