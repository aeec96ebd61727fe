use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cavity(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cavity"));
    cmd.args(args).env_remove("CAVITY_OUT_DIR").env("RUST_LOG", "error");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn steady_prints_closed_form_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cavity(&["steady", "--out", out], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("phi_ss = 0.7956"), "{text}");
    assert!(text.contains("r_ss = 3.919"), "{text}");
    let m = manifest(&dir.path().join("steady.manifest.json"));
    assert!((m["results"]["phi_ss"].as_f64().unwrap() - 0.7956).abs() < 1e-3);
    // r_ss sin φ_ss ≈ 2.8 crosses the separation threshold
    assert!(m["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("r_ss*sin(phi_ss)")));
}

#[test]
fn realignment_reports_sqrt_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = cavity(&["realignment", "--out", dir.path().to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&dir.path().join("realignment.manifest.json"));
    assert!((m["results"]["trace_norm"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn fig2_is_byte_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig2.json", r#"{"drive": 0.7, "kappa": 0.125, "t_final": 20}"#);
    let cfg = cfg.to_str().unwrap();
    let run = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let o = cavity(&["fig2", "--config", cfg, "--seed", seed, "--out", out.to_str().unwrap()], &[]);
        assert!(o.status.success(), "{}", stderr(&o));
        (std::fs::read(out.join("fig2.csv")).unwrap(), std::fs::read(out.join("fig2_jumps.csv")).unwrap())
    };
    let a = run("a", "11");
    let b = run("b", "11");
    let c = run("c", "12");
    assert_eq!(a, b);
    assert_ne!(a.1, c.1);
    let header = String::from_utf8(a.1).unwrap();
    assert!(header.starts_with("trajectory,t,channel\n"));
    let m = manifest(&dir.path().join("a").join("fig2.manifest.json"));
    assert_eq!(m["config"]["gamma"].as_f64(), Some(0.4));
    assert_eq!(m["config"]["seed"].as_u64(), Some(11));
}

#[test]
fn minimal_config_echoes_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig1.json", r#"{"drive": 0.7, "kappa": 0.125, "t_final": 0.2}"#);
    let out = dir.path().join("out");
    let o = cavity(&["fig1", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out.join("fig1.manifest.json"));
    let c = &m["config"];
    assert_eq!(c["g"].as_f64(), Some(1.0));
    assert_eq!(c["n_max"].as_u64(), Some(60));
    assert_eq!(c["dt"].as_f64(), Some(0.002));
    assert_eq!(c["theta"].as_f64(), Some(0.0));
    assert_eq!(m["outputs"], serde_json::json!(["fig1.csv", "fig1_jumps.csv"]));

    let text = std::fs::read_to_string(out.join("fig1.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,branch,trajectory,master"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r.len() == 4));
    let last = rows.last().unwrap();
    assert!((last[0] - 0.2).abs() < 1e-12);
    assert!((last[1] - last[3]).abs() < 0.08);
}

#[test]
fn invalid_configs_fail_with_field_messages() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let neg = write_config(dir.path(), "neg.json", r#"{"drive": 0.7, "kappa": 0.125, "gamma": -1}"#);
    let o = cavity(&["fig2", "--config", neg.to_str().unwrap(), "--out", out], &[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("gamma"), "{}", stderr(&o));

    let empty = write_config(dir.path(), "empty.json", "");
    let o = cavity(&["steady", "--config", empty.to_str().unwrap(), "--out", out], &[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("drive, kappa"), "{}", stderr(&o));

    let unknown = write_config(dir.path(), "unknown.json", "{\"drive\": 0.7,\n\"kappa\": 0.125,\n\"n_traj\": 3,\n\"seeed\": 1}");
    let o = cavity(&["steady", "--config", unknown.to_str().unwrap(), "--out", out], &[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    assert!(!Path::new(out).join("steady.manifest.json").exists());
}

#[test]
fn output_directory_from_environment_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("env");
    let o = cavity(&["steady"], &[("CAVITY_OUT_DIR", &env_dir)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_dir.join("steady.manifest.json").exists());

    let flag_dir = dir.path().join("flag");
    let o = cavity(&["steady", "--out", flag_dir.to_str().unwrap()], &[("CAVITY_OUT_DIR", &env_dir)]);
    assert!(o.status.success());
    assert!(flag_dir.join("steady.manifest.json").exists());
}

#[test]
fn traject_writes_ensemble_statistics_and_jumps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", r#"{"drive": 0.7, "kappa": 0.125, "t_final": 1.0, "n_max": 30}"#);
    let out = dir.path().join("out");
    let o = cavity(&["traject", "--config", cfg.to_str().unwrap(), "--ntraj", "6", "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out.join("traject.manifest.json"));
    assert_eq!(m["config"]["n_traj"].as_u64(), Some(6));
    let text = std::fs::read_to_string(out.join("traject.csv")).unwrap();
    assert!(text.starts_with("t,excited_mean,excited_stderr,photons_mean,photons_stderr\n"));
    assert_eq!(text.lines().count(), 1 + 101);
    // one manifest per run, naming every data file written
    let files: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    let listed: Vec<String> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_owned()).collect();
    assert_eq!(files.len(), listed.len());
    assert!(files.iter().all(|f| listed.contains(f)));
}

#[test]
fn theta_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f3.json", r#"{"drive": 0.7, "kappa": 0.125, "theta": 0.5, "t_final": 1.0}"#);
    let out = dir.path().join("out");
    let o = cavity(&["fig3", "--config", cfg.to_str().unwrap(), "--theta", "-0.25", "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out.join("fig3.manifest.json"));
    assert_eq!(m["config"]["theta"].as_f64(), Some(-0.25));
    let text = std::fs::read_to_string(out.join("fig3.csv")).unwrap();
    assert!(text.starts_with("tau,coherent,incoherent,approx\n"));
    let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 1e-9 && (first[2] - 1.0).abs() < 1e-9);
}

#[test]
fn master_experiment_runs_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.json", r#"{"drive": 0.5, "kappa": 0.25, "t_final": 0.5, "n_max": 20}"#);
    let out = dir.path().join("out");
    let o = cavity(&["master", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("master.csv")).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 0.5).abs() < 1e-12);
    assert!(last[2] > 0.0 && last[1] >= 0.0 && last[1] <= 1.0);
}
