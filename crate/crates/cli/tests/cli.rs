use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_spectral-decay");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("SPECTRAL_DECAY_OUT").output().expect("binary runs")
}

fn run_config(sub: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

/// Every file in `dir`, sorted by name, with its bytes.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn riesz_lacunary_writes_both_pathways() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("riesz", &config("riesz_lacunary.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["coeffs_quadrature.csv", "coeffs_lacunary.csv", "density.csv", "summary.json"] {
        assert!(tmp.path().join(f).exists(), "{f} missing");
    }
    let csv = fs::read_to_string(tmp.path().join("coeffs_lacunary.csv")).unwrap();
    assert!(!csv.contains('\r'));
    assert!(csv.lines().next().unwrap().contains(','));
}

#[test]
fn riesz_lacunary_method_on_nonlacunary_spec_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("riesz", &config("riesz_nonlacunary.json"), tmp.path(), &["--method", "lacunary"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lacunarity violated at index"), "{}", stderr(&o));
}

#[test]
fn riesz_nonlacunary_defaults_to_quadrature() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("riesz", &config("riesz_nonlacunary.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(tmp.path().join("coeffs_quadrature.csv").exists());
    assert!(!tmp.path().join("coeffs_lacunary.csv").exists());
}

#[test]
fn zero_n_out_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("riesz", &config("riesz_lacunary.json"), tmp.path(), &["--n-out", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn zero_threads_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("riesz", &config("riesz_lacunary.json"), tmp.path(), &["--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_and_unknown_flags_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("riesz", &tmp.path().join("absent.json"), tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["riesz", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_json_config_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", "{ \"riesz\": ");
    let o = run_config("riesz", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn morse_iceberg_correlation_has_the_thue_morse_values() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("iceberg", &config("iceberg_morse.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("correlation_level2.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("t,re,im,abs"));
    let values: Vec<f64> = rows.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values, vec![1.0, 0.0, -1.0, 0.0]);

    let lifted = fs::read_to_string(tmp.path().join("lifted_level3.csv")).unwrap();
    let signs: Vec<f64> = lifted.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(signs, vec![1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0]);
    let rotations = read_json(&tmp.path().join("rotations.json"));
    assert_eq!(rotations["rotations"]["provenance"]["kind"], "morse");
}

#[test]
fn explicit_rotation_out_of_range_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "explicit.json",
        r#"{
  "tower": { "dimension": 1, "base": 2, "factors": [2] },
  "rotations": { "kind": "explicit", "values": [[[0], [5]]] },
  "function": { "kind": "values", "level": 1, "values": [1.0, -1.0] }
}"#,
    );
    let o = run_config("iceberg", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("out of range"), "{}", stderr(&o));
}

#[test]
fn unsupported_dimension_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "d3.json",
        r#"{
  "tower": { "dimension": 3, "base": 2, "factors": [2] },
  "rotations": { "kind": "morse" },
  "function": { "kind": "random_sign", "level": 1, "seed": 1 }
}"#,
    );
    let o = run_config("iceberg", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn seeded_runs_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    for (dir, threads) in [(&a, "1"), (&b, "1"), (&c, "4")] {
        let o = run_config("iceberg", &config("iceberg_random.json"), dir, &["--seed", "7", "--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(snapshot(&a), snapshot(&b));
    assert_eq!(snapshot(&a), snapshot(&c));

    let d = tmp.path().join("d");
    let o = run_config("iceberg", &config("iceberg_random.json"), &d, &["--seed", "8"]);
    assert!(o.status.success());
    assert_ne!(fs::read(a.join("rotations.json")).unwrap(), fs::read(d.join("rotations.json")).unwrap());
}

#[test]
fn plane_iceberg_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("iceberg", &config("iceberg_plane.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_json(&tmp.path().join("summary.json"))["dimension"], 2);
}

#[test]
fn verification_ensemble_passes_every_test() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("ensemble", &config("ensemble_verify.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = read_json(&tmp.path().join("report.json"));
    assert_eq!(report["all_passed"], true, "{report:#}");
    assert!(tmp.path().join("stats_level4.csv").exists());
}

#[test]
fn white_noise_control_fails_the_moment_bound_as_expected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("ensemble", &config("ensemble_control.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = read_json(&tmp.path().join("report.json"));
    assert_eq!(report["control"], true);
    assert_eq!(report["control_failed_as_expected"], true);
    let top = report["levels"].as_array().unwrap().last().unwrap();
    assert_eq!(top["moment_bound"]["verdict"], "fail");
    assert!(String::from_utf8_lossy(&o.stdout).contains("expected: control"));
}

#[test]
fn single_replica_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "one.json",
        r#"{
  "tower": { "dimension": 1, "base": 4, "factors": [4] },
  "function": { "kind": "random_sign", "level": 1, "seed": 1 },
  "replicas": 1,
  "seed": 3
}"#,
    );
    let o = run_config("ensemble", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn cantor_analysis_reports_kappa_and_self_similarity() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("analyze", &config("analyze_cantor.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit = read_json(&tmp.path().join("decay_fit.json"));
    assert!(fit["kappa_hat"].as_f64().unwrap().is_finite());
    let table = fs::read_to_string(tmp.path().join("self_similarity.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("n,re_n,im_n,re_3n,im_3n,abs_diff"));
    assert_eq!(table.lines().count(), 3001);
    for line in table.lines().skip(1) {
        let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff <= 1e-10, "{line}");
    }
    assert!(tmp.path().join("wiener.csv").exists());
}

#[test]
fn power_law_csv_gives_half_exponent() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("analyze", &config("analyze_power_law.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let kappa = read_json(&tmp.path().join("decay_fit.json"))["kappa_hat"].as_f64().unwrap();
    assert!((kappa + 0.5).abs() <= 0.02, "kappa = {kappa}");
}

#[test]
fn atoms_analysis_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config("analyze", &config("analyze_atoms.json"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn empty_csv_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("empty.csv"), "").unwrap();
    let cfg = write_config(tmp.path(), "a.json", r#"{ "input": { "kind": "csv", "path": "empty.csv" } }"#);
    let o = run_config("analyze", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn malformed_csv_reports_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.csv"), "t,re,im\n1,0.5,0\n2,oops,0\n").unwrap();
    let cfg = write_config(tmp.path(), "a.json", r#"{ "input": { "kind": "csv", "path": "bad.csv" } }"#);
    let o = run_config("analyze", &cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn output_directory_defaults_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("from_env");
    let o = Command::new(BIN)
        .args(["riesz", "--config", config("riesz_lacunary.json").to_str().unwrap()])
        .env("SPECTRAL_DECAY_OUT", &out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("summary.json").exists());
}
