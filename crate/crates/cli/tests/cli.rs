use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use specband::SpecFile;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_specband"));
    cmd.env_remove("SPECBAND_MAX_N");
    cmd
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

/// Compares against a checked-in file; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, actual: &[u8]) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        expected == actual,
        "{name} differs from golden output:\n{}",
        String::from_utf8_lossy(actual)
    );
}

#[test]
fn analyze_compact_rhaly_matches_golden() {
    let out = run(bin().arg("analyze").arg(spec("rhaly_harmonic_geometric.json")));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    check_golden("rhaly_harmonic_geometric.analyze.json", &out.stdout);
}

#[test]
fn analyze_compact_cesaro_matches_golden() {
    let out = run(bin().arg("analyze").arg(spec("cesaro_half_geometric.json")));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    check_golden("cesaro_half_geometric.analyze.json", &out.stdout);
}

#[test]
fn sweep_matches_golden() {
    let out = run(bin().arg("sweep").arg(spec("cesaro_half_geometric.json")));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    check_golden("cesaro_half_geometric.sweep.csv", &out.stdout);
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("run{i}.json"));
            let out = run(bin()
                .arg("analyze")
                .arg(spec("cesaro_half_geometric.json"))
                .arg("--out")
                .arg(&path));
            assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_changes_only_the_sampled_check() {
    let a = run(bin().arg("analyze").arg(spec("cesaro_half_geometric.json")).args(["--seed", "1"]));
    let b = run(bin().arg("analyze").arg(spec("cesaro_half_geometric.json")).args(["--seed", "2"]));
    let a: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(a["spectral_report"], b["spectral_report"]);
    assert_eq!(a["finite_rank_check"]["bound"], b["finite_rank_check"]["bound"]);
    assert_ne!(a["finite_rank_check"]["seed"], b["finite_rank_check"]["seed"]);
}

#[test]
fn every_shipped_spec_round_trips() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map_or(true, |e| e != "json") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let parsed = SpecFile::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let canon = parsed.to_canonical_json();
        let again = SpecFile::from_json(&canon).unwrap();
        assert_eq!(again, parsed, "{}", path.display());
        assert_eq!(again.to_canonical_json(), canon);
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn empty_spec_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "empty.json", "");
    let out = run(bin().arg("analyze").arg(&p));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("empty"), "{}", stderr(&out));
}

#[test]
fn malformed_spec_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "bad.json", "{\n  \"operator\": {\n    \"form\": \n");
    let out = run(bin().arg("analyze").arg(&p));
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn unknown_key_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(spec("classical_cesaro.json")).unwrap();
    let p = write_temp(&dir, "extra.json", &text.replacen('{', "{ \"typo\": 1,", 1));
    let out = run(bin().arg("analyze").arg(&p));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("typo"));
}

#[test]
fn sweep_without_orders_exits_1() {
    let out = run(bin().arg("sweep").arg(spec("classical_cesaro.json")));
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn strict_refusal_exits_2_and_names_the_hypothesis() {
    let out = run(bin().arg("analyze").arg(spec("rhaly_sqrt_unweighted.json")));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bounded on c0(s)"), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["spectral_report"].is_null());
    assert_eq!(report["provenance"]["spectral_report"], "refused");
}

#[test]
fn assume_accepts_heuristic_hypotheses() {
    let path = spec("rhaly_inverse_square_exp_sqrt.json");
    let strict = run(bin().arg("analyze").arg(&path));
    assert_eq!(strict.status.code(), Some(2));
    let assumed = run(bin().arg("analyze").arg(&path).arg("--assume"));
    assert_eq!(assumed.status.code(), Some(0), "{}", stderr(&assumed));
    let report: serde_json::Value = serde_json::from_slice(&assumed.stdout).unwrap();
    assert_eq!(report["provenance"]["spectral_report"], "assumed");
    let assumptions = report["spectral_report"]["assumptions"].as_array().unwrap();
    assert!(assumptions.iter().any(|a| a["status"] == "assumed"));
}

#[test]
fn eigvec_for_non_eigenvalue_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin()
        .arg("eigvec")
        .arg(spec("rhaly_harmonic_geometric.json"))
        .args(["--lambda", "0.37", "--n", "10", "--out"])
        .arg(dir.path().join("x.csv")));
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn eigvec_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let out = run(bin()
        .arg("eigvec")
        .arg(spec("rhaly_harmonic_geometric.json"))
        .args(["--m", "3", "--n", "40", "--out"])
        .arg(&csv));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,x_n,x_n_s_n");
    assert_eq!(lines.len(), 41);
    assert!(lines[1].starts_with("1,0,"));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["m"], 3);
    assert!(summary["residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(summary["kummer"], "diverging");
}

#[test]
fn order_limit_exits_3() {
    let out = run(bin()
        .env("SPECBAND_MAX_N", "50")
        .arg("sweep")
        .arg(spec("rhaly_harmonic_geometric.json")));
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("50"));
}

#[test]
fn diagonal_cesaro_sweep_sees_unit_sections() {
    let out = run(bin().arg("sweep").arg(spec("cesaro_diagonal.json")));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "10");
    let sigma: f64 = row[3].parse().unwrap();
    assert!((sigma - 0.1).abs() < 1e-12, "{sigma}");
}
