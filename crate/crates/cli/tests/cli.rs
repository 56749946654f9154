use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mubent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mubent")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn make_state(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut full = vec!["make-state"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", p(&out)]);
    let o = mubent(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn construct_and_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m3.json");
    assert!(mubent(&["construct-mubs", "--d", "3", "--output", p(&file)]).status.success());
    let report = json(&mubent(&["verify-mubs", p(&file)]));
    assert_eq!(report["pass"], true);
    assert_eq!(report["bases"], 4);
    let loaded = mubent::io::read_mub_set(&file).unwrap();
    assert_eq!(loaded.len(), 4);
}

#[test]
fn qubit_file_holds_pauli_bases() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m2.json");
    assert!(mubent(&["construct-mubs", "--d", "2", "--output", p(&file)]).status.success());
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // z, x and y eigenbases with the first nonzero amplitude real-positive
    let expected = [
        [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
        [[[h, 0.0], [h, 0.0]], [[h, 0.0], [-h, 0.0]]],
        [[[h, 0.0], [0.0, h]], [[h, 0.0], [0.0, -h]]],
    ];
    for (k, basis) in expected.iter().enumerate() {
        for (i, vector) in basis.iter().enumerate() {
            for (j, [re, im]) in vector.iter().enumerate() {
                let got = &raw["bases"][k][i][j];
                assert!((got[0].as_f64().unwrap() - re).abs() < 1e-12);
                assert!((got[1].as_f64().unwrap() - im).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn unsupported_dimension_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = mubent(&["construct-mubs", "--d", "6", "--output", p(&dir.path().join("x.json"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("Fourier pair") && err.contains("import"), "{err}");
}

#[test]
fn isotropic_boundary_is_not_violated() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_state(dir.path(), "iso.json", &["isotropic", "--d", "3", "--alpha", "0.5"]);
    let r = json(&mubent(&["evaluate", p(&s), "--m", "2", "--json"]));
    assert_eq!(r["violated"], false);
    assert!(r["margin"].as_f64().unwrap().abs() <= 1e-9);
}

#[test]
fn maximally_entangled_qutrits_reach_four() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_state(dir.path(), "phi.json", &["isotropic", "--d", "3", "--alpha", "1"]);
    let r = json(&mubent(&["evaluate", p(&s), "--conjugate-b", "true", "--json"]));
    assert!((r["value"].as_f64().unwrap() - 4.0).abs() < 1e-10);
    assert_eq!(r["violated"], true);
    let text = stdout(&mubent(&["evaluate", p(&s)]));
    assert!(text.contains("verdict: violated"), "{text}");
}

#[test]
fn maximally_mixed_gives_m_over_d() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_state(dir.path(), "mm.json", &["maximally-mixed", "--d", "9"]);
    for m in 1..=4 {
        let r = json(&mubent(&["evaluate", p(&s), "--m", &m.to_string(), "--json"]));
        assert!((r["value"].as_f64().unwrap() - m as f64 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn evaluate_with_mub_file_and_relabel() {
    let dir = tempfile::tempdir().unwrap();
    let mubs = dir.path().join("m3.json");
    mubent(&["construct-mubs", "--d", "3", "--output", p(&mubs)]);
    let s = make_state(dir.path(), "iso.json", &["isotropic", "--d", "3", "--alpha", "0.7"]);
    let fixed = json(&mubent(&["evaluate", p(&s), "--mubs", p(&mubs), "--json"]));
    let relabel = json(&mubent(&["evaluate", p(&s), "--mubs", p(&mubs), "--relabel", "--json"]));
    assert!(relabel["value"].as_f64().unwrap() >= fixed["value"].as_f64().unwrap() - 1e-12);
    assert_eq!(relabel["relabelings"].as_array().unwrap().len(), 4);
}

#[test]
fn multipartite_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_state(dir.path(), "s3.json", &["aharonov", "--n", "3", "--alpha", "0.3"]);
    let r = json(&mubent(&["evaluate", p(&s), "--parties", "3", "--json"]));
    let expected = 4.0 * (0.3 + 0.7 * 6.0 / 27.0);
    assert!((r["value"].as_f64().unwrap() - expected).abs() < 1e-10);
    assert_eq!(r["violated"], false);
    assert_eq!(r["criterion"], "J_m");
}

#[test]
fn verdicts_do_not_change_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let yes = make_state(dir.path(), "a.json", &["isotropic", "--d", "2", "--alpha", "0.9"]);
    let no = make_state(dir.path(), "b.json", &["isotropic", "--d", "2", "--alpha", "0.1"]);
    assert_eq!(mubent(&["evaluate", p(&yes)]).status.code(), Some(0));
    assert_eq!(mubent(&["evaluate", p(&no)]).status.code(), Some(0));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"dim\": 2, \"re\": [[1]]}").unwrap();
    assert_eq!(mubent(&["evaluate", p(&junk)]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"re\": [[2, 0], [0, -1]], \"im\": [[0, 0], [0, 0]]}").unwrap();
    assert_eq!(mubent(&["evaluate", p(&bad)]).status.code(), Some(2));
    let s = make_state(dir.path(), "q.json", &["isotropic", "--d", "2", "--alpha", "0.5"]);
    assert_eq!(mubent(&["evaluate", p(&s), "--d", "3"]).status.code(), Some(2));
    assert_eq!(mubent(&["evaluate", p(&dir.path().join("missing.json"))]).status.code(), Some(2));
    assert_eq!(mubent(&["scan", "isotropic", "--d", "3", "--m-max", "9"]).status.code(), Some(2));
    assert_eq!(mubent(&["sample", p(&s), "--shots", "0"]).status.code(), Some(2));
}

#[test]
fn isotropic_scan_thresholds() {
    let o = mubent(&["scan", "isotropic", "--d", "5"]);
    let text = stdout(&o);
    assert!(text.starts_with("m,threshold,bound\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    for (row, m) in rows.iter().zip(2..) {
        assert_eq!(row[0], m.to_string());
        assert!((row[1].parse::<f64>().unwrap() - 1.0 / m as f64).abs() < 1e-7);
    }
}

#[test]
fn isotropic_scan_grid() {
    let text = stdout(&mubent(&["scan", "isotropic", "--d", "3", "--m-min", "4", "--grid", "10"]));
    assert!(text.starts_with("m,alpha,value,bound,violated\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 11);
    let onset = rows.iter().find(|r| r[4] == "true").unwrap();
    assert_eq!(onset[1].parse::<f64>().unwrap(), 0.3);
}

#[test]
fn aharonov_scan_thresholds() {
    let rows = csv_rows(&stdout(&mubent(&["scan", "aharonov", "--n", "3"])));
    let expected = [4.0 / 7.0, 3.0 / 7.0, 5.0 / 14.0];
    assert_eq!(rows.len(), 3);
    for (row, e) in rows.iter().zip(expected) {
        assert!((row[1].parse::<f64>().unwrap() - e).abs() < 1e-12);
        assert!((row[2].parse::<f64>().unwrap() - e).abs() < 1e-7);
    }
}

#[test]
fn cv_scan_is_monotone_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cv.csv");
    let args = ["scan", "cv", "--r-min", "0", "--r-max", "1", "--r-step", "0.02", "--method", "closed-form"];
    let mut with_output = args.to_vec();
    with_output.extend_from_slice(&["--output", p(&out)]);
    assert!(mubent(&with_output).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("r,C_xx,C_pp,I,bound,violated\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 51);
    let values: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(stdout(&mubent(&args)), text);
}

#[test]
fn optimize_reports_structured_result() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_state(dir.path(), "iso.json", &["isotropic", "--d", "2", "--alpha", "0.6"]);
    let r = json(&mubent(&["optimize", p(&s), "--restarts", "2", "--seed", "3"]));
    let value = r["value"].as_f64().unwrap();
    assert!(value >= 3.0 * (0.6 + 0.4 / 2.0) - 1e-9);
    assert_eq!(r["bound"].as_f64().unwrap(), 2.0);
    assert!((r["margin"].as_f64().unwrap() - (value - 2.0)).abs() < 1e-12);
    assert_eq!(r["params_a"]["angles"].as_array().unwrap().len(), 1);
}

#[test]
fn sampling_cli() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_state(dir.path(), "iso.json", &["isotropic", "--d", "3", "--alpha", "0.5"]);
    let one = json(&mubent(&["sample", p(&s), "--shots", "1", "--seed", "4"]));
    for c in one["per_basis"].as_array().unwrap() {
        let c = c.as_f64().unwrap();
        assert!(c == 0.0 || c == 1.0);
    }
    let a = stdout(&mubent(&["sample", p(&s), "--shots", "500", "--seed", "8"]));
    let b = stdout(&mubent(&["sample", p(&s), "--shots", "500", "--seed", "8"]));
    assert_eq!(a, b);
}
