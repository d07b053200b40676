use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tevp(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tevp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TEVP_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> Value {
    let o = tevp(args, out);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("summary is json")
}

fn failure(o: &Output) -> (i32, Value) {
    let code = o.status.code().expect("exit code");
    let line = String::from_utf8_lossy(&o.stderr);
    let last = line.lines().last().unwrap_or_default();
    (code, serde_json::from_str(last).expect("error is json"))
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn direct_first_example() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(
        &["direct", "--example", "ex1", "--re-max", "40", "--strip", "5"],
        dir.path(),
    );
    assert_eq!(v["order"], 6);
    assert!(num(&v, "eps1_at_delta") < 1e-12);
    assert!((num(&v, "delta") - 3f64.ln()).abs() < 1e-10);
    assert!(v["non_real"].as_u64().unwrap() > 0);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# tevp "));
    assert!(lines.next().unwrap().starts_with("# config-sha256 "));
    assert_eq!(lines.next().unwrap(), "re,im,winding");
    assert_eq!(lines.count() as u64, v["eigenvalues"].as_u64().unwrap());
    let ind: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("indicators.json")).unwrap()).unwrap();
    assert_eq!(ind["order"], 6);
    assert_eq!(ind["meta"]["config_sha256"], v["config_sha256"]);
    assert!(dir.path().join("d0_real_axis.csv").exists());
}

#[test]
fn direct_real_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(
        &["direct", "--example", "ex4", "--re-max", "30", "--strip", "1"],
        dir.path(),
    );
    assert_eq!(v["non_real"], 0);
    assert!(v["real"].as_u64().unwrap() > 5);
}

#[test]
fn unit_index_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = failure(&tevp(&["direct", "--expr", "1"], dir.path()));
    assert_eq!(code, 3);
    assert_eq!(err["error"], "DegenerateIdenticallyZero");
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["direct", "--example", "ex9"],
        vec!["direct", "--expr", "1 +"],
        vec!["direct", "--example", "ex1", "--no-such-flag"],
        vec!["invert", "--count", "4"],
        vec!["oracle", "--example", "ex1", "--steps", "10"],
    ] {
        let (code, err) = failure(&tevp(&args, dir.path()));
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(err["message"].as_str().is_some());
    }
    let o = Command::new(env!("CARGO_BIN_EXE_tevp"))
        .args(["direct", "--example", "ex1", "--out"])
        .arg(dir.path())
        .env("TEVP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(failure(&o).0, 2);
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["delta", "--example", "ex1", "--count", "8", "--orders", "2,3,4"];
    let va = ok(&args, a.path());
    let vb = ok(&args, b.path());
    assert_eq!(va, vb);
    for name in va["outputs"].as_array().unwrap() {
        let name = name.as_str().unwrap();
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[direct]\nexample = \"ex2a\"\nre_max = 20.0\nstrip = 1.0\n").unwrap();
    let from_file = ok(&["--config", cfg.to_str().unwrap(), "direct"], &dir.path().join("a"));
    let from_flags = ok(
        &["direct", "--example", "ex2a", "--re-max", "20.0", "--strip", "1.0"],
        &dir.path().join("b"),
    );
    assert_eq!(from_file, from_flags);
    let overridden = ok(
        &["--config", cfg.to_str().unwrap(), "direct", "--re-max", "10"],
        &dir.path().join("c"),
    );
    assert!(overridden["eigenvalues"].as_u64() < from_file["eigenvalues"].as_u64());
}

#[test]
fn delta_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(
        &[
            "delta",
            "--example",
            "ex1",
            "--count",
            "10",
            "--orders",
            "3,4,5",
            "--source-re-max",
            "40",
        ],
        dir.path(),
    );
    assert_eq!(v["order"], 5);
    assert!(num(&v, "error") < 1e-8, "{v}");
    let v = ok(
        &["delta", "--example", "ex4", "--count", "8", "--orders", "2,3,4"],
        dir.path(),
    );
    assert!(num(&v, "error") < 1e-3, "{v}");
    let v = ok(
        &[
            "delta",
            "--example",
            "ex1",
            "--count",
            "10",
            "--select",
            "real",
            "--source-re-max",
            "330",
            "--source-strip",
            "1",
            "--orders",
            "3,4,5",
            "--baseline",
            "asymptotic",
        ],
        dir.path(),
    );
    assert!(num(&v["baselines"]["asymptotic"], "error") < 1e-4, "{v}");
    let curve = std::fs::read_to_string(dir.path().join("eps_curve_0.csv")).unwrap();
    assert!(curve.lines().nth(2) == Some("delta,eps1"));
}

#[test]
fn inversion_from_file_and_from_index() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(
        &["invert", "--example", "ex2b", "--count", "20", "--source-strip", "8"],
        dir.path(),
    );
    assert!(num(&v, "max_error") < 1e-8, "{v}");
    assert!(dir.path().join("error.csv").exists());

    // the same data as a bare eigenvalue file with endpoint values
    let direct = ok(
        &["direct", "--example", "ex1", "--re-max", "40", "--strip", "7"],
        &dir.path().join("d"),
    );
    assert!(direct["eigenvalues"].as_u64().unwrap() >= 10);
    let spectrum = std::fs::read_to_string(dir.path().join("d/spectrum.csv")).unwrap();
    let rows: Vec<&str> = spectrum.lines().filter(|l| !l.starts_with('#')).collect();
    let file = dir.path().join("eigs.csv");
    std::fs::write(&file, rows.join("\n")).unwrap();
    let v = ok(
        &[
            "invert",
            "--eigenvalues",
            file.to_str().unwrap(),
            "--n1",
            "1",
            "--dn1",
            "0",
            "--delta",
            "1.0986122886681098",
        ],
        &dir.path().join("i"),
    );
    assert!(v.get("max_error").is_none());
    let rec = std::fs::read_to_string(dir.path().join("i/reconstruction.csv")).unwrap();
    assert!(rec.lines().any(|l| l == "r,n"));
}

#[test]
fn completion_of_first_example() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(
        &[
            "complete",
            "--example",
            "ex1",
            "--count",
            "5",
            "--select",
            "complex",
            "--source-re-max",
            "170",
            "--source-strip",
            "6",
        ],
        dir.path(),
    );
    assert!(num(&v, "direct_error") <= 5e-2, "{v}");
    assert!(v["completed"].as_u64().unwrap() > 10);
    let v = ok(
        &[
            "complete",
            "--example",
            "ex1",
            "--count",
            "5",
            "--select",
            "real",
            "--source-re-max",
            "170",
            "--source-strip",
            "1",
            "--delta",
            "1.0986122886681098",
            "--then-invert",
            "11",
        ],
        dir.path(),
    );
    assert!(num(&v, "direct_error") <= 1e-2, "{v}");
    assert!(num(&v, "max_error") < 1e-4, "{v}");
    let csv = std::fs::read_to_string(dir.path().join("completion.csv")).unwrap();
    assert_eq!(csv.matches(",true").count(), 5);
}

#[test]
fn oracle_agrees_with_nsbf() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(
        &[
            "oracle",
            "--example",
            "ex1",
            "--re-max",
            "25",
            "--strip",
            "5",
            "--steps",
            "8000",
            "--compare",
        ],
        dir.path(),
    );
    assert_eq!(v["eigenvalues"], v["nsbf_eigenvalues"]);
    assert!(num(&v, "max_difference") < 1e-6, "{v}");
    let v = ok(
        &["oracle", "--example", "ex3", "--k", "4.5,0.5", "--k", "-7,1"],
        dir.path(),
    );
    assert!(num(&v, "max_nsbf_difference") < 1e-6, "{v}");
}
