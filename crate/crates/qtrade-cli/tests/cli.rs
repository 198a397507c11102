//! End-to-end tests driving the `qtrade` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qtrade"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qtrade-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_bell(dir: &Path) -> PathBuf {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let path = dir.join("bell.json");
    std::fs::write(
        &path,
        format!(r#"{{"dims":[2,2],"re":[{s},0.0,0.0,{s}],"im":[0.0,0.0,0.0,0.0]}}"#),
    )
    .unwrap();
    path
}

fn write_ghz(dir: &Path) -> PathBuf {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let path = dir.join("ghz.json");
    std::fs::write(
        &path,
        format!(r#"{{"dims":[2,2,2],"re":[{s},0,0,0,0,0,0,{s}],"im":[0,0,0,0,0,0,0,0]}}"#),
    )
    .unwrap();
    path
}

fn write_product3(dir: &Path) -> PathBuf {
    let path = dir.join("product.json");
    std::fs::write(
        &path,
        r#"{"dims":[2,2,2],"re":[1,0,0,0,0,0,0,0],"im":[0,0,0,0,0,0,0,0]}"#,
    )
    .unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn compute_bell_entanglement_q2() {
    let dir = workdir("compute");
    let bell = write_bell(&dir);
    let out_path = dir.join("report.json");
    let out = run(bin()
        .args(["compute", "--measure", "q-entanglement", "--q", "2"])
        .arg("--input")
        .arg(&bell)
        .arg("--output")
        .arg(&out_path));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(report["value"], 0.5);
    assert_eq!(report["bound_side"], "exact");
    assert_eq!(report["measure"], "q-entanglement");
}

#[test]
fn compute_and_verify_csv_format() {
    let dir = workdir("csv");
    let bell = write_bell(&dir);
    let out = run(bin()
        .args([
            "compute",
            "--measure",
            "q-ue",
            "--q",
            "2",
            "--format",
            "csv",
        ])
        .arg("--input")
        .arg(&bell));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("measure,q,value,bound_side,m_outcomes"));
    assert!(text.contains("q-ue,2,0.5,exact,"), "{text}");

    let ghz = write_ghz(&dir);
    let out = run(bin()
        .args([
            "verify",
            "--theorem",
            "cond-cancel",
            "--q",
            "3",
            "--format",
            "csv",
        ])
        .arg("--input")
        .arg(&ghz));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("state_id,theorem,q,lhs,rhs,residual,converged"));
    assert!(text.lines().nth(1).unwrap().contains("cond-cancel"));
}

#[test]
fn compute_entropy_accepts_sub_unit_q() {
    let dir = workdir("entropy");
    let bell = write_bell(&dir);
    let out = run(bin()
        .args(["compute", "--measure", "entropy", "--q", "0.5", "--q", "2"])
        .arg("--input")
        .arg(&bell));
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 2);
    // pure state: zero entropy at every q
    assert_eq!(reports[0]["value"], 0.0);
    assert_eq!(reports[1]["value"], 0.0);
}

#[test]
fn compute_rejects_malformed_input_with_exit_2() {
    let dir = workdir("malformed");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = run(bin()
        .args(["compute", "--measure", "q-cc", "--q", "2"])
        .arg("--input")
        .arg(&path));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty(), "diagnostic expected on stderr");

    // well-formed JSON but invalid physics: unnormalized state
    let path = dir.join("unnormalized.json");
    std::fs::write(&path, r#"{"dims":[2],"re":[1.0,1.0],"im":[0.0,0.0]}"#).unwrap();
    let out = run(bin()
        .args(["compute", "--measure", "entropy", "--q", "1"])
        .arg("--input")
        .arg(&path));
    assert_eq!(out.status.code(), Some(2));

    // dimension mismatch: measures need bipartite input
    let dir2 = workdir("tripartite");
    let ghz = write_ghz(&dir2);
    let out = run(bin()
        .args(["compute", "--measure", "q-cc", "--q", "2"])
        .arg("--input")
        .arg(&ghz));
    assert_eq!(out.status.code(), Some(2));

    // q < 1 rejected for measures
    let bell = write_bell(&dir);
    let out = run(bin()
        .args(["compute", "--measure", "q-cc", "--q", "0.5"])
        .arg("--input")
        .arg(&bell));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_is_byte_deterministic() {
    let dir = workdir("determinism");
    // a mixed state so the optimizer actually runs
    let mixed = dir.join("mixed.json");
    std::fs::write(
        &mixed,
        r#"{"dims":[2,2],
            "re":[[0.4,0,0,0.2],[0,0.1,0,0],[0,0,0.1,0],[0.2,0,0,0.4]],
            "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let out_a = dir.join("a.json");
    let out_b = dir.join("b.json");
    for (out_path, _) in [(&out_a, 0), (&out_b, 1)] {
        let out = run(bin()
            .args([
                "compute",
                "--measure",
                "q-cc",
                "--q",
                "2",
                "--restarts",
                "6",
                "--seed",
                "77",
            ])
            .arg("--input")
            .arg(&mixed)
            .arg("--output")
            .arg(out_path));
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap(),
        "identical command + seed must produce byte-identical reports"
    );
}

#[test]
fn config_file_precedence() {
    let dir = workdir("config");
    let mixed = dir.join("mixed.json");
    std::fs::write(
        &mixed,
        r#"{"dims":[2,2],
            "re":[[0.4,0,0,0.2],[0,0.1,0,0],[0,0,0.1,0],[0.2,0,0,0.4]],
            "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let config = dir.join("config.json");
    std::fs::write(&config, r#"{"seed": 55, "restarts": 4}"#).unwrap();

    // config supplies values when flags are absent
    let out = run(bin()
        .args(["compute", "--measure", "q-ue", "--q", "2"])
        .arg("--input")
        .arg(&mixed)
        .arg("--config")
        .arg(&config));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["opt"]["seed"], 55);
    assert_eq!(report["opt"]["restarts_used"], 4);

    // flags beat the config file
    let out = run(bin()
        .args(["compute", "--measure", "q-ue", "--q", "2", "--seed", "9"])
        .arg("--input")
        .arg(&mixed)
        .arg("--config")
        .arg(&config));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["opt"]["seed"], 9);
    assert_eq!(report["opt"]["restarts_used"], 4);

    // unknown config fields are an input error
    std::fs::write(&config, r#"{"bogus": 1}"#).unwrap();
    let out = run(bin()
        .args(["compute", "--measure", "q-ue", "--q", "2"])
        .arg("--input")
        .arg(&mixed)
        .arg("--config")
        .arg(&config));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_falls_back_to_env_var() {
    let dir = workdir("env-seed");
    let mixed = dir.join("mixed.json");
    std::fs::write(
        &mixed,
        r#"{"dims":[2,2],
            "re":[[0.4,0,0,0.2],[0,0.1,0,0],[0,0,0.1,0],[0.2,0,0,0.4]],
            "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let out = run(bin()
        .args([
            "compute",
            "--measure",
            "q-ue",
            "--q",
            "2",
            "--restarts",
            "3",
        ])
        .arg("--input")
        .arg(&mixed)
        .env("QTRADE_SEED", "12345"));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["opt"]["seed"], 12345);
}

#[test]
fn verify_t2_on_ghz_converges() {
    let dir = workdir("verify-t2");
    let ghz = write_ghz(&dir);
    let out_path = dir.join("t2.json");
    let out = run(bin()
        .args(["verify", "--theorem", "t2", "--q", "1", "--seed", "5"])
        .arg("--input")
        .arg(&ghz)
        .arg("--output")
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    assert!(report["residual"].as_f64().unwrap().abs() <= 1e-4);
    assert_eq!(report["violation"], false);
}

#[test]
fn verify_product_state_is_exactly_zero() {
    let dir = workdir("verify-product");
    let product = write_product3(&dir);
    for theorem in [
        "t1-cc",
        "t1-ue",
        "t2",
        "t3-identity",
        "t4-identity",
        "cond-cancel",
    ] {
        let out = run(bin()
            .args(["verify", "--theorem", theorem, "--q", "1.5"])
            .arg("--input")
            .arg(&product));
        assert_eq!(out.status.code(), Some(0), "{theorem}");
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(
            report["residual"].as_f64().unwrap().abs() <= 1e-9,
            "{theorem}: {}",
            report["residual"]
        );
    }
}

#[test]
fn verify_restart_dominance() {
    let dir = workdir("verify-restarts");
    let ghz = write_ghz(&dir);
    let mut residuals = Vec::new();
    for restarts in ["1", "20"] {
        let out = run(bin()
            .args([
                "verify",
                "--theorem",
                "t1-cc",
                "--q",
                "2",
                "--seed",
                "3",
                "--restarts",
                restarts,
            ])
            .arg("--input")
            .arg(&ghz));
        assert_eq!(out.status.code(), Some(0));
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        residuals.push(report["residual"].as_f64().unwrap().abs());
    }
    assert!(
        residuals[1] <= residuals[0] + 1e-12,
        "residual(20)={} residual(1)={}",
        residuals[1],
        residuals[0]
    );
}

#[test]
fn verify_rejects_mixed_input() {
    let dir = workdir("verify-mixed");
    let mixed = dir.join("mixed3.json");
    // maximally mixed tripartite matrix: purity far below 1
    let mut re = String::from("[");
    for r in 0..8 {
        re.push('[');
        for c in 0..8 {
            re.push_str(if r == c { "0.125" } else { "0" });
            if c < 7 {
                re.push(',');
            }
        }
        re.push(']');
        if r < 7 {
            re.push(',');
        }
    }
    re.push(']');
    let zeros = re.replace("0.125", "0");
    std::fs::write(
        &mixed,
        format!(r#"{{"dims":[2,2,2],"re":{re},"im":{zeros}}}"#),
    )
    .unwrap();
    let out = run(bin()
        .args(["verify", "--theorem", "cond-cancel", "--q", "2"])
        .arg("--input")
        .arg(&mixed));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_corpus_is_deterministic_and_canonical_prepended() {
    let dir = workdir("gen");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let out = run(bin()
            .args([
                "gen-corpus",
                "--corpus-count",
                "3",
                "--dims",
                "2,2,2",
                "--seed",
                "7",
            ])
            .arg("--output")
            .arg(path));
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let plain: Vec<serde_json::Value> =
        serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(plain.len(), 3);
    for state in &plain {
        let re = state["re"].as_array().unwrap();
        let im = state["im"].as_array().unwrap();
        let norm: f64 = re
            .iter()
            .zip(im)
            .map(|(r, i)| r.as_f64().unwrap().powi(2) + i.as_f64().unwrap().powi(2))
            .sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    let with_canonical = dir.join("canon.json");
    let out = run(bin()
        .args([
            "gen-corpus",
            "--corpus-count",
            "1",
            "--dims",
            "2,2,2",
            "--seed",
            "7",
            "--include-canonical",
        ])
        .arg("--output")
        .arg(&with_canonical));
    assert!(out.status.success());
    let states: Vec<serde_json::Value> =
        serde_json::from_slice(&std::fs::read(&with_canonical).unwrap()).unwrap();
    // ghz, w, product, bell0 prepended before the random state
    assert_eq!(states.len(), 5);
    let ghz_re = states[0]["re"].as_array().unwrap();
    assert!((ghz_re[0].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    let w_re = states[1]["re"].as_array().unwrap();
    assert!((w_re[1].as_f64().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn scan_canonical_corpus_has_no_flags_and_is_deterministic() {
    let dir = workdir("scan");
    let out_a = dir.join("run-a");
    let out_b = dir.join("run-b");
    for out_dir in [&out_a, &out_b] {
        let out = run(bin()
            .args([
                "scan",
                "--corpus-count",
                "2",
                "--dims",
                "2,2,2",
                "--include-canonical",
                "--q",
                "1",
                "--q",
                "2",
                "--seed",
                "11",
                "--restarts",
                "4",
                "--max-iters",
                "400",
            ])
            .arg("--output")
            .arg(out_dir));
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    // identical summaries across runs (hash-equality)
    let sum_a = std::fs::read(out_a.join("summary.json")).unwrap();
    let sum_b = std::fs::read(out_b.join("summary.json")).unwrap();
    assert_eq!(sum_a, sum_b);

    let summary: serde_json::Value = serde_json::from_slice(&sum_a).unwrap();
    // (4 canonical + 2 random) states x 2 q x 5 theorems
    assert_eq!(summary["total_reports"], 60);
    assert_eq!(summary["violation_candidates"].as_array().unwrap().len(), 0);
    assert_eq!(summary["errors"].as_array().unwrap().len(), 0);

    let reports: Vec<serde_json::Value> =
        serde_json::from_slice(&std::fs::read(out_a.join("reports.json")).unwrap()).unwrap();
    assert_eq!(reports.len(), 60);
    let csv = std::fs::read_to_string(out_a.join("reports.csv")).unwrap();
    assert!(csv.starts_with("state_id,theorem,q,lhs,rhs,residual,converged"));
    assert_eq!(csv.lines().count(), 61);
    assert!(out_a.join("timing.json").exists());
}

#[test]
fn scan_reads_corpus_file() {
    let dir = workdir("scan-file");
    let corpus = dir.join("corpus.json");
    let out = run(bin()
        .args([
            "gen-corpus",
            "--corpus-count",
            "2",
            "--dims",
            "2,2,2",
            "--seed",
            "3",
        ])
        .arg("--output")
        .arg(&corpus));
    assert!(out.status.success());
    let out_dir = dir.join("scan-out");
    let out = run(bin()
        .args([
            "scan",
            "--q",
            "1.5",
            "--theorems",
            "t1-ue,cond-cancel",
            "--restarts",
            "3",
            "--seed",
            "1",
        ])
        .arg("--input")
        .arg(&corpus)
        .arg("--output")
        .arg(&out_dir));
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["total_reports"], 4); // 2 states x 1 q x 2 theorems
}
