//! End-to-end checks of the batch binary: subcommands, config files, exit
//! codes, and report files.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iqlab"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("iqlab-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn verify_relations_passes_and_writes_report() {
    let out = tmp("verify.json");
    let status = bin()
        .args([
            "verify-relations",
            "--case",
            "AI-odd",
            "--r",
            "1",
            "--tensor",
            "VV",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["tool"], "iqlab");
}

#[test]
fn branch_emits_csv_summary() {
    let out = tmp("branch.json");
    let status = bin()
        .args([
            "branch", "--case", "AII", "--r", "2", "--tensor", "VV", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let mut csv = out.clone();
    csv.set_extension("csv");
    let body = std::fs::read_to_string(csv).unwrap();
    assert!(body.starts_with("case,r,module,record,ladder,labels,pass,kdim"));
    assert!(body.lines().count() >= 4);
}

#[test]
fn config_file_with_flag_override() {
    let cfg = tmp("config.json");
    std::fs::write(
        &cfg,
        r#"{"case": "AI-odd", "r": 1, "tensor": "V", "varsigma": {"1": "q^-1", "2": "q^-1"}}"#,
    )
    .unwrap();
    let out = tmp("cfg-run.json");
    let status = bin()
        .args(["classify", "--config"])
        .arg(&cfg)
        .args(["--tensor", "VV", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn malformed_config_exits_two() {
    let cfg = tmp("bad.json");
    std::fs::write(&cfg, r#"{"case": "AI-odd", "r": 1, "nope": true}"#).unwrap();
    let status = bin().args(["branch", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // Unknown case tags are configuration errors too.
    let status = bin()
        .args(["branch", "--case", "ZZ", "--r", "1"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn audit_failure_exits_one() {
    // A valid but wrong parameter gauge breaks the case relation table.
    let cfg = tmp("corrupt.json");
    std::fs::write(
        &cfg,
        r#"{"case": "AI-odd", "r": 1, "tensor": "VV",
            "varsigma": {"1": "q^-1", "2": "q"}}"#,
    )
    .unwrap();
    let out = tmp("corrupt-run.json");
    let status = bin()
        .args(["verify-relations", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn conjecture_runs() {
    let out = tmp("conj.json");
    let status = bin()
        .args(["conjecture46", "--case", "BI-conj", "--r", "1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn deterministic_output_files() {
    let out1 = tmp("det1.json");
    let out2 = tmp("det2.json");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "branch", "--case", "AI-odd", "--r", "1", "--tensor", "VV", "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        std::fs::read_to_string(out1).unwrap(),
        std::fs::read_to_string(out2).unwrap()
    );
}
