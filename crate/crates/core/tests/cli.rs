//! End-to-end tests of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

use forcinglab::certify::{parse_csv, verify, Certificate};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forcinglab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn catalog_prints_named_codes() {
    let out = run(&["catalog", "S_7"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("001011,00101,0010,001,00,0"));

    let out = run(&["catalog", "T_4"]);
    assert!(stdout(&out).contains("111,11,1"));

    let out = run(&["catalog"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("H_6^9"));
    assert!(text.contains("S_15"));

    let out = run(&["catalog", "X_9"]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_code_two() {
    let out = run(&["classify", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_six_writes_table_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let dir_path = dir.path().to_str().unwrap();
    let out = run(&["classify", "--n", "6", "--out", "csv", "--cert-dir", dir_path]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 55);
    let sums = |f: fn(&forcinglab::certify::ClassificationRow) -> bool| {
        rows.iter().filter(|r| f(r)).count()
    };
    assert_eq!(sums(|r| r.a), 20);
    assert_eq!(sums(|r| r.b), 15);
    assert_eq!(sums(|r| r.c), 29);
    assert_eq!(sums(|r| r.d), 9);
    assert_eq!(sums(|r| r.e), 5);

    for name in ["table.csv", "table.json", "certificates.jsonl", "manifest.json"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "classify");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
    for output in manifest["outputs"].as_array().unwrap() {
        assert_eq!(output["sha256"].as_str().unwrap().len(), 64);
    }

    // the emitted batch passes verification through the library
    let batch = std::fs::read_to_string(dir.path().join("certificates.jsonl")).unwrap();
    for line in batch.lines() {
        let cert: Certificate = serde_json::from_str(line).unwrap();
        assert!(verify(&cert).accepted);
    }

    // and through the CLI verifier
    let cert_file = dir.path().join("certificates.jsonl");
    let out = run(&["verify", cert_file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("0 rejected"));
}

#[test]
fn classify_five_flags_h5_as_blowup_disqualified() {
    let out = run(&["classify", "--n", "5"]);
    assert!(out.status.success());
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 11);
    let h5 = rows.iter().find(|r| r.name.as_deref() == Some("H_5")).unwrap();
    assert!(h5.d && !h5.a && !h5.e);
    let f5 = rows.iter().find(|r| r.name.as_deref() == Some("F_5")).unwrap();
    assert_eq!(f5.flag_count(), 0);
}

#[test]
fn classify_rejects_unsupported_order() {
    let out = run(&["classify", "--n", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("5 or 6"));
}

#[test]
fn verify_flags_tampering_and_tolerates_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.jsonl");
    let out = run(&["classify", "--n", "5", "--cert-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    std::fs::rename(dir.path().join("certificates.jsonl"), &good).unwrap();

    // tamper: change a stored copy count
    let body = std::fs::read_to_string(&good).unwrap();
    let tampered_body = body.replace("\"copies\":21", "\"copies\":22");
    assert_ne!(body, tampered_body);
    let tampered = dir.path().join("tampered.jsonl");
    std::fs::write(&tampered, tampered_body).unwrap();
    let out = run(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("REJECT"));

    // malformed line
    let broken = dir.path().join("broken.jsonl");
    std::fs::write(&broken, "{not json}\n").unwrap();
    let out = run(&["verify", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("PARSE ERROR"));

    // empty file: accept with a warning
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out = run(&["verify", empty.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn poly_prints_expansion_and_exceedance() {
    let out = run(&["poly", "H_6^14", "A_x"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1/32768 + 1/8192 x^2 - 5/16384 x^4 - 9/4096 x^6 - 7/4096 x^8"));
    assert!(text.contains("exceeds 1/32768 at x ="));

    let out = run(&["poly", "H_6^9", "B_x"]);
    assert!(stdout(&out).contains("1/3072 x^4"));

    let out = run(&["poly", "H_6^14", "D_x"]);
    assert_eq!(out.status.code(), Some(1));

    // a raw code works as the pattern argument
    let out = run(&["poly", "10,1", "A_x"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("d*(10,1, A_x)"));

    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("grid.csv");
    let out = run(&["poly", "H_6^14", "A_x", "--grid-step", "40", "--dump", dump.to_str().unwrap()]);
    assert!(out.status.success());
    let grid = std::fs::read_to_string(&dump).unwrap();
    assert!(grid.starts_with("x,value\n"));
    assert_eq!(grid.lines().count(), 42);
}

#[test]
fn search_runs_and_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "search",
        "T_3",
        "--size",
        "4",
        "--seed",
        "7",
        "--restarts",
        "2",
        "--cert-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("copies: 4"));
    // transitive patterns have no blow-up certificate
    assert!(text.contains("no certificate"));
    assert!(dir.path().join("manifest.json").exists());
    assert!(dir.path().join("search-result.json").exists());

    let out = run(&["search", "H_5", "--size", "7", "--seed", "0", "--restarts", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("copies: 21"));
    assert!(text.contains("certificate: copies 21 meet threshold 16807/1024"));
}

#[test]
fn search_respects_thread_env_var() {
    let out = Command::new(env!("CARGO_BIN_EXE_forcinglab"))
        .env("FORCINGLAB_THREADS", "1")
        .args(["classify", "--n", "5"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert_eq!(parse_csv(&stdout(&out)).unwrap().len(), 11);
}

#[test]
fn outputs_note_directory_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["classify", "--n", "5", "--cert-dir", dir.path().to_str().unwrap()]);
    assert!(stderr(&out).contains(&format!("outputs written to {}", dir.path().display())));
    assert!(Path::new(&dir.path().join("table.csv")).exists());
}
