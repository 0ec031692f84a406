use std::fs;
use std::process::{Command, Output};

fn ellverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellverify"))
        .args(args)
        .env_remove("ELLVERIFY_PREC")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn list_prints_the_catalog() {
    let o = ellverify(&["list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[0].starts_with("S1  summation  "));
    assert!(lines.iter().any(|l| l.starts_with("P3  special-p0  ")), "{text}");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["verify", "--id", "NOPE"][..],
        &["verify"],
        &["verify-all", "--id", "S1"],
        &["verify", "--id", "S1", "--n", "5..2"],
        &["verify", "--id", "S1", "--nome", "0.5..1.5"],
        &["verify", "--id", "S1", "--prec", "10"],
        &["verify", "--id", "S1", "--trials", "0"],
        &["lint", "--id", "S1"],
        &["frobnicate"],
        &["verify", "--bogus"],
    ] {
        assert_eq!(code(&ellverify(args)), 64, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&ellverify(&["--help"])), 0);
}

#[test]
fn verify_passes_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = ellverify(&["verify", "--id", "S1", "--id", "T5", "--trials", "3", "--n", "0..4", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("S1  PASS  variant=corrected"), "{stdout}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["verdict"], "PASS");
    assert_eq!(doc["reports"].as_array().unwrap().len(), 2);
    assert_eq!(doc["reports"][0]["identity_id"], "S1");
}

#[test]
fn impossible_tolerance_fails() {
    let o = ellverify(&["verify", "--id", "S2", "--trials", "2", "--n", "1..3", "--tol", "1e-200"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().contains("S2  FAIL"));
}

#[test]
fn table_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = ellverify(&["verify", "--id", "E2", "--trials", "2", "--n", "0..2", "--format", "table", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "identity_id,trial,n,rel_error,pass");
    assert_eq!(lines.len(), 1 + 2 * 3);
    assert!(lines[1..].iter().all(|l| l.starts_with("E2,") && l.ends_with(",true")));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = ellverify(&["verify", "--id", "T1", "--id", "P1", "--trials", "2", "--n", "0..3", "--seed", "5", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn precision_from_environment_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, flag: Option<&str>| {
        let out = dir.path().join("p.json");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ellverify"));
        cmd.args(["verify", "--id", "S3", "--trials", "1", "--n", "0..1", "--out", out.to_str().unwrap()]);
        cmd.env_remove("ELLVERIFY_PREC");
        if let Some(e) = env {
            cmd.env("ELLVERIFY_PREC", e);
        }
        if let Some(f) = flag {
            cmd.args(["--prec", f]);
        }
        assert!(cmd.output().unwrap().status.success());
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        doc["config"]["precision_bits"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 256);
    assert_eq!(run(Some("320"), None), 320);
    assert_eq!(run(Some("320"), Some("192")), 192);
}

#[test]
fn check_commands_report_lines() {
    let o = ellverify(&["check-lemma", "--trials", "9", "--seed", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS  ")), "{text}");
    assert!(text.contains("lemma on random triangular pairs"));
}
