//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p ellverify-cli --test acceptance`.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ellverify_core::checks::{self, CheckLine};
use ellverify_core::registry::{Side, Variant};
use ellverify_core::verifier::{verify_identity, verify_many, Fault, SampleConfig, SuiteSummary, Verdict};
use ellverify_core::NumericContext;

const SEED: u64 = 42;

type Criterion = (&'static str, Duration, fn(&NumericContext) -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_lines(lines: &[CheckLine]) -> Outcome {
    let failed: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.name.as_str()).collect();
    let worst = lines.iter().filter(|l| l.threshold.is_finite()).map(|l| l.value / l.threshold).fold(0f64, f64::max);
    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() { format!("{} checks, worst value/threshold {worst:.1e}", lines.len()) } else { format!("failed: {}", failed.join("; ")) },
    }
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn suite(list: &[&str], n: (usize, usize), ctx: &NumericContext) -> SuiteSummary {
    let cfg = SampleConfig { seed: SEED, trials: 50, n_range: n, ..SampleConfig::default() };
    verify_many(&ids(list), &cfg, ctx).expect("suite runs")
}

fn from_summary(s: &SuiteSummary) -> Outcome {
    let bad: Vec<String> = s.reports.iter().filter(|r| r.verdict != Verdict::Pass).map(|r| format!("{} {}", r.identity_id, r.verdict)).collect();
    let worst = s.reports.iter().filter_map(|r| r.max_rel_error).fold(0f64, f64::max);
    let records: usize = s.reports.iter().map(|r| r.trials.len()).sum();
    Outcome {
        pass: bad.is_empty() && s.verdict == Verdict::Pass,
        detail: if bad.is_empty() { format!("{} identities, {records} comparisons, max rel_error {worst:.1e}", s.reports.len()) } else { format!("not passing: {}", bad.join(", ")) },
    }
}

fn c1(ctx: &NumericContext) -> Outcome {
    from_lines(&checks::kernel_suite(SEED, 200, ctx).expect("kernel suite"))
}

fn c2(ctx: &NumericContext) -> Outcome {
    from_lines(&checks::matrix_suite(SEED, 50, ctx).expect("matrix suite"))
}

fn c3(ctx: &NumericContext) -> Outcome {
    from_lines(&checks::lemma_suite(SEED, 100, ctx).expect("lemma suite"))
}

fn c4(ctx: &NumericContext) -> Outcome {
    from_summary(&suite(&["E1", "E2", "E3", "E4"], (0, 6), ctx))
}

fn c5(ctx: &NumericContext) -> Outcome {
    let s = suite(&["S1", "S2", "S3", "S4", "S5", "S6"], (0, 8), ctx);
    let t = suite(&["T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8"], (0, 6), ctx);
    let (a, b) = (from_summary(&s), from_summary(&t));
    let s1 = &s.reports[0];
    let recorded = s1.identity_id == "S1" && s1.variant_used == Variant::Corrected;
    Outcome {
        pass: a.pass && b.pass && recorded,
        detail: format!("S: {}; T: {}; S1 variant_used={}", a.detail, b.detail, s1.variant_used),
    }
}

fn c6(ctx: &NumericContext) -> Outcome {
    let sides = from_summary(&suite(&["P1", "P2", "P3"], (0, 8), ctx));
    let limits = from_lines(&checks::limit_suite(SEED, ctx).expect("limit suite"));
    Outcome { pass: sides.pass && limits.pass, detail: format!("{}; limits: {}", sides.detail, limits.detail) }
}

fn c7(ctx: &NumericContext) -> Outcome {
    let lines = checks::lint_suite(SEED, ctx).expect("lint suite");
    let flagged = lines.iter().filter(|l| l.name.ends_with("perturbed by 1.01 flagged")).count();
    let mut o = from_lines(&lines);
    o.pass &= flagged == 14;
    o.detail = format!("{}; {flagged}/14 perturbations flagged", o.detail);
    o
}

// rel_error divides by max(|x|, |y|, 1), so records whose sides are below
// 1 in modulus show less than epsilon. The report-level max_rel_error is
// the value held to the band; records with both sides >= 1 must also land
// in it, and every record must fail.
fn c8(ctx: &NumericContext) -> Outcome {
    let band = 1e-11..=1e-9;
    let mut pass = true;
    let mut parts = Vec::new();
    for side in [Side::Lhs, Side::Rhs] {
        let cfg = SampleConfig { seed: SEED, trials: 10, fault: Some(Fault { side, epsilon: 1e-10 }), ..SampleConfig::default() };
        let r = verify_identity("S1", &cfg, ctx).expect("S1 runs");
        let max = r.max_rel_error.unwrap_or(f64::NAN);
        let all_fail = !r.trials.is_empty() && r.trials.iter().all(|t| !t.pass && t.rel_error.is_some());
        let large: Vec<f64> = r.trials.iter().filter(|t| t.lhs_abs.unwrap_or(0.0) >= 1.0 && t.rhs_abs.unwrap_or(0.0) >= 1.0).filter_map(|t| t.rel_error).collect();
        let large_ok = !large.is_empty() && large.iter().all(|e| band.contains(e));
        let ok = r.verdict == Verdict::Fail && band.contains(&max) && all_fail && large_ok;
        pass &= ok;
        parts.push(format!("{side}: {} max_rel_error {max:.3e}, {} records with |sides| >= 1 in band={large_ok}", r.verdict, large.len()));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c9(_: &NumericContext) -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_ellverify"))
            .args(["verify-all", "--seed", "42", "--out"])
            .arg(&out)
            .env_remove("ELLVERIFY_PREC")
            .output()
            .expect("binary runs")
            .status;
        (status.code(), fs::read(&out).unwrap_or_default())
    };
    let (c1, a) = run("first.json");
    let (c2, b) = run("second.json");
    Outcome {
        pass: !a.is_empty() && a == b,
        detail: format!("exit codes {c1:?} {c2:?}, {} and {} bytes, identical={}", a.len(), b.len(), a == b),
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let ctx = NumericContext::new(256).expect("context");
    let criteria: [Criterion; 9] = [
        ("1 theta kernel identities", Duration::from_secs(5), c1),
        ("2 matrix inverse pairs", Duration::from_secs(30), c2),
        ("3 expansion lemma", Duration::from_secs(30), c3),
        ("4 expansions E1-E4", Duration::from_secs(120), c4),
        ("5 summations and transformations", Duration::from_secs(300), c5),
        ("6 p=0 specializations and limits", Duration::from_secs(60), c6),
        ("7 balancing linter", Duration::from_secs(10), c7),
        ("8 fault injection on S1", Duration::from_secs(10), c8),
        ("9 verify-all reproducible", Duration::MAX, c9),
    ];
    let mut all = true;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let o = run(&ctx);
        let took = start.elapsed();
        let in_time = took < budget;
        let pass = o.pass && in_time;
        all &= pass;
        let limit = if budget == Duration::MAX { String::new() } else { format!(" (limit {}s)", budget.as_secs()) };
        let late = if in_time { "" } else { "; over time budget" };
        println!("{}  criterion {name}  {:.2}s{limit}  {}{late}", if pass { "PASS" } else { "FAIL" }, took.as_secs_f64(), o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
