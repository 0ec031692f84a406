//! `ellverify`: list, verify and lint the registered identities.
//!
//! Exit status: 0 when every requested check passes, 1 on any failure,
//! 2 when a run is inconclusive, 64 on a usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use ellverify_core::checks::{self, CheckLine};
use ellverify_core::registry::{list_identities, lookup};
use ellverify_core::report;
use ellverify_core::verifier::{verify_many, SampleConfig, SuiteSummary, Verdict};
use ellverify_core::NumericContext;

// Writes to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! eout {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stderr().lock(), $($t)*);
    }};
}

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "ellverify", version, about = "High-precision verifier for elliptic hypergeometric identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the identity catalog.
    List,
    /// Verify the identities given with --id.
    Verify(RunArgs),
    /// Verify every registered identity.
    VerifyAll(RunArgs),
    /// Inverse residuals of the (F, G) and (B, B^-1) pairs, and the M/B cross-ratio.
    CheckMatrices(RunArgs),
    /// The expansion lemma on random triangular pairs, the E1 lemma route and the M-factor remarks.
    CheckLemma(RunArgs),
    /// Balancing and ellipticity of every summation and transformation.
    Lint(RunArgs),
    /// p -> 0 consistency of P1-P3 with T3 and the P1 -> P2 chain.
    LimitCheck(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Identity id; repeatable.
    #[arg(long = "id")]
    ids: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random draws (verify: trials per identity).
    #[arg(long)]
    trials: Option<usize>,
    /// Inclusive order range `lo..hi`.
    #[arg(long = "n", value_parser = parse_orders, default_value = "0..8")]
    n: (usize, usize),
    /// Working precision in bits.
    #[arg(long, env = "ELLVERIFY_PREC", default_value_t = NumericContext::DEFAULT_PRECISION)]
    prec: u32,
    /// Relative tolerance of the both-sides comparison.
    #[arg(long, default_value_t = NumericContext::DEFAULT_REL_TOLERANCE)]
    tol: f64,
    /// Nome modulus band `lo..hi`.
    #[arg(long, value_parser = parse_band, default_value = "0.05..0.3")]
    nome: (f64, f64),
    /// Report file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::ReportDoc)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    ReportDoc,
    Table,
}

fn split_range(s: &str) -> Result<(&str, &str), String> {
    s.split_once("..").ok_or_else(|| format!("expected `lo..hi`, got `{s}`"))
}

fn parse_orders(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = split_range(s)?;
    let lo: usize = a.trim().parse().map_err(|e| format!("bad lower order `{a}`: {e}"))?;
    let hi: usize = b.trim().parse().map_err(|e| format!("bad upper order `{b}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = split_range(s)?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("bad lower bound `{a}`: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("bad upper bound `{b}`: {e}"))?;
    if !(0.0 < lo && lo <= hi && hi < 1.0) {
        return Err(format!("band {lo}..{hi} must lie in (0, 1)"));
    }
    Ok((lo, hi))
}

struct Usage(String);

fn context(a: &RunArgs) -> Result<NumericContext, Usage> {
    NumericContext::new(a.prec)
        .and_then(|c| c.with_rel_tolerance(a.tol))
        .map_err(|e| Usage(format!("--prec/--tol: {e}")))
}

fn sample_config(a: &RunArgs) -> Result<SampleConfig, Usage> {
    let cfg = SampleConfig {
        seed: a.seed,
        trials: a.trials.unwrap_or(SampleConfig::default().trials),
        n_range: a.n,
        nome_band: a.nome,
        ..SampleConfig::default()
    };
    cfg.validate().map_err(|e| Usage(format!("--trials/--n/--nome: {e}")))?;
    Ok(cfg)
}

fn write_out(a: &RunArgs, body: &str) -> Result<(), String> {
    if let Some(path) = &a.out {
        fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn run_verify(a: &RunArgs, all: bool) -> Result<u8, Usage> {
    if !all && a.ids.is_empty() {
        return Err(Usage("verify needs at least one --id".into()));
    }
    if all && !a.ids.is_empty() {
        return Err(Usage("--id is not accepted by verify-all".into()));
    }
    for id in &a.ids {
        lookup(id).map_err(|_| Usage(format!("--id: unknown identity `{id}`")))?;
    }
    let ctx = context(a)?;
    let cfg = sample_config(a)?;
    let summary: SuiteSummary = match verify_many(&a.ids, &cfg, &ctx) {
        Ok(s) => s,
        Err(e) => {
            eout!("error: {e}");
            return Ok(EXIT_FAIL);
        }
    };
    for r in &summary.reports {
        let err = r.max_rel_error.map(|e| format!("{e:.3e}")).unwrap_or_else(|| "-".into());
        out!(
            "{}  {}  variant={}  max_rel_error={}  records={}  resamples={}",
            r.identity_id,
            r.verdict,
            r.variant_used,
            err,
            r.trials.len(),
            r.resample_count
        );
    }
    out!("{}  passed={} failed={} inconclusive={}", summary.verdict, summary.passed, summary.failed, summary.inconclusive);
    let body = match a.format {
        Format::ReportDoc => report::summary_json(&summary) + "\n",
        Format::Table => report::table(&summary.reports),
    };
    if let Err(e) = write_out(a, &body) {
        eout!("error: {e}");
        return Ok(EXIT_FAIL);
    }
    Ok(verdict_code(summary.verdict))
}

fn run_checks(a: &RunArgs, suite: impl FnOnce(&RunArgs, &NumericContext) -> ellverify_core::Result<Vec<CheckLine>>) -> Result<u8, Usage> {
    if !a.ids.is_empty() {
        return Err(Usage("--id is only accepted by verify".into()));
    }
    let ctx = context(a)?;
    let lines = match suite(a, &ctx) {
        Ok(l) => l,
        Err(e) => {
            eout!("error: {e}");
            return Ok(EXIT_FAIL);
        }
    };
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        out!("{tag}  {}  {:.3e} < {:.1e}  {}", l.name, l.value, l.threshold, l.detail);
    }
    let body = match a.format {
        Format::ReportDoc => serde_json::to_string_pretty(&lines).expect("check lines serialize") + "\n",
        Format::Table => {
            let mut s = String::from("name,value,threshold,pass\n");
            for l in &lines {
                s += &format!("{},{:e},{:e},{}\n", l.name, l.value, l.threshold, l.pass);
            }
            s
        }
    };
    if let Err(e) = write_out(a, &body) {
        eout!("error: {e}");
        return Ok(EXIT_FAIL);
    }
    Ok(if checks::all_pass(&lines) { 0 } else { EXIT_FAIL })
}

fn run(cli: Cli) -> Result<u8, Usage> {
    match cli.command {
        Command::List => {
            for l in list_identities() {
                out!("{}  {}  {}  {}", l.id, l.kind, l.title, l.anchor);
            }
            Ok(0)
        }
        Command::Verify(a) => run_verify(&a, false),
        Command::VerifyAll(a) => run_verify(&a, true),
        Command::CheckMatrices(a) => run_checks(&a, |a, c| checks::matrix_suite(a.seed, a.trials.unwrap_or(50), c)),
        Command::CheckLemma(a) => run_checks(&a, |a, c| {
            let mut lines = checks::lemma_suite(a.seed, a.trials.unwrap_or(100), c)?;
            lines.extend(checks::expansion_suite(a.seed, 3, c)?);
            Ok(lines)
        }),
        Command::Lint(a) => run_checks(&a, |a, c| checks::lint_suite(a.seed, c)),
        Command::LimitCheck(a) => run_checks(&a, |a, c| checks::limit_suite(a.seed, c)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eout!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
