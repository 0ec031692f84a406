//! Random-sampling verification over the registry.
//!
//! Every trial owns a ChaCha8 stream keyed by `(seed, identity, trial)`, so
//! reports do not depend on how trials or identities are scheduled.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::SequenceInput;
use crate::numerics::{rel_error, CValue, NumericContext};
use crate::registry::{lookup, registry, IdentitySpec, Params, Side, SlotRole, Variant};

/// Sampling policy of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub trials: usize,
    /// Inclusive order interval.
    pub n_range: (usize, usize),
    pub modulus_band: (f64, f64),
    pub nome_band: (f64, f64),
    /// Modulus band of the random sequences fed to expansions.
    pub sequence_band: (f64, f64),
    pub max_resamples: usize,
    /// Multiply one side by `1 + epsilon` (self-test of the detector).
    pub fault: Option<Fault>,
    /// Orders above an identity's default order are skipped.
    pub clamp_to_default_order: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fault {
    pub side: Side,
    pub epsilon: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            trials: 50,
            n_range: (0, 8),
            modulus_band: (0.5, 2.0),
            nome_band: (0.05, 0.3),
            sequence_band: (0.25, 1.0),
            max_resamples: 200,
            fault: None,
            clamp_to_default_order: true,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_range.0 > self.n_range.1 {
            return bad(format!("empty order range {}..{}", self.n_range.0, self.n_range.1));
        }
        let (lo, hi) = self.modulus_band;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi) {
            return bad(format!("modulus band [{lo}, {hi}] must lie in (0, inf)"));
        }
        let (lo, hi) = self.nome_band;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return bad(format!("nome band [{lo}, {hi}] must lie in (0, 1)"));
        }
        let (lo, hi) = self.sequence_band;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi) {
            return bad(format!("sequence band [{lo}, {hi}] must lie in (0, inf)"));
        }
        if self.max_resamples == 0 {
            return bad("max_resamples must be at least 1".into());
        }
        if let Some(f) = self.fault {
            if !f.epsilon.is_finite() {
                return bad("fault epsilon must be finite".into());
            }
        }
        Ok(())
    }

    /// Orders actually checked for `spec`.
    pub fn orders_for(&self, spec: &IdentitySpec) -> std::ops::RangeInclusive<usize> {
        let hi = if self.clamp_to_default_order { self.n_range.1.min(spec.default_order) } else { self.n_range.1 };
        self.n_range.0..=hi.max(self.n_range.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Settings echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub trials: usize,
    pub n_range: (usize, usize),
    pub modulus_band: (f64, f64),
    pub nome_band: (f64, f64),
    pub sequence_band: (f64, f64),
    pub max_resamples: usize,
    pub fault: Option<Fault>,
    pub precision_bits: u32,
    pub rel_tolerance: f64,
    pub theta_epsilon: f64,
    pub pole_delta: f64,
}

impl ConfigEcho {
    pub fn new(cfg: &SampleConfig, ctx: &NumericContext) -> Self {
        ConfigEcho {
            seed: cfg.seed,
            trials: cfg.trials,
            n_range: cfg.n_range,
            modulus_band: cfg.modulus_band,
            nome_band: cfg.nome_band,
            sequence_band: cfg.sequence_band,
            max_resamples: cfg.max_resamples,
            fault: cfg.fault,
            precision_bits: ctx.precision_bits(),
            rel_tolerance: ctx.rel_tolerance(),
            theta_epsilon: ctx.theta_epsilon(),
            pole_delta: ctx.pole_delta(),
        }
    }
}

/// One `(trial, n)` comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Parameter values as `[re, im]`, rounded to double precision.
    pub params: BTreeMap<String, [f64; 2]>,
    pub n: usize,
    pub lhs_abs: Option<f64>,
    pub rhs_abs: Option<f64>,
    pub rel_error: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

/// Outcome of one variant over all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub max_rel_error: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity_id: String,
    pub config: ConfigEcho,
    pub variant_used: Variant,
    pub verdict: Verdict,
    pub max_rel_error: Option<f64>,
    pub resample_count: usize,
    /// Trials that ran out of resamples.
    pub exhausted_trials: Vec<usize>,
    pub variants_tried: Vec<VariantSummary>,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub config: ConfigEcho,
    pub verdict: Verdict,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub reports: Vec<VerificationReport>,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The random stream of one trial: the master seed selects the key, the
/// identity selects the stream and the trial a disjoint block of it.
pub fn trial_rng(seed: u64, id: &str, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(id));
    rng.set_word_pos((trial as u128) << 48);
    rng
}

fn polar(rng: &mut ChaCha8Rng, band: (f64, f64), ctx: &NumericContext) -> CValue {
    let m = if band.0 == band.1 { band.0 } else { rng.gen_range(band.0..band.1) };
    let t = rng.gen_range(0.0..TAU);
    ctx.from_polar(m, t)
}

fn draw(spec: &IdentitySpec, rng: &mut ChaCha8Rng, cfg: &SampleConfig, ctx: &NumericContext) -> Params {
    spec.param_slots
        .iter()
        .map(|s| {
            let band = match s.role {
                SlotRole::Generic => cfg.modulus_band,
                SlotRole::Nome => cfg.nome_band,
            };
            (s.name.to_string(), polar(rng, band, ctx))
        })
        .collect()
}

/// Draws parameters until `accept` holds, at most `max_resamples + 1`
/// times. Returns the accepted point and the number of rejections.
pub fn sample_params_with(
    spec: &IdentitySpec,
    rng: &mut ChaCha8Rng,
    cfg: &SampleConfig,
    ctx: &NumericContext,
    mut accept: impl FnMut(&Params) -> bool,
) -> Result<(Params, usize)> {
    cfg.validate()?;
    for rejected in 0..=cfg.max_resamples {
        let p = draw(spec, rng, cfg, ctx);
        if accept(&p) {
            return Ok((p, rejected));
        }
    }
    Err(Error::ResampleExhausted { attempts: cfg.max_resamples + 1 })
}

/// Draws an admissible point: every side of every variant evaluates at
/// every order of the run and no denominator theta factor is smaller than
/// `pole_delta`.
pub fn sample_params(spec: &IdentitySpec, rng: &mut ChaCha8Rng, cfg: &SampleConfig, ctx: &NumericContext) -> Result<Params> {
    let orders = cfg.orders_for(spec);
    let len = *orders.end() + 1;
    let seq = SequenceInput::new(vec![ctx.one(); len]);
    sample_params_with(spec, rng, cfg, ctx, |p| matches!(evaluate_point(spec, p, spec.sequence_slot.then_some(&seq), orders.clone(), ctx), Ok(Some(_))))
        .map(|(p, _)| p)
}

type PointValues = Vec<(Variant, usize, CValue, CValue)>;

/// Evaluates every variant, order and side at one point. `Ok(None)` means
/// the point is inadmissible; other errors are genuine evaluation failures.
fn evaluate_point(
    spec: &IdentitySpec,
    params: &Params,
    seq: Option<&SequenceInput>,
    orders: std::ops::RangeInclusive<usize>,
    ctx: &NumericContext,
) -> Result<Option<PointValues>> {
    let bound = match spec.bind(params, ctx) {
        Ok(b) => b,
        Err(Error::Domain(_)) | Err(Error::DivisionByZero(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for &variant in spec.variants {
        for n in orders.clone() {
            let mut vals = Vec::with_capacity(2);
            for side in [Side::Lhs, Side::Rhs] {
                match bound.side(variant, n, side, seq) {
                    Ok(v) => vals.push(v),
                    Err(Error::Domain(_)) | Err(Error::DivisionByZero(_)) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            let r = vals.pop().expect("two sides");
            let l = vals.pop().expect("two sides");
            out.push((variant, n, l, r));
        }
    }
    if bound.min_denominator() < ctx.pole_delta() {
        return Ok(None);
    }
    Ok(Some(out))
}

/// What one trial produced.
enum TrialOutcome {
    Done { resamples: usize, params: Params, values: PointValues },
    Failed { resamples: usize, params: Params, error: String },
    Exhausted { resamples: usize },
}

fn run_trial(spec: &IdentitySpec, trial: usize, cfg: &SampleConfig, ctx: &NumericContext) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, spec.id, trial);
    let orders = cfg.orders_for(spec);
    let len = *orders.end() + 1;
    for rejected in 0..=cfg.max_resamples {
        let params = draw(spec, &mut rng, cfg, ctx);
        let seq = spec.sequence_slot.then(|| SequenceInput::new((0..len).map(|_| polar(&mut rng, cfg.sequence_band, ctx)).collect()));
        match evaluate_point(spec, &params, seq.as_ref(), orders.clone(), ctx) {
            Ok(Some(values)) => return TrialOutcome::Done { resamples: rejected, params, values },
            Ok(None) => continue,
            Err(e) => return TrialOutcome::Failed { resamples: rejected, params, error: e.to_string() },
        }
    }
    TrialOutcome::Exhausted { resamples: cfg.max_resamples + 1 }
}

fn echo_params(p: &Params) -> BTreeMap<String, [f64; 2]> {
    p.iter()
        .map(|(k, v)| {
            let (re, im) = v.to_f64_pair();
            (k.clone(), [re, im])
        })
        .collect()
}

fn records_for(variant: Variant, outcomes: &[TrialOutcome], cfg: &SampleConfig, ctx: &NumericContext) -> Vec<TrialRecord> {
    let mut out = Vec::new();
    for (trial, o) in outcomes.iter().enumerate() {
        match o {
            TrialOutcome::Done { params, values, .. } => {
                let echo = echo_params(params);
                for (_, n, l, r) in values.iter().filter(|x| x.0 == variant) {
                    let (l, r) = match cfg.fault {
                        Some(Fault { side: Side::Lhs, epsilon }) => (l * &ctx.real(1.0 + epsilon), r.clone()),
                        Some(Fault { side: Side::Rhs, epsilon }) => (l.clone(), r * &ctx.real(1.0 + epsilon)),
                        None => (l.clone(), r.clone()),
                    };
                    let err = rel_error(&l, &r);
                    out.push(TrialRecord {
                        trial,
                        params: echo.clone(),
                        n: *n,
                        lhs_abs: Some(l.abs_f64()),
                        rhs_abs: Some(r.abs_f64()),
                        rel_error: Some(err),
                        pass: err < ctx.rel_tolerance(),
                        error: None,
                    });
                }
            }
            TrialOutcome::Failed { params, error, .. } => out.push(TrialRecord {
                trial,
                params: echo_params(params),
                n: cfg.n_range.0,
                lhs_abs: None,
                rhs_abs: None,
                rel_error: None,
                pass: false,
                error: Some(error.clone()),
            }),
            TrialOutcome::Exhausted { .. } => {}
        }
    }
    out
}

fn verdict_of(records: &[TrialRecord], exhausted: bool) -> Verdict {
    if records.iter().any(|r| !r.pass) {
        Verdict::Fail
    } else if exhausted {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

fn max_error(records: &[TrialRecord]) -> Option<f64> {
    records.iter().filter_map(|r| r.rel_error).fold(None, |m, e| Some(m.map_or(e, |m: f64| m.max(e))))
}

/// Verifies one identity. Variants are tried in catalog order; the first
/// one that passes is reported, otherwise the last one tried.
pub fn verify_identity(id: &str, cfg: &SampleConfig, ctx: &NumericContext) -> Result<VerificationReport> {
    cfg.validate()?;
    let spec = lookup(id)?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials).into_par_iter().map(|t| run_trial(spec, t, cfg, ctx)).collect();
    let resample_count = outcomes
        .iter()
        .map(|o| match o {
            TrialOutcome::Done { resamples, .. } | TrialOutcome::Failed { resamples, .. } | TrialOutcome::Exhausted { resamples } => *resamples,
        })
        .sum();
    let exhausted_trials: Vec<usize> =
        outcomes.iter().enumerate().filter(|(_, o)| matches!(o, TrialOutcome::Exhausted { .. })).map(|(i, _)| i).collect();

    let mut tried = Vec::new();
    let mut chosen = None;
    for &variant in spec.variants {
        let records = records_for(variant, &outcomes, cfg, ctx);
        let verdict = verdict_of(&records, !exhausted_trials.is_empty());
        tried.push(VariantSummary { variant, max_rel_error: max_error(&records), verdict });
        let pass = verdict == Verdict::Pass;
        chosen = Some((variant, verdict, records));
        if pass {
            break;
        }
    }
    let (variant_used, verdict, trials) = chosen.expect("every identity has a variant");
    Ok(VerificationReport {
        identity_id: spec.id.to_string(),
        config: ConfigEcho::new(cfg, ctx),
        variant_used,
        verdict,
        max_rel_error: max_error(&trials),
        resample_count,
        exhausted_trials,
        variants_tried: tried,
        trials,
    })
}

/// Verifies the given identities (all of them when `ids` is empty)
/// concurrently; reports come back in catalog order.
pub fn verify_many(ids: &[String], cfg: &SampleConfig, ctx: &NumericContext) -> Result<SuiteSummary> {
    cfg.validate()?;
    let specs: Vec<&IdentitySpec> = if ids.is_empty() {
        registry().iter().collect()
    } else {
        let mut v = ids.iter().map(|i| lookup(i)).collect::<Result<Vec<_>>>()?;
        v.sort_by_key(|s| registry().iter().position(|r| r.id == s.id));
        v.dedup_by_key(|s| s.id);
        v
    };
    let reports = specs.par_iter().map(|s| verify_identity(s.id, cfg, ctx)).collect::<Result<Vec<_>>>()?;
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let (passed, failed, inconclusive) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Inconclusive));
    let verdict = if failed > 0 {
        Verdict::Fail
    } else if inconclusive > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(SuiteSummary { config: ConfigEcho::new(cfg, ctx), verdict, passed, failed, inconclusive, reports })
}

/// The whole registry.
pub fn verify_all(cfg: &SampleConfig, ctx: &NumericContext) -> Result<SuiteSummary> {
    verify_many(&[], cfg, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(seed: u64) -> SampleConfig {
        SampleConfig { seed, trials: 2, n_range: (0, 3), ..SampleConfig::default() }
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, "S1", 3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(7, "S1", 3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(trial_rng(7, "S1", 3).gen::<u64>(), trial_rng(7, "S1", 4).gen::<u64>());
        assert_ne!(trial_rng(7, "S1", 3).gen::<u64>(), trial_rng(7, "S2", 3).gen::<u64>());
        assert_ne!(trial_rng(7, "S1", 3).gen::<u64>(), trial_rng(8, "S1", 3).gen::<u64>());
    }

    #[test]
    fn rejecting_predicate_exhausts() {
        let ctx = NumericContext::default();
        let cfg = SampleConfig { max_resamples: 5, ..quick(1) };
        let mut rng = trial_rng(1, "S1", 0);
        let r = sample_params_with(lookup("S1").unwrap(), &mut rng, &cfg, &ctx, |_| false);
        assert_eq!(r.unwrap_err(), Error::ResampleExhausted { attempts: 6 });
    }

    #[test]
    fn sampled_point_is_admissible() {
        let ctx = NumericContext::default();
        let cfg = SampleConfig { n_range: (0, 8), ..quick(42) };
        let spec = lookup("S1").unwrap();
        let p = sample_params(spec, &mut trial_rng(42, "S1", 0), &cfg, &ctx).unwrap();
        assert!(spec.pole_predicate(&p, 8, &ctx).unwrap());
        for (k, v) in &p {
            let m = v.abs_f64();
            let band = if k == "p" { cfg.nome_band } else { cfg.modulus_band };
            assert!(band.0 - 1e-12 <= m && m <= band.1 + 1e-12, "{k}: {m}");
        }
    }

    #[test]
    fn s1_reports_corrected_variant() {
        let ctx = NumericContext::default();
        let r = verify_identity("S1", &quick(3), &ctx).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.variant_used, Variant::Corrected);
        assert_eq!(r.variants_tried[0].verdict, Verdict::Fail);
        assert_eq!(r.trials.len(), 2 * 4);
    }

    #[test]
    fn fault_is_detected() {
        let ctx = NumericContext::default();
        let cfg = SampleConfig { fault: Some(Fault { side: Side::Rhs, epsilon: 1e-10 }), ..quick(5) };
        let r = verify_identity("S2", &cfg, &ctx).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let e = r.max_rel_error.unwrap();
        assert!((1e-11..1e-9).contains(&e), "{e}");
    }

    #[test]
    fn invalid_configs() {
        let ctx = NumericContext::default();
        for cfg in [
            SampleConfig { trials: 0, ..quick(0) },
            SampleConfig { nome_band: (0.5, 1.0), ..quick(0) },
            SampleConfig { modulus_band: (0.0, 1.0), ..quick(0) },
            SampleConfig { n_range: (3, 2), ..quick(0) },
        ] {
            assert!(matches!(verify_identity("S2", &cfg, &ctx), Err(Error::InvalidConfig(_))));
        }
        assert!(matches!(verify_identity("X9", &quick(0), &ctx), Err(Error::UnknownIdentity(_))));
    }
}
