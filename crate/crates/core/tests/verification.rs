use ellverify_core::registry::{list_identities, lookup, Kind, Variant};
use ellverify_core::verifier::{verify_all, verify_identity, verify_many, SampleConfig, Verdict};
use ellverify_core::{report, Error, NumericContext};

fn small(seed: u64) -> SampleConfig {
    SampleConfig { seed, trials: 2, n_range: (0, 4), ..SampleConfig::default() }
}

#[test]
fn catalog_has_twenty_one_entries() {
    let l = list_identities();
    assert_eq!(l.len(), 21);
    let count = |k: Kind| l.iter().filter(|x| x.kind == k).count();
    assert_eq!((count(Kind::Summation), count(Kind::Expansion), count(Kind::Transformation), count(Kind::SpecialP0)), (6, 4, 8, 3));
    assert!(matches!(lookup("X9"), Err(Error::UnknownIdentity(_))));
}

#[test]
fn every_identity_passes_a_short_run() {
    let ctx = NumericContext::default();
    let s = verify_all(&small(11), &ctx).unwrap();
    assert_eq!(s.verdict, Verdict::Pass, "{}", report::summary_json(&s));
    assert_eq!((s.passed, s.failed, s.inconclusive), (21, 0, 0));
    for r in &s.reports {
        let expect = if r.identity_id == "S1" { Variant::Corrected } else { Variant::Literal };
        assert_eq!(r.variant_used, expect, "{}", r.identity_id);
        assert!(r.max_rel_error.unwrap() < 1e-30);
    }
}

#[test]
fn runs_are_deterministic_and_seed_dependent() {
    let ctx = NumericContext::default();
    let ids = vec!["T6".to_string(), "E4".to_string()];
    let a = report::summary_json(&verify_many(&ids, &small(3), &ctx).unwrap());
    let b = report::summary_json(&verify_many(&ids, &small(3), &ctx).unwrap());
    let c = report::summary_json(&verify_many(&ids, &small(4), &ctx).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn more_bits_shrink_the_error() {
    let cfg = small(5);
    let lo = verify_identity("S4", &cfg, &NumericContext::new(128).unwrap().with_rel_tolerance(1e-20).unwrap()).unwrap();
    let hi = verify_identity("S4", &cfg, &NumericContext::new(512).unwrap()).unwrap();
    assert_eq!(lo.verdict, Verdict::Pass);
    assert_eq!(hi.verdict, Verdict::Pass);
    assert!(hi.max_rel_error.unwrap() < lo.max_rel_error.unwrap() * 1e-50);
}

#[test]
fn tolerance_below_precision_fails() {
    let ctx = NumericContext::new(64).unwrap().with_rel_tolerance(1e-40).unwrap();
    let r = verify_identity("T3", &SampleConfig { n_range: (2, 4), ..small(1) }, &ctx).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
}
