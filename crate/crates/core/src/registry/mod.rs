//! The catalog of identities: summations S1–S6, expansions E1–E4,
//! transformations T1–T8 and the `p = 0` specializations P1–P3.
//!
//! Every identity is a pair of side evaluators over named parameters. The
//! ids are a stable public contract used by the CLI and the reports.

mod limits;
mod specials;
mod summations;
mod transformations;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{self, ExpansionId, SequenceInput};
use crate::numerics::{CValue, NumericContext};
use crate::series::{balance_report, BalanceReport, Term};
use crate::theta::{Coeff, Kernel};

pub use limits::{limit_consistency, p1_p2_chain};

/// Named parameter values. `q` and `p` are ordinary entries.
pub type Params = BTreeMap<String, CValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Summation,
    Expansion,
    Transformation,
    SpecialP0,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Summation => "summation",
            Kind::Expansion => "expansion",
            Kind::Transformation => "transformation",
            Kind::SpecialP0 => "special-p0",
        })
    }
}

/// Which reading of a formula to evaluate. Identities with a suspected
/// misprint carry both the formula as displayed and a repaired one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Literal,
    Corrected,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Literal => "literal",
            Variant::Corrected => "corrected",
        })
    }
}

/// How a slot is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotRole {
    /// Nonzero complex parameter, modulus in the sampler's modulus band.
    Generic,
    /// Elliptic nome, modulus in the sampler's nome band.
    Nome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSlot {
    pub name: &'static str,
    pub role: SlotRole,
}

const fn g(name: &'static str) -> ParamSlot {
    ParamSlot { name, role: SlotRole::Generic }
}

const NOME: ParamSlot = ParamSlot { name: "p", role: SlotRole::Nome };

/// One side as `prefactor(at) · ∑_{j=0}^{n} sum(j)`, where `at` is
/// normally the order `n`. A side without a sum is a closed product;
/// `vanishes` marks an indicator factor equal to zero.
pub struct SideForm {
    pub prefactor: Term,
    pub at: usize,
    pub sum: Option<Term>,
    pub vanishes: bool,
}

impl SideForm {
    fn product(prefactor: Term, at: usize) -> Self {
        SideForm { prefactor, at, sum: None, vanishes: false }
    }

    fn sum(prefactor: Term, sum: Term, n: usize) -> Self {
        SideForm { prefactor, at: n, sum: Some(sum), vanishes: false }
    }

    fn zero() -> Self {
        SideForm { prefactor: Term::new(), at: 0, sum: None, vanishes: true }
    }

    fn eval(&self, k: &Kernel, n: usize) -> Result<CValue> {
        if self.vanishes {
            return Ok(k.ctx().zero());
        }
        let pre = self.prefactor.eval(k, self.at)?;
        match &self.sum {
            Some(t) => Ok(&pre * &t.sum(k, n)?),
            None => Ok(pre),
        }
    }
}

type FormFn = fn(&Env, Variant, usize, Side) -> Result<SideForm>;

#[derive(Clone, Copy)]
enum Evaluator {
    Form(FormFn),
    Expansion(ExpansionId),
}

/// A registered identity.
#[derive(Clone)]
pub struct IdentitySpec {
    pub id: &'static str,
    pub title: &'static str,
    pub anchor: &'static str,
    pub kind: Kind,
    pub param_slots: &'static [ParamSlot],
    pub sequence_slot: bool,
    /// `(i, j)` means factorials with base `q^i` and nome `p^j` occur.
    pub base_nome_usage: &'static [(u32, u32)],
    /// Variants in the order the verifier tries them.
    pub variants: &'static [Variant],
    /// Largest order of the both-sides checks.
    pub default_order: usize,
    evaluator: Evaluator,
}

impl fmt::Debug for IdentitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentitySpec").field("id", &self.id).field("kind", &self.kind).finish()
    }
}

/// Parameters bound to a theta kernel for one evaluation point.
pub struct Env<'a> {
    kernel: Kernel,
    params: &'a Params,
    one: Coeff,
}

impl<'a> Env<'a> {
    pub fn new(params: &'a Params, q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<Self> {
        let kernel = Kernel::new(q, p, ctx)?;
        let one = kernel.coeff(&ctx.one())?;
        Ok(Env { kernel, params, one })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn ctx(&self) -> &NumericContext {
        self.kernel.ctx()
    }

    /// Value of the named slot.
    pub fn v(&self, name: &str) -> Result<CValue> {
        self.params
            .get(name)
            .map(|v| v.with_prec(self.ctx().precision_bits()))
            .ok_or_else(|| Error::Arity(format!("missing parameter `{name}`")))
    }

    pub fn q(&self) -> &CValue {
        self.kernel.q()
    }

    pub fn p(&self) -> &CValue {
        self.kernel.p()
    }

    /// Interned coefficient.
    pub fn c(&self, v: &CValue) -> Result<Coeff> {
        self.kernel.coeff(v)
    }

    pub fn one(&self) -> Coeff {
        self.one
    }

    /// `∏ num / ∏ den`.
    pub fn r(&self, num: &[&CValue], den: &[&CValue]) -> CValue {
        let prec = self.ctx().precision_bits();
        let mut x = CValue::one(prec);
        for v in num {
            x *= *v;
        }
        let mut y = CValue::one(prec);
        for v in den {
            y *= *v;
        }
        &x / &y
    }

    /// Interned `∏ num / ∏ den`.
    pub fn cr(&self, num: &[&CValue], den: &[&CValue]) -> Result<Coeff> {
        self.c(&self.r(num, den))
    }

    /// The value `-1`.
    pub fn m1(&self) -> CValue {
        -self.ctx().one()
    }
}

impl IdentitySpec {
    pub fn has_nome(&self) -> bool {
        self.param_slots.iter().any(|s| s.role == SlotRole::Nome)
    }

    pub fn has_variant(&self, v: Variant) -> bool {
        self.variants.contains(&v)
    }

    /// Base and nome of the theta kernel for `params`.
    fn base_nome(&self, params: &Params, ctx: &NumericContext) -> Result<(CValue, CValue)> {
        let get = |n: &str| params.get(n).cloned().ok_or_else(|| Error::Arity(format!("{}: missing parameter `{n}`", self.id)));
        let q = if self.param_slots.iter().any(|s| s.name == "gamma") {
            let gm = get("gamma")?;
            &gm * &gm
        } else {
            get("q")?
        };
        let p = if self.has_nome() { get("p")? } else { ctx.zero() };
        Ok((q, p))
    }

    fn check_arity(&self, params: &Params, seq: Option<&SequenceInput>) -> Result<()> {
        for slot in self.param_slots {
            if !params.contains_key(slot.name) {
                return Err(Error::Arity(format!("{}: missing parameter `{}`", self.id, slot.name)));
            }
        }
        if let Some(extra) = params.keys().find(|k| !self.param_slots.iter().any(|s| s.name == k.as_str())) {
            return Err(Error::Arity(format!("{}: unexpected parameter `{extra}`", self.id)));
        }
        match (self.sequence_slot, seq) {
            (true, None) => Err(Error::Arity(format!("{} needs a sequence argument", self.id))),
            (false, Some(_)) => Err(Error::Arity(format!("{} takes no sequence argument", self.id))),
            _ => Ok(()),
        }
    }

    /// Binds `params` to a fresh kernel. The returned evaluator can be
    /// reused for every order and side at this parameter point, sharing
    /// theta values between them.
    pub fn bind<'a>(&'a self, params: &'a Params, ctx: &NumericContext) -> Result<Bound<'a>> {
        let (q, p) = self.base_nome(params, ctx)?;
        Ok(Bound { spec: self, env: Env::new(params, &q, &p, ctx)? })
    }

    /// Admissibility of `params` at order `n`: every denominator theta
    /// factor on either side has modulus at least `pole_delta`.
    pub fn pole_predicate(&self, params: &Params, n: usize, ctx: &NumericContext) -> Result<bool> {
        let b = self.bind(params, ctx)?;
        let ones = SequenceInput::new(vec![ctx.one(); n + 1]);
        let seq = self.sequence_slot.then_some(&ones);
        for variant in self.variants {
            for side in [Side::Lhs, Side::Rhs] {
                if b.side(*variant, n, side, seq).is_err() {
                    return Ok(false);
                }
            }
        }
        Ok(b.min_denominator() >= ctx.pole_delta())
    }
}

/// An identity bound to one parameter point.
pub struct Bound<'a> {
    spec: &'a IdentitySpec,
    env: Env<'a>,
}

impl Bound<'_> {
    pub fn env(&self) -> &Env<'_> {
        &self.env
    }

    pub fn side(&self, variant: Variant, n: usize, side: Side, seq: Option<&SequenceInput>) -> Result<CValue> {
        if !self.spec.has_variant(variant) {
            return Err(Error::Evaluation(format!("{} has no {variant} variant", self.spec.id)));
        }
        match self.spec.evaluator {
            Evaluator::Form(f) => f(&self.env, variant, n, side)?.eval(&self.env.kernel, n),
            Evaluator::Expansion(id) => {
                let seq = seq.ok_or_else(|| Error::Arity(format!("{} needs a sequence argument", self.spec.id)))?;
                expansion::expansion_side_in(&self.env, id, seq, n, side)
            }
        }
    }

    /// The side's declarative form, for identities that have one.
    pub fn form(&self, variant: Variant, n: usize, side: Side) -> Result<Option<SideForm>> {
        match self.spec.evaluator {
            Evaluator::Form(f) => Ok(Some(f(&self.env, variant, n, side)?)),
            Evaluator::Expansion(_) => Ok(None),
        }
    }

    pub fn min_denominator(&self) -> f64 {
        self.env.kernel.min_denominator()
    }
}

macro_rules! spec {
    ($id:expr, $title:expr, $anchor:expr, $kind:expr, $slots:expr, $usage:expr, $variants:expr, $order:expr, $eval:expr) => {
        IdentitySpec {
            id: $id,
            title: $title,
            anchor: $anchor,
            kind: $kind,
            param_slots: $slots,
            sequence_slot: matches!($kind, Kind::Expansion),
            base_nome_usage: $usage,
            variants: $variants,
            default_order: $order,
            evaluator: $eval,
        }
    };
}

const ABCD: &[ParamSlot] = &[g("a"), g("b"), g("c"), g("d"), g("q"), NOME];
const AB: &[ParamSlot] = &[g("a"), g("b"), g("q"), NOME];
const AC: &[ParamSlot] = &[g("a"), g("c"), g("q"), NOME];
const BC: &[ParamSlot] = &[g("b"), g("c"), g("q"), NOME];
const P1_SLOTS: &[ParamSlot] = &[g("a"), g("beta"), g("gamma"), g("c"), g("d")];
const AB_P0: &[ParamSlot] = &[g("a"), g("b"), g("q")];
const LITERAL: &[Variant] = &[Variant::Literal];
const BOTH: &[Variant] = &[Variant::Literal, Variant::Corrected];

use Evaluator::{Expansion as X, Form as F};
use Kind::{Expansion, SpecialP0, Summation, Transformation};

static REGISTRY: &[IdentitySpec] = &[
    spec!("S1", "Frenkel-Turaev 10V9 summation", "10V9: \"due to Frenkel and Turaev\"", Summation, ABCD, &[(1, 1)], BOTH, 8, F(summations::s1)),
    spec!("S2", "Quadratic summation over (q^2,p^2) and (q,p)", "SOW1.3: \"requires Warnaar's summation\"", Summation, AB, &[(2, 2), (1, 1)], LITERAL, 8, F(summations::s2)),
    spec!("S3", "Quadratic summation with (b;q,p)_2j", "SOW1.4: \"Warnaar's summation formula\"", Summation, AB, &[(2, 2), (1, 1)], LITERAL, 8, F(summations::s3)),
    spec!("S4", "Lee-Rains-Warnaar quadratic summation", "lrw-1: \"due to Lee, Rains and Warnaar\"", Summation, AB, &[(1, 1), (1, 2)], LITERAL, 8, F(summations::s4)),
    spec!("S5", "Quadratic summation with parity indicator", "SOW1.10: \"We use the summation\"", Summation, AB, &[(1, 2), (2, 2)], LITERAL, 8, F(summations::s5)),
    spec!("S6", "Quadratic summation over (q,p^2) and (q^2,p^2)", "SOW1.15: \"stated this summation theorem without using\"", Summation, BC, &[(1, 2), (2, 2)], LITERAL, 8, F(summations::s6)),
    spec!("E1", "Well-poised Bailey lemma expansion", "ell-2: \"well-poised Bailey lemma given by Spiridonov\"", Expansion, ABCD, &[(1, 1)], LITERAL, 6, X(ExpansionId::E1)),
    spec!("E2", "Quadratic expansion over (q^2,p^2)", "expansion2: \"is equivalent to Warnaar\"", Expansion, AC, &[(1, 1), (2, 2)], LITERAL, 6, X(ExpansionId::E2)),
    spec!("E3", "Quadratic expansion with (q,p) inner sum", "expansion3: \"a WP Bailey lemma type result, due to Warnaar\"", Expansion, AC, &[(1, 1), (2, 2)], LITERAL, 6, X(ExpansionId::E3)),
    spec!("E4", "Expansion over (q,p) and (q,p^2)", "expansion5: \"to obtain the expansion formula\"", Expansion, AC, &[(1, 1), (1, 2)], LITERAL, 6, X(ExpansionId::E4)),
    spec!("T1", "Quadratic transformation over (q,p) and (q^2,p^2)", "tr-1: \"This yields the transformation formula\"", Transformation, ABCD, &[(1, 1), (2, 2)], LITERAL, 6, F(transformations::t1)),
    spec!("T2", "Transformation with (ad q^-k; q^2,p)_k", "tr-4: \"we obtain the following transformation formula\"", Transformation, ABCD, &[(1, 1), (2, 1)], LITERAL, 6, F(transformations::t2)),
    spec!("T3", "Transformation over (q,p) and (q,p^2)", "tr-5: \"obtain the transformation formula:\"", Transformation, ABCD, &[(1, 1), (1, 2)], LITERAL, 6, F(transformations::t3)),
    spec!("T4", "Quartic transformation over (q^4,p^4)", "exp2-tr2: \"and obtain the transformation formula\"", Transformation, AB, &[(1, 1), (2, 2), (4, 4)], LITERAL, 6, F(transformations::t4)),
    spec!("T5", "Quadratic transformation from (q^2,p^2) to (q,p)", "exp2-tr3: \"is obtained by applying\"", Transformation, AB, &[(1, 1), (2, 2)], LITERAL, 6, F(transformations::t5)),
    spec!("T6", "Transformation with (q^4,p^2) factorials", "exp2-tr4: \"relabel parameters, to obtain the transformation formula\"", Transformation, AB, &[(1, 1), (2, 2), (4, 2)], LITERAL, 6, F(transformations::t6)),
    spec!("T7", "Transformation with (bq^(1-2k); q^4,p^2)_k", "exp2-tr5: \"and relabel parameters, to obtain\"", Transformation, AB, &[(1, 1), (2, 2), (4, 2)], LITERAL, 6, F(transformations::t7)),
    spec!("T8", "Transformation over (q^2,p^4)", "exp2-tr6: \"interchange a and b, to obtain\"", Transformation, AB, &[(1, 1), (2, 2), (2, 4)], LITERAL, 6, F(transformations::t8)),
    spec!("P1", "Basic quadratic transformation with sqrt(b) parameters", "special-tr-5: \"can be written as\"", SpecialP0, P1_SLOTS, &[(1, 0)], LITERAL, 8, F(specials::p1)),
    spec!("P2", "Basic summation from the 8phi7 reduction", "special-tr-5a: \"to yield a summation theorem\"", SpecialP0, AB_P0, &[(1, 0), (2, 0)], LITERAL, 8, F(specials::p2)),
    spec!("P3", "Basic quadratic summation in base q^2", "special-tr-5-b: \"replace q by q^2, and b by b^2\"", SpecialP0, AB_P0, &[(2, 0), (1, 0)], LITERAL, 8, F(specials::p3)),
];

/// All registered identities in catalog order.
pub fn registry() -> &'static [IdentitySpec] {
    REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static IdentitySpec> {
    REGISTRY.iter().find(|s| s.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Catalog listing entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Listing {
    pub id: &'static str,
    pub title: &'static str,
    pub anchor: &'static str,
    pub kind: Kind,
}

pub fn list_identities() -> Vec<Listing> {
    REGISTRY.iter().map(|s| Listing { id: s.id, title: s.title, anchor: s.anchor, kind: s.kind }).collect()
}

/// Evaluates one side of a registered identity.
pub fn eval_side(
    id: &str,
    params: &Params,
    n: usize,
    side: Side,
    seq: Option<&SequenceInput>,
    variant: Variant,
    ctx: &NumericContext,
) -> Result<CValue> {
    let spec = lookup(id)?;
    spec.check_arity(params, seq)?;
    spec.bind(params, ctx)?.side(variant, n, side, seq)
}

/// Result of linting one sum of one identity.
#[derive(Debug, Clone, PartialEq)]
pub struct LintEntry {
    pub id: &'static str,
    pub variant: Variant,
    pub side: Side,
    /// `None` when the term ratio is not a finite theta product (some
    /// factorial argument moves with the summation index); such sums are
    /// reported but not judged.
    pub report: Option<BalanceReport>,
}

/// Balancing reports for every sum of every variant of `spec` at order
/// `n`. Closed-product sides contribute nothing.
pub fn lint_identity(spec: &IdentitySpec, params: &Params, n: usize, ctx: &NumericContext) -> Result<Vec<LintEntry>> {
    let bound = spec.bind(params, ctx)?;
    let mut out = Vec::new();
    for &variant in spec.variants {
        for side in [Side::Lhs, Side::Rhs] {
            if let Some(form) = bound.form(variant, n, side)? {
                if let Some(term) = &form.sum {
                    let report = term.ratio(bound.env().kernel()).map(|r| balance_report(&r, ctx));
                    out.push(LintEntry { id: spec.id, variant, side, report });
                }
            }
        }
    }
    Ok(out)
}

/// Lints the first sum of `spec` after multiplying the coefficient of one
/// numerator factorial by `factor`. Returns `None` if there is nothing to
/// perturb.
pub fn lint_unbalanced(spec: &IdentitySpec, params: &Params, n: usize, factor: f64, ctx: &NumericContext) -> Result<Option<BalanceReport>> {
    let bound = spec.bind(params, ctx)?;
    let variant = *spec.variants.last().expect("at least one variant");
    for side in [Side::Lhs, Side::Rhs] {
        if let Some(SideForm { sum: Some(term), .. }) = bound.form(variant, n, side)? {
            let k = bound.env().kernel();
            if let Some(bad) = term.unbalanced(k, factor)? {
                if let Some(r) = bad.ratio(k) {
                    return Ok(Some(balance_report(&r, ctx)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_all_ids() {
        let ids: Vec<_> = list_identities().into_iter().map(|l| l.id).collect();
        assert_eq!(ids.len(), 21);
        for id in ["S1", "S6", "E1", "E4", "T1", "T8", "P1", "P3"] {
            assert!(ids.contains(&id));
        }
        assert_eq!(lookup("S1").unwrap().kind, Kind::Summation);
        assert!(lookup("S1").unwrap().anchor.contains("due to Frenkel and Turaev"));
        assert!(lookup("T3").unwrap().anchor.contains("obtain the transformation formula"));
        assert!(matches!(lookup("NOPE"), Err(Error::UnknownIdentity(_))));
    }

    fn point(spec: &IdentitySpec, ctx: &NumericContext, shift: f64) -> Params {
        spec.param_slots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let x = i as f64 + shift;
                let v = match s.role {
                    SlotRole::Nome => ctx.from_polar(0.13, 0.7 + x),
                    SlotRole::Generic => ctx.from_polar(0.6 + 0.23 * ((3.0 * x).sin() + 1.0) * 2.5, 1.9 * x + 0.3),
                };
                (s.name.to_string(), v)
            })
            .collect()
    }

    #[test]
    fn every_identity_balances_at_a_fixed_point() {
        let ctx = NumericContext::new(256).unwrap();
        for spec in registry() {
            let params = point(spec, &ctx, 0.37);
            let variant = *spec.variants.last().unwrap();
            for n in 0..=4 {
                let seq = SequenceInput::from_fn(n + 1, |j| ctx.from_polar(0.5, j as f64));
                let seq = spec.sequence_slot.then_some(&seq);
                let l = eval_side(spec.id, &params, n, Side::Lhs, seq, variant, &ctx).unwrap();
                let r = eval_side(spec.id, &params, n, Side::Rhs, seq, variant, &ctx).unwrap();
                let err = crate::numerics::rel_error(&l, &r);
                assert!(err < 1e-50, "{} n={n}: {err:e}", spec.id);
            }
        }
    }

    #[test]
    fn s1_literal_reading_fails() {
        let ctx = NumericContext::new(256).unwrap();
        let spec = lookup("S1").unwrap();
        let params = point(spec, &ctx, 0.37);
        let l = eval_side("S1", &params, 3, Side::Lhs, None, Variant::Literal, &ctx).unwrap();
        let r = eval_side("S1", &params, 3, Side::Rhs, None, Variant::Literal, &ctx).unwrap();
        assert!(crate::numerics::rel_error(&l, &r) > 1e-3);
    }

    #[test]
    fn order_zero_sides_are_one_for_s1() {
        let ctx = NumericContext::new(256).unwrap();
        let params = point(lookup("S1").unwrap(), &ctx, 1.1);
        for side in [Side::Lhs, Side::Rhs] {
            let v = eval_side("S1", &params, 0, side, None, Variant::Corrected, &ctx).unwrap();
            assert!(crate::numerics::rel_error(&v, &ctx.one()) < 1e-70);
        }
    }

    #[test]
    fn s5_right_side_vanishes_at_odd_order() {
        let ctx = NumericContext::new(256).unwrap();
        let params = point(lookup("S5").unwrap(), &ctx, 0.5);
        assert!(eval_side("S5", &params, 3, Side::Rhs, None, Variant::Literal, &ctx).unwrap().is_zero());
    }

    #[test]
    fn arity_errors() {
        let ctx = NumericContext::new(256).unwrap();
        let params = point(lookup("E2").unwrap(), &ctx, 0.5);
        assert!(matches!(eval_side("E2", &params, 1, Side::Lhs, None, Variant::Literal, &ctx), Err(Error::Arity(_))));
        let seq = SequenceInput::new(vec![ctx.one(); 2]);
        let sp = point(lookup("S2").unwrap(), &ctx, 0.5);
        assert!(matches!(eval_side("S2", &sp, 1, Side::Lhs, Some(&seq), Variant::Literal, &ctx), Err(Error::Arity(_))));
        let mut short = sp.clone();
        short.remove("b");
        assert!(matches!(eval_side("S2", &short, 1, Side::Lhs, None, Variant::Literal, &ctx), Err(Error::Arity(_))));
    }

    #[test]
    fn sums_are_balanced() {
        let ctx = NumericContext::new(256).unwrap();
        for spec in registry().iter().filter(|s| matches!(s.kind, Kind::Summation | Kind::Transformation)) {
            let params = point(spec, &ctx, 0.37);
            for entry in lint_identity(spec, &params, 4, &ctx).unwrap() {
                if entry.variant == Variant::Literal && spec.has_variant(Variant::Corrected) {
                    continue;
                }
                if let Some(r) = entry.report {
                    assert!(r.balanced, "{} {} {:?}", spec.id, entry.side, r);
                }
            }
        }
    }

    #[test]
    fn limits_and_chain() {
        let ctx = NumericContext::new(256).unwrap();
        let p1 = point(lookup("P1").unwrap(), &ctx, 0.37);
        assert!(p1_p2_chain(&p1, 4, &ctx).unwrap() < 1e-50);
        for id in ["P1", "P2", "P3"] {
            let params = point(lookup(id).unwrap(), &ctx, 0.37);
            let d0 = limit_consistency(id, &params, 3, 0.0, &ctx).unwrap();
            assert!(d0 < 1e-50, "{id}: {d0:e}");
            let d4 = limit_consistency(id, &params, 3, 1e-4, &ctx).unwrap();
            let d8 = limit_consistency(id, &params, 3, 1e-8, &ctx).unwrap();
            assert!(d8 < 1e-6 && d4 < 1e-2, "{id}: {d4:e} {d8:e}");
            let ratio = (d4 / 1e-4) / (d8 / 1e-8);
            assert!((0.1..10.0).contains(&ratio), "{id}: {ratio}");
        }
    }
}
