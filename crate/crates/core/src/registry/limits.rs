//! Consistency of the `p = 0` identities with their elliptic parent T3,
//! and the specialization of P1 that reproduces P2.

use super::{lookup, Params, Side, SideForm, Variant};
use crate::error::{Error, Result};
use crate::numerics::{rel_error, CValue, NumericContext};

fn params(pairs: &[(&str, &CValue)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), (*v).clone())).collect()
}

fn get(p: &Params, name: &str) -> Result<CValue> {
    p.get(name).cloned().ok_or_else(|| Error::Arity(format!("missing parameter `{name}`")))
}

/// Both sides of `id`, or only the sum of each side when `sums_only`.
fn sides(id: &str, p: &Params, n: usize, sums_only: bool, ctx: &NumericContext) -> Result<[CValue; 2]> {
    let spec = lookup(id)?;
    spec.check_arity(p, None)?;
    let bound = spec.bind(p, ctx)?;
    let k = bound.env().kernel();
    let mut out = [ctx.zero(), ctx.zero()];
    for (slot, side) in out.iter_mut().zip([Side::Lhs, Side::Rhs]) {
        let form: SideForm = bound.form(Variant::Literal, n, side)?.expect("registered as a form");
        *slot = match (&form.sum, sums_only) {
            (Some(t), true) => t.sum(k, n)?,
            _ => form.eval(k, n)?,
        };
    }
    Ok(out)
}

/// T3 parameters at nome `p`.
fn t3_params(a: &CValue, b: &CValue, c: &CValue, d: &CValue, q: &CValue, p: &CValue) -> Params {
    params(&[("a", a), ("b", b), ("c", c), ("d", d), ("q", q), ("p", p)])
}

/// Relative deviation between a `p = 0` identity and T3 evaluated at the
/// real nome `p_small`.
///
/// * P1 (`a, beta, gamma, c, d`) is T3 with `b -> a^2/beta^2`,
///   `c -> a^3 q/(beta^2 c d)`, `d -> c`, `q = gamma^2`; both sides are
///   compared.
/// * P2 (`a, b, q`) is the right sum of that instance after `a -> -a`,
///   `b -> -a/b` and `c, d = ±aq/sqrt(b)`; it is compared with the P2 sum.
/// * P3 (`a, b, q`) is the right sum of T3 in base `q^2` with
///   `b -> a^2/b^2`, `c -> -a/q`, `d -> -aq^2/b`.
pub fn limit_consistency(id: &str, p: &Params, n: usize, p_small: f64, ctx: &NumericContext) -> Result<f64> {
    if !p_small.is_finite() || p_small.abs() >= 1.0 {
        return Err(Error::Domain(format!("p_small = {p_small} is not a small nome")));
    }
    let nome = ctx.real(p_small);
    match id {
        "P1" => {
            let [l0, r0] = sides("P1", p, n, false, ctx)?;
            let (a, be, ga, c, d) = (get(p, "a")?, get(p, "beta")?, get(p, "gamma")?, get(p, "c")?, get(p, "d")?);
            let q = &ga * &ga;
            let b = &be * &be;
            let bt = &(&a * &a) / &b;
            let ct = &(&(&(&a * &a) * &a) * &q) / &(&(&b * &c) * &d);
            let [l1, r1] = sides("T3", &t3_params(&a, &bt, &ct, &c, &q, &nome), n, false, ctx)?;
            Ok(rel_error(&l0, &l1).max(rel_error(&r0, &r1)))
        }
        "P2" => {
            let [l0, _] = sides("P2", p, n, false, ctx)?;
            let (a2, b2, q) = (get(p, "a")?, get(p, "b")?, get(p, "q")?);
            let a = -&a2;
            let b = &a2 / &b2;
            let be = b.sqrt();
            let c = &(&a * &q) / &be;
            let d = -&c;
            let bt = &(&a * &a) / &b;
            let ct = &(&(&(&a * &a) * &a) * &q) / &(&(&b * &c) * &d);
            let [_, r1] = sides("T3", &t3_params(&a, &bt, &ct, &c, &q, &nome), n, true, ctx)?;
            Ok(rel_error(&l0, &r1))
        }
        "P3" => {
            let [l0, _] = sides("P3", p, n, false, ctx)?;
            let (a, b, q) = (get(p, "a")?, get(p, "b")?, get(p, "q")?);
            let q2 = &q * &q;
            let bt = &(&a * &a) / &(&b * &b);
            let ct = -&(&a / &q);
            let dt = -&(&(&a * &q2) / &b);
            let [_, r1] = sides("T3", &t3_params(&a, &bt, &ct, &dt, &q2, &nome), n, true, ctx)?;
            Ok(rel_error(&l0, &r1))
        }
        other => Err(Error::UnknownIdentity(format!("{other} has no elliptic parent"))),
    }
}

/// P1 with `c, d = ±aq/beta` against P2 at `a -> -a`, `b -> -a/beta^2`.
/// Takes `a, beta, gamma`; returns the larger of the two deviations
/// (left side over the right prefactor, and the right sum).
pub fn p1_p2_chain(p: &Params, n: usize, ctx: &NumericContext) -> Result<f64> {
    let (a, be, ga) = (get(p, "a")?, get(p, "beta")?, get(p, "gamma")?);
    let q = &ga * &ga;
    let c = &(&a * &q) / &be;
    let d = -&c;
    let p1 = params(&[("a", &a), ("beta", &be), ("gamma", &ga), ("c", &c), ("d", &d)]);
    let spec = lookup("P1")?;
    let bound = spec.bind(&p1, ctx)?;
    let k = bound.env().kernel();
    let lhs = bound.side(Variant::Literal, n, Side::Lhs, None)?;
    let rform = bound.form(Variant::Literal, n, Side::Rhs)?.expect("registered as a form");
    let pre = rform.prefactor.eval(k, n)?;
    let rsum = rform.sum.as_ref().expect("P1 has a right sum").sum(k, n)?;

    let a2 = -&a;
    let b2 = &a2 / &(&be * &be);
    let p2 = params(&[("a", &a2), ("b", &b2), ("q", &q)]);
    let [l2, r2] = sides("P2", &p2, n, false, ctx)?;
    Ok(rel_error(&(&lhs / &pre), &r2).max(rel_error(&rsum, &l2)))
}
