//! The modified Jacobi theta function and q,p-shifted factorials.
//!
//! `theta`, `qp_factorial` and `qp_factorial_multi` are the plain entry
//! points. Identity evaluators go through [`Kernel`] instead: it fixes one
//! base `q` and nome `p`, writes every argument as `c * q^e` with an
//! integer `e`, and memoizes theta values on `(c, e, nome power)`. Writing
//! arguments this way also makes `θ(q^-n * q^n) = θ(1)` vanish exactly.

use std::collections::HashMap;
use std::sync::Mutex;

use rug::ops::{NegAssign, SubFrom};
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{CValue, NumericContext};

/// Extra factors multiplied in beyond the analytic truncation index.
pub const GUARD_TERMS: usize = 4;

/// Smallest `J` with `|p|^J * max(|a|, 1/|a|, 1) < eps`.
pub fn truncation_index(p_abs: f64, ln_a_abs: f64, eps: f64) -> usize {
    debug_assert!(p_abs > 0.0 && p_abs < 1.0);
    let ln_m = ln_a_abs.abs();
    let x = (eps.ln() - ln_m) / p_abs.ln();
    let mut j = if x < 0.0 { 0 } else { x.floor() as usize + 1 };
    // x is computed in floating point; settle the boundary exactly
    while j > 0 && (j as f64 - 1.0) * p_abs.ln() + ln_m < eps.ln() {
        j -= 1;
    }
    while j as f64 * p_abs.ln() + ln_m >= eps.ln() {
        j += 1;
    }
    j
}

fn check_nome(p: &CValue) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::Domain("nome is not finite".into()));
    }
    if p.norm_sqr() >= 1 {
        return Err(Error::Domain(format!("nome must satisfy |p| < 1, got |p| = {}", p.abs_f64())));
    }
    Ok(())
}

/// `θ(a; p) = ∏_{j≥0} (1 - a p^j)(1 - p^{j+1}/a)`.
///
/// The product is cut at the analytic truncation index plus
/// [`GUARD_TERMS`]; at `p = 0` the result is exactly `1 - a`.
pub fn theta(a: &CValue, p: &CValue, ctx: &NumericContext) -> Result<CValue> {
    if !a.is_finite() {
        return Err(Error::Domain("theta argument is not finite".into()));
    }
    check_nome(p)?;
    let prec = ctx.precision_bits();
    if p.is_zero() {
        return Ok(a.with_prec(prec).one_minus());
    }
    if a.is_zero() {
        return Err(Error::Domain("theta argument must be nonzero".into()));
    }
    let ln_a = a.abs().ln().to_f64();
    let j = truncation_index(p.abs_f64(), ln_a, ctx.theta_epsilon());
    Ok(theta_product(a, p, j + GUARD_TERMS, prec))
}

/// The first `terms` factor pairs of the theta product, with no
/// truncation logic. Exposed so that tests can build deeper oracles.
pub fn theta_product(a: &CValue, p: &CValue, terms: usize, prec: u32) -> CValue {
    let a = a.with_prec(prec);
    let p = p.with_prec(prec);
    let a_inv = a.recip();
    let mut acc = CValue::one(prec);
    let mut pj = CValue::one(prec);
    let mut t = CValue::zero(prec);
    let mut s = Float::new(prec);
    let mut scratch = [Float::new(prec), Float::new(prec)];
    for _ in 0..terms {
        // 1 - a p^j
        t.assign_mul(&a, &pj, &mut s);
        t.re.sub_from(1);
        t.im.neg_assign();
        acc.mul_assign_scratch(&t, &mut scratch);
        pj.mul_assign_scratch(&p, &mut scratch);
        // 1 - p^{j+1} / a
        t.assign_mul(&a_inv, &pj, &mut s);
        t.re.sub_from(1);
        t.im.neg_assign();
        acc.mul_assign_scratch(&t, &mut scratch);
    }
    acc
}

/// Arguments of `(a; q, p)_k`.
#[derive(Debug, Clone)]
pub struct FactorialArgs {
    pub a: CValue,
    pub q: CValue,
    pub p: CValue,
    pub k: usize,
}

impl FactorialArgs {
    pub fn new(a: CValue, q: CValue, p: CValue, k: usize) -> Self {
        FactorialArgs { a, q, p, k }
    }
}

/// `(a; q, p)_k = ∏_{j<k} θ(a q^j; p)`; the empty product is 1.
pub fn qp_factorial(args: &FactorialArgs, ctx: &NumericContext) -> Result<CValue> {
    check_nome(&args.p)?;
    let prec = ctx.precision_bits();
    let mut acc = CValue::one(prec);
    let mut x = args.a.with_prec(prec);
    for j in 0..args.k {
        acc *= &theta(&x, &args.p, ctx)?;
        if j + 1 < args.k {
            x *= &args.q;
        }
    }
    Ok(acc)
}

/// `(a_1, ..., a_r; q, p)_k`, the product of the single factorials.
pub fn qp_factorial_multi(
    args: &[CValue],
    q: &CValue,
    p: &CValue,
    k: usize,
    ctx: &NumericContext,
) -> Result<CValue> {
    let mut acc = ctx.one();
    for a in args {
        acc *= &qp_factorial(&FactorialArgs::new(a.clone(), q.clone(), p.clone(), k), ctx)?;
    }
    Ok(acc)
}

/// Handle to a coefficient interned in a [`Kernel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coeff(usize);

#[derive(Default)]
struct Interner {
    values: Vec<CValue>,
    index: HashMap<String, usize>,
}

/// Memoizing evaluator for theta factors `θ(c q^e; p^s)` at a fixed base
/// and nome.
///
/// Coefficients are interned by their exact bit pattern, so two
/// evaluations that build the same coefficient by the same arithmetic share
/// cache entries. The kernel also records the smallest modulus of any
/// theta factor that was used in a denominator, which is what the pole
/// predicates of the registry inspect.
pub struct Kernel {
    ctx: NumericContext,
    q: CValue,
    p: CValue,
    coeffs: Mutex<Interner>,
    q_pows: Mutex<HashMap<i64, CValue>>,
    p_pows: Mutex<HashMap<u32, CValue>>,
    memo: Mutex<HashMap<(Coeff, i64, u32), CValue>>,
    min_denominator: Mutex<f64>,
}

impl Kernel {
    pub fn new(q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<Self> {
        check_nome(p)?;
        if q.is_zero() || !q.is_finite() {
            return Err(Error::Domain("base q must be finite and nonzero".into()));
        }
        let prec = ctx.precision_bits();
        Ok(Kernel {
            ctx: *ctx,
            q: q.with_prec(prec),
            p: p.with_prec(prec),
            coeffs: Mutex::new(Interner::default()),
            q_pows: Mutex::new(HashMap::new()),
            p_pows: Mutex::new(HashMap::new()),
            memo: Mutex::new(HashMap::new()),
            min_denominator: Mutex::new(f64::INFINITY),
        })
    }

    pub fn ctx(&self) -> &NumericContext {
        &self.ctx
    }

    pub fn q(&self) -> &CValue {
        &self.q
    }

    pub fn p(&self) -> &CValue {
        &self.p
    }

    /// Interns `v`. Zero coefficients are rejected unless `p = 0`, where
    /// `θ(0) = 1`.
    pub fn coeff(&self, v: &CValue) -> Result<Coeff> {
        if (v.is_zero() && !self.p.is_zero()) || !v.is_finite() {
            return Err(Error::Domain(format!("coefficient {v} is zero or not finite")));
        }
        let v = v.with_prec(self.ctx.precision_bits());
        let key = format!("{}|{}", v.re.to_string_radix(16, None), v.im.to_string_radix(16, None));
        let mut interner = self.coeffs.lock().expect("interner lock");
        if let Some(&i) = interner.index.get(&key) {
            return Ok(Coeff(i));
        }
        let i = interner.values.len();
        interner.values.push(v);
        interner.index.insert(key, i);
        Ok(Coeff(i))
    }

    pub fn value(&self, c: Coeff) -> CValue {
        self.coeffs.lock().expect("interner lock").values[c.0].clone()
    }

    /// `q^e`, cached. Each power is computed independently by repeated
    /// squaring so cached values do not depend on fill order.
    pub fn qpow(&self, e: i64) -> CValue {
        let mut pows = self.q_pows.lock().expect("q power lock");
        pows.entry(e).or_insert_with(|| self.q.powi(e)).clone()
    }

    /// `p^s`, cached.
    pub fn ppow(&self, s: u32) -> CValue {
        let mut pows = self.p_pows.lock().expect("p power lock");
        pows.entry(s).or_insert_with(|| self.p.powi(s as i64)).clone()
    }

    /// The argument `c q^e` as a value.
    pub fn arg(&self, c: Coeff, e: i64) -> CValue {
        &self.value(c) * &self.qpow(e)
    }

    /// `θ(c q^e; p^s)`, memoized.
    pub fn theta(&self, c: Coeff, e: i64, s: u32) -> Result<CValue> {
        if let Some(v) = self.memo.lock().expect("memo lock").get(&(c, e, s)) {
            return Ok(v.clone());
        }
        let v = theta(&self.arg(c, e), &self.ppow(s), &self.ctx)?;
        self.memo.lock().expect("memo lock").insert((c, e, s), v.clone());
        Ok(v)
    }

    /// `(c q^e; q^base, p^s)_len`.
    pub fn factorial(&self, c: Coeff, e: i64, base: i64, s: u32, len: usize) -> Result<CValue> {
        let mut acc = CValue::one(self.ctx.precision_bits());
        for i in 0..len as i64 {
            acc *= &self.theta(c, e + base * i, s)?;
        }
        Ok(acc)
    }

    /// Like [`Kernel::factorial`] but records every factor as a denominator
    /// factor for the pole predicate.
    pub fn factorial_den(&self, c: Coeff, e: i64, base: i64, s: u32, len: usize) -> Result<CValue> {
        let mut acc = CValue::one(self.ctx.precision_bits());
        for i in 0..len as i64 {
            let t = self.theta(c, e + base * i, s)?;
            self.note_denominator(&t);
            acc *= &t;
        }
        Ok(acc)
    }

    /// `θ(c q^e; p^s)` used as a denominator factor.
    pub fn theta_den(&self, c: Coeff, e: i64, s: u32) -> Result<CValue> {
        let t = self.theta(c, e, s)?;
        self.note_denominator(&t);
        Ok(t)
    }

    pub fn note_denominator(&self, t: &CValue) {
        let m = t.abs_f64();
        let mut cur = self.min_denominator.lock().expect("pole lock");
        if m < *cur {
            *cur = m;
        }
    }

    /// Smallest modulus seen among denominator theta factors since
    /// construction or the last reset.
    pub fn min_denominator(&self) -> f64 {
        *self.min_denominator.lock().expect("pole lock")
    }

    pub fn reset_min_denominator(&self) {
        *self.min_denominator.lock().expect("pole lock") = f64::INFINITY;
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_error;

    fn ctx() -> NumericContext {
        NumericContext::default()
    }

    #[test]
    fn theta_at_zero_nome_is_one_minus_a() {
        let c = ctx();
        let v = theta(&c.real(0.5), &c.zero(), &c).unwrap();
        assert_eq!(v, c.real(0.5));
    }

    #[test]
    fn theta_vanishes_at_one() {
        let c = ctx();
        let v = theta(&c.one(), &c.complex(0.2, 0.1), &c).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn theta_rejects_bad_domain() {
        let c = ctx();
        assert!(matches!(theta(&c.zero(), &c.real(0.1), &c), Err(Error::Domain(_))));
        assert!(matches!(theta(&c.real(2.0), &c.real(1.0), &c), Err(Error::Domain(_))));
        assert!(matches!(theta(&c.real(2.0), &c.complex(0.8, 0.7), &c), Err(Error::Domain(_))));
    }

    #[test]
    fn truncation_index_is_minimal() {
        let eps = 1e-60f64;
        for &(p, a) in &[(0.1f64, 1.0f64), (0.3, 5.0), (0.05, 0.01), (0.5, 1e3)] {
            let j = truncation_index(p, a.ln(), eps);
            let m = a.max(1.0 / a).max(1.0);
            assert!(p.powi(j as i32) * m < eps * 1.000001);
            assert!(j == 0 || p.powi(j as i32 - 1) * m >= eps * 0.999999);
        }
    }

    #[test]
    fn factorial_examples() {
        let c = ctx();
        let q = c.real(0.7);
        let one = qp_factorial(&FactorialArgs::new(c.real(0.3), q.clone(), c.real(0.1), 0), &c).unwrap();
        assert_eq!(one, c.one());
        let v = qp_factorial(&FactorialArgs::new(c.real(0.3), q, c.zero(), 4), &c).unwrap();
        let direct = c.real((1.0 - 0.3) * (1.0 - 0.21) * (1.0 - 0.147) * (1.0 - 0.1029));
        assert!(rel_error(&v, &direct) < 1e-15);
    }

    #[test]
    fn kernel_matches_plain_factorial() {
        let c = ctx();
        let q = c.complex(0.9, 0.4);
        let p = c.complex(0.1, -0.15);
        let k = Kernel::new(&q, &p, &c).unwrap();
        let a = c.complex(1.3, -0.2);
        let ca = k.coeff(&a).unwrap();
        let plain = qp_factorial(&FactorialArgs::new(&a * &q.powi(2), q.clone(), p.clone(), 5), &c).unwrap();
        let cached = k.factorial(ca, 2, 1, 1, 5).unwrap();
        assert!(rel_error(&plain, &cached) < 1e-70);
        // memo hit on the second call returns the identical value
        assert_eq!(cached, k.factorial(ca, 2, 1, 1, 5).unwrap());
        assert_eq!(k.coeff(&a).unwrap(), ca);
    }

    #[test]
    fn kernel_terminating_factor_is_exact_zero() {
        let c = ctx();
        let k = Kernel::new(&c.complex(0.8, 0.9), &c.real(0.2), &c).unwrap();
        let one = k.coeff(&c.one()).unwrap();
        // (q^-3; q, p)_4 contains θ(1)
        assert!(k.factorial(one, -3, 1, 1, 4).unwrap().is_zero());
        assert!(!k.factorial(one, -3, 1, 1, 3).unwrap().is_zero());
    }

    #[test]
    fn kernel_tracks_smallest_denominator() {
        let c = ctx();
        let k = Kernel::new(&c.real(0.5), &c.real(0.1), &c).unwrap();
        let a = k.coeff(&c.real(1.0001)).unwrap();
        k.factorial(a, 0, 1, 1, 1).unwrap();
        assert_eq!(k.min_denominator(), f64::INFINITY);
        k.factorial_den(a, 0, 1, 1, 1).unwrap();
        assert!(k.min_denominator() < 1e-3);
    }
}
