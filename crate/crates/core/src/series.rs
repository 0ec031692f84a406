//! Terminating sums and the ellipticity (balancing) linter.
//!
//! Summands of the registered identities are described declaratively as a
//! [`Term`]: a product of theta factors, shifted factorials and powers whose
//! arguments are `c q^e` with `e` affine in the summation index. The same
//! description is evaluated numerically and turned into the [`ThetaRatio`]
//! of consecutive terms for the linter, so the linter always sees the
//! summand that is actually summed.

use crate::error::{Error, Result};
use crate::numerics::{balanced_product, rel_error, CValue, NumericContext};
use crate::theta::{theta, Coeff, Kernel};

/// A terminating summand `j ↦ term(j)` for `0 ≤ j ≤ n`. The parameter
/// environment lives in whatever the closure captures.
pub struct Summand<'a> {
    n: usize,
    term: Box<dyn Fn(usize) -> Result<CValue> + 'a>,
}

impl<'a> Summand<'a> {
    pub fn new(n: usize, term: impl Fn(usize) -> Result<CValue> + 'a) -> Self {
        Summand { n, term: Box::new(term) }
    }

    /// Summand given by a [`Term`] evaluated through `kernel`.
    pub fn from_term(kernel: &'a Kernel, term: &'a Term, n: usize) -> Self {
        Summand::new(n, move |j| term.eval(kernel, j))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn term(&self, j: usize) -> Result<CValue> {
        (self.term)(j)
    }
}

/// `∑_{j=0}^{n} term(j)`, accumulated in ascending `j`.
pub fn sum_terminating(s: &Summand<'_>, ctx: &NumericContext) -> Result<CValue> {
    let mut acc = ctx.zero();
    for j in 0..=s.n {
        let t = s.term(j)?;
        if !t.is_finite() {
            return Err(Error::Evaluation(format!("term {j} is not finite")));
        }
        acc += &t;
    }
    Ok(acc)
}

/// `term(j+1) / term(j)`.
pub fn term_ratio(s: &Summand<'_>, j: usize, _ctx: &NumericContext) -> Result<CValue> {
    if j >= s.n {
        return Err(Error::Evaluation(format!("term ratio index {j} outside 0..{}", s.n)));
    }
    let t0 = s.term(j)?;
    if t0.is_zero() {
        return Err(Error::DivisionByZero(format!("term {j} vanishes")));
    }
    Ok(&s.term(j + 1)? / &t0)
}

/// One factor of a declarative summand.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// `θ(c q^{qexp + step·j}; p^nome)`.
    Theta { coeff: Coeff, qexp: i64, step: i64, nome: u32, den: bool },
    /// `(c q^{qexp + drift·j}; q^base, p^nome)_{len·j}`.
    Factorial { coeff: Coeff, qexp: i64, drift: i64, base: i64, nome: u32, len: usize, den: bool },
    /// `c^{mult·j}`.
    Power { coeff: Coeff, mult: i64 },
    /// `q^{mult·j}`.
    QPower { mult: i64 },
}

/// A summand written as a product of [`Piece`]s in the index `j`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Term {
    pieces: Vec<Piece>,
}

impl Term {
    pub fn new() -> Self {
        Term::default()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn push(mut self, p: Piece) -> Self {
        self.pieces.push(p);
        self
    }

    pub fn theta(self, coeff: Coeff, qexp: i64, step: i64, nome: u32) -> Self {
        self.push(Piece::Theta { coeff, qexp, step, nome, den: false })
    }

    pub fn theta_den(self, coeff: Coeff, qexp: i64, step: i64, nome: u32) -> Self {
        self.push(Piece::Theta { coeff, qexp, step, nome, den: true })
    }

    /// `(c_1 q^{e_1}, ...; q^base, p^nome)_j`.
    pub fn fac(self, args: &[(Coeff, i64)], base: i64, nome: u32) -> Self {
        self.fac_len(args, base, nome, 1)
    }

    /// `(c_1 q^{e_1}, ...; q^base, p^nome)_{len·j}`.
    pub fn fac_len(mut self, args: &[(Coeff, i64)], base: i64, nome: u32, len: usize) -> Self {
        for &(coeff, qexp) in args {
            self = self.push(Piece::Factorial { coeff, qexp, drift: 0, base, nome, len, den: false });
        }
        self
    }

    pub fn fac_den(self, args: &[(Coeff, i64)], base: i64, nome: u32) -> Self {
        self.fac_den_len(args, base, nome, 1)
    }

    pub fn fac_den_len(mut self, args: &[(Coeff, i64)], base: i64, nome: u32, len: usize) -> Self {
        for &(coeff, qexp) in args {
            self = self.push(Piece::Factorial { coeff, qexp, drift: 0, base, nome, len, den: true });
        }
        self
    }

    /// `(c q^{qexp + drift·j}; q^base, p^nome)_j`, an argument that moves
    /// with the index.
    pub fn fac_drift(self, coeff: Coeff, qexp: i64, drift: i64, base: i64, nome: u32) -> Self {
        self.push(Piece::Factorial { coeff, qexp, drift, base, nome, len: 1, den: false })
    }

    pub fn fac_drift_den(self, coeff: Coeff, qexp: i64, drift: i64, base: i64, nome: u32) -> Self {
        self.push(Piece::Factorial { coeff, qexp, drift, base, nome, len: 1, den: true })
    }

    pub fn pow(self, coeff: Coeff, mult: i64) -> Self {
        self.push(Piece::Power { coeff, mult })
    }

    pub fn qpow(self, mult: i64) -> Self {
        self.push(Piece::QPower { mult })
    }

    /// Value of the summand at index `j`. Denominator theta factors are
    /// reported to the kernel's pole tracker.
    pub fn eval(&self, k: &Kernel, j: usize) -> Result<CValue> {
        let prec = k.ctx().precision_bits();
        let j = j as i64;
        let mut num = Vec::with_capacity(self.pieces.len());
        let mut den = Vec::new();
        for piece in &self.pieces {
            match *piece {
                Piece::Theta { coeff, qexp, step, nome, den: d } => {
                    let e = qexp + step * j;
                    if d {
                        den.push(k.theta_den(coeff, e, nome)?);
                    } else {
                        num.push(k.theta(coeff, e, nome)?);
                    }
                }
                Piece::Factorial { coeff, qexp, drift, base, nome, len, den: d } => {
                    let e = qexp + drift * j;
                    let l = len * j as usize;
                    if d {
                        den.push(k.factorial_den(coeff, e, base, nome, l)?);
                    } else {
                        num.push(k.factorial(coeff, e, base, nome, l)?);
                    }
                }
                Piece::Power { coeff, mult } => num.push(k.value(coeff).powi(mult * j)),
                Piece::QPower { mult } => num.push(k.qpow(mult * j)),
            }
        }
        let n = balanced_product(&num, prec);
        if den.is_empty() {
            return Ok(n);
        }
        let d = balanced_product(&den, prec);
        if d.is_zero() {
            return Err(Error::DivisionByZero("denominator theta factor vanishes".into()));
        }
        Ok(&n / &d)
    }

    /// `∑_{j=0}^{n} eval(j)`.
    pub fn sum(&self, k: &Kernel, n: usize) -> Result<CValue> {
        sum_terminating(&Summand::from_term(k, self, n), k.ctx())
    }

    /// The ratio `term(j+1)/term(j)` as a theta-factor ratio in
    /// `z = q^j`. Returns `None` when some factorial argument drifts with
    /// the index, in which case the ratio is not a finite theta product.
    pub fn ratio(&self, k: &Kernel) -> Option<ThetaRatio> {
        let mut numerator = Vec::new();
        let mut denominator = Vec::new();
        let mut prefactor = CValue::one(k.ctx().precision_bits());
        for piece in &self.pieces {
            match *piece {
                Piece::Theta { coeff, qexp, step, nome, den } => {
                    if step == 0 {
                        continue;
                    }
                    let up = ThetaFactor::new(k.arg(coeff, qexp + step), step, nome);
                    let down = ThetaFactor::new(k.arg(coeff, qexp), step, nome);
                    if den {
                        numerator.push(down);
                        denominator.push(up);
                    } else {
                        numerator.push(up);
                        denominator.push(down);
                    }
                }
                Piece::Factorial { coeff, qexp, drift, base, nome, len, den } => {
                    if drift != 0 {
                        return None;
                    }
                    for r in 0..len as i64 {
                        let f = ThetaFactor::new(k.arg(coeff, qexp + base * r), base * len as i64, nome);
                        if den {
                            denominator.push(f);
                        } else {
                            numerator.push(f);
                        }
                    }
                }
                Piece::Power { coeff, mult } => prefactor *= &k.value(coeff).powi(mult),
                Piece::QPower { mult } => prefactor *= &k.qpow(mult),
            }
        }
        Some(ThetaRatio { numerator, denominator, prefactor, nome: Some(k.p().clone()) })
    }

    /// Copy of the term with the coefficient of its first non-drifting
    /// numerator factorial multiplied by `factor`, or `None` if it has no
    /// such piece. Used to check that the linter notices an unbalanced
    /// summand.
    pub fn unbalanced(&self, k: &Kernel, factor: f64) -> Result<Option<Term>> {
        let mut out = self.clone();
        for piece in out.pieces.iter_mut() {
            if let Piece::Factorial { coeff, drift: 0, den: false, .. } = piece {
                let v = k.value(*coeff).scale(factor);
                *coeff = k.coeff(&v)?;
                return Ok(Some(out));
            }
        }
        Ok(None)
    }
}

/// `θ(arg · z^z_power; p^nome)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFactor {
    pub arg: CValue,
    pub z_power: i64,
    pub nome: u32,
}

impl ThetaFactor {
    pub fn new(arg: CValue, z_power: i64, nome: u32) -> Self {
        ThetaFactor { arg, z_power, nome }
    }

    /// `θ(arg z; p)`, the factor shape of the single-nome linter.
    pub fn simple(arg: CValue) -> Self {
        ThetaFactor::new(arg, 1, 1)
    }
}

/// `g(z) = prefactor · ∏ θ(a_i z^{e_i}; p^{s_i}) / ∏ θ(b_i z^{f_i}; p^{t_i})`.
///
/// `nome` carries the value of `p` when it is known; it is only needed if
/// the quasi-periodicity factors leave a net power of `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRatio {
    pub numerator: Vec<ThetaFactor>,
    pub denominator: Vec<ThetaFactor>,
    pub prefactor: CValue,
    pub nome: Option<CValue>,
}

impl ThetaRatio {
    /// `prefactor · ∏ θ(a_i z) / ∏ θ(b_i z)`.
    pub fn new(numerator_args: Vec<CValue>, denominator_args: Vec<CValue>, prefactor: CValue) -> Self {
        ThetaRatio {
            numerator: numerator_args.into_iter().map(ThetaFactor::simple).collect(),
            denominator: denominator_args.into_iter().map(ThetaFactor::simple).collect(),
            prefactor,
            nome: None,
        }
    }

    /// Smallest `L ≥ 1` such that `z → p^L z` multiplies every factor's
    /// argument by an integral power of its own nome.
    pub fn quasi_period(&self) -> u64 {
        self.numerator
            .iter()
            .chain(&self.denominator)
            .filter(|f| f.z_power != 0)
            .map(|f| {
                let s = f.nome as u64;
                s / gcd(f.z_power.unsigned_abs(), s)
            })
            .fold(1, lcm)
    }

    /// `g(z)`. Fails if a denominator factor comes within `pole_delta` of a
    /// zero.
    pub fn eval(&self, z: &CValue, p: &CValue, ctx: &NumericContext) -> Result<CValue> {
        let mut acc = self.prefactor.with_prec(ctx.precision_bits());
        for (factors, den) in [(&self.numerator, false), (&self.denominator, true)] {
            for f in factors {
                let x = &f.arg * &z.powi(f.z_power);
                let t = theta(&x, &p.powi(f.nome as i64), ctx)?;
                if den {
                    if t.abs_f64() < ctx.pole_delta() {
                        return Err(Error::Domain("theta factor in denominator is near a zero".into()));
                    }
                    acc /= &t;
                } else {
                    acc *= &t;
                }
            }
        }
        Ok(acc)
    }
}

/// Outcome of [`balance_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    /// Shift `z → p^L z` used.
    pub quasi_period: u64,
    /// Net power of `z` picked up under the shift; must vanish.
    pub z_exponent: i64,
    /// Net power of `p` from the quasi-periodicity factors.
    pub p_exponent: i64,
    /// `|K - 1|`-type deviation of the constant multiplier `K` from 1.
    pub constant_deviation: f64,
    pub balanced: bool,
}

/// Checks that `g(p^L z) = g(z)` identically in `z`.
///
/// With `t_i = e_i L / s_i` the shift multiplies `θ(a_i z^{e_i}; p^{s_i})`
/// by `(-1)^{t_i} (a_i z^{e_i})^{-t_i} p^{-s_i t_i (t_i - 1)/2}`. The net
/// power of `z` must vanish and the remaining constant must equal 1. For
/// factors `θ(a_i z; p)` with equal counts this is the classical condition
/// `∏ a_i = ∏ b_i`.
pub fn balance_report(tr: &ThetaRatio, ctx: &NumericContext) -> BalanceReport {
    let prec = ctx.precision_bits();
    let l = tr.quasi_period() as i64;
    let mut z_exp = 0i64;
    let mut sign = 0i64;
    let mut p_exp = 0i64;
    let mut num = CValue::one(prec);
    let mut den = CValue::one(prec);
    for (factors, s) in [(&tr.numerator, 1i64), (&tr.denominator, -1i64)] {
        for f in factors {
            if f.z_power == 0 {
                continue;
            }
            let t = f.z_power * l / f.nome as i64;
            z_exp += s * f.z_power * t;
            sign += s * t;
            p_exp += s * f.nome as i64 * t * (t - 1) / 2;
            let c = f.arg.powi(t);
            if s > 0 {
                num *= &c;
            } else {
                den *= &c;
            }
        }
    }
    // K = (-1)^sign · den/num · p^{-p_exp}
    let mut k = &den / &num;
    if sign.rem_euclid(2) == 1 {
        k = -k;
    }
    let constant_deviation = if p_exp == 0 {
        rel_error(&k, &CValue::one(prec))
    } else if let Some(p) = &tr.nome {
        rel_error(&(&k * &p.powi(-p_exp)), &CValue::one(prec))
    } else {
        f64::INFINITY
    };
    let balanced = z_exp == 0 && constant_deviation < ctx.rel_tolerance();
    BalanceReport { quasi_period: l as u64, z_exponent: z_exp, p_exponent: p_exp, constant_deviation, balanced }
}

/// Whether `tr` is elliptically balanced, see [`balance_report`].
pub fn balancing_check(tr: &ThetaRatio, ctx: &NumericContext) -> bool {
    balance_report(tr, ctx).balanced
}

/// `max_z rel_error(g(z), g(p^L z))` over the samples, with `L` the
/// quasi-period of the ratio (`L = 1` for single-nome ratios).
pub fn ellipticity_check(
    tr: &ThetaRatio,
    p: &CValue,
    z_samples: &[CValue],
    ctx: &NumericContext,
) -> Result<f64> {
    let shift = p.powi(tr.quasi_period() as i64);
    let mut worst = 0f64;
    for z in z_samples {
        let g0 = tr.eval(z, p, ctx)?;
        let g1 = tr.eval(&(z * &shift), p, ctx)?;
        worst = worst.max(rel_error(&g0, &g1));
    }
    Ok(worst)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::qp_factorial_multi;

    fn ctx() -> NumericContext {
        NumericContext::default()
    }

    #[test]
    fn sums_of_simple_summands() {
        let c = ctx();
        let s = Summand::new(0, |_| Ok(c.real(3.5)));
        assert_eq!(sum_terminating(&s, &c).unwrap(), c.real(3.5));
        let s = Summand::new(5, |_| Ok(c.one()));
        assert_eq!(sum_terminating(&s, &c).unwrap(), c.real(6.0));
    }

    #[test]
    fn non_finite_term_is_an_error() {
        let c = ctx();
        let s = Summand::new(2, |j| Ok(if j == 1 { c.zero().recip() } else { c.one() }));
        assert!(matches!(sum_terminating(&s, &c), Err(Error::Evaluation(_))));
    }

    #[test]
    fn term_ratio_examples() {
        let c = ctx();
        let s = Summand::new(4, |_| Ok(c.real(2.0)));
        assert_eq!(term_ratio(&s, 0, &c).unwrap(), c.one());
        let z = c.complex(0.3, 1.1);
        let s = Summand::new(4, |j| Ok(z.powi(j as i64)));
        assert!(rel_error(&term_ratio(&s, 2, &c).unwrap(), &z) < 1e-70);
        let s = Summand::new(4, |j| Ok(if j == 0 { c.zero() } else { c.one() }));
        assert!(matches!(term_ratio(&s, 0, &c), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn balancing_examples() {
        let c = ctx();
        let x = c.complex(0.4, 0.9);
        assert!(balancing_check(&ThetaRatio::new(vec![x.clone()], vec![x], c.one()), &c));
        let r = |n: &[f64], d: &[f64]| {
            ThetaRatio::new(n.iter().map(|&v| c.real(v)).collect(), d.iter().map(|&v| c.real(v)).collect(), c.one())
        };
        assert!(balancing_check(&r(&[2.0, 3.0], &[6.0, 1.0]), &c));
        assert!(!balancing_check(&r(&[2.0, 3.0], &[5.0, 1.0]), &c));
        // equal products but unequal counts is not invariant under z -> pz
        assert!(!balancing_check(&r(&[2.0, 3.0], &[6.0]), &c));
    }

    #[test]
    fn ellipticity_examples() {
        let c = ctx();
        let p = c.complex(0.12, 0.05);
        let z = vec![c.complex(0.7, 0.3), c.complex(-1.1, 0.4)];
        let a = c.complex(0.8, -0.6);
        let same = ThetaRatio::new(vec![a.clone()], vec![a.clone()], c.one());
        assert_eq!(ellipticity_check(&same, &p, &z, &c).unwrap(), 0.0);
        let b = c.complex(1.3, 0.2);
        let cc = c.complex(-0.7, 1.1);
        let balanced = ThetaRatio::new(vec![a.clone(), b.clone()], vec![cc.clone(), &(&a * &b) / &cc], c.one());
        assert!(ellipticity_check(&balanced, &p, &z, &c).unwrap() < 1e-50);
        let unbalanced = ThetaRatio::new(vec![a.clone()], vec![a.scale(2.0)], c.one());
        let dev = ellipticity_check(&unbalanced, &p, &z, &c).unwrap();
        assert!(dev > 0.1, "{dev}");
    }

    #[test]
    fn multi_nome_ratio_is_checked_with_its_quasi_period() {
        // θ(a z; p²) θ(b z; p²) / (θ(c z; p²) θ(ab z/c; p²)) has L = 2
        let c = ctx();
        let p = c.complex(0.2, 0.1);
        let a = c.complex(0.8, 0.3);
        let b = c.complex(-0.5, 1.2);
        let d = c.complex(1.1, -0.4);
        let tr = ThetaRatio {
            numerator: vec![ThetaFactor::new(a.clone(), 1, 2), ThetaFactor::new(b.clone(), 1, 2)],
            denominator: vec![ThetaFactor::new(d.clone(), 1, 2), ThetaFactor::new(&(&a * &b) / &d, 1, 2)],
            prefactor: c.one(),
            nome: Some(p.clone()),
        };
        assert_eq!(tr.quasi_period(), 2);
        assert!(balancing_check(&tr, &c));
        let z = vec![c.complex(0.9, 0.2)];
        assert!(ellipticity_check(&tr, &p, &z, &c).unwrap() < 1e-50);
    }

    #[test]
    fn term_matches_direct_factorials() {
        let c = ctx();
        let q = c.complex(0.9, 0.5);
        let p = c.complex(0.1, 0.2);
        let k = Kernel::new(&q, &p, &c).unwrap();
        let a = c.complex(1.2, 0.3);
        let b = c.complex(-0.4, 0.8);
        let ca = k.coeff(&a).unwrap();
        let cb = k.coeff(&b).unwrap();
        let t = Term::new().fac(&[(ca, 1)], 1, 1).fac_den_len(&[(cb, 0)], 2, 2, 2).qpow(1);
        let j = 3;
        let q2 = &q * &q;
        let p2 = &p * &p;
        let direct = &(&qp_factorial_multi(&[&a * &q], &q, &p, j, &c).unwrap()
            / &qp_factorial_multi(std::slice::from_ref(&b), &q2, &p2, 2 * j, &c).unwrap())
            * &q.powi(j as i64);
        assert!(rel_error(&t.eval(&k, j).unwrap(), &direct) < 1e-60);
    }

    #[test]
    fn drifting_terms_have_no_finite_ratio() {
        let c = ctx();
        let k = Kernel::new(&c.real(0.7), &c.real(0.1), &c).unwrap();
        let a = k.coeff(&c.real(1.3)).unwrap();
        assert!(Term::new().fac_drift(a, 0, -1, 2, 1).ratio(&k).is_none());
        assert!(Term::new().fac(&[(a, 0)], 1, 1).ratio(&k).is_some());
    }
}
