//! Infinite lower-triangular operators: the matrix `M`, the inverse pairs
//! `(F, G)` and `(B, B⁻¹)`, and residual checks.
//!
//! Entries above the diagonal are zero by construction and never reach the
//! entry function. Entries are memoized per operator.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::numerics::{rel_error, CValue, NumericContext};
use crate::theta::{Coeff, Kernel};

type EntryFn = dyn Fn(usize, usize) -> Result<CValue> + Send + Sync;

/// A lazily evaluated lower-triangular matrix indexed from 0.
pub struct LowerTriangularOperator {
    name: String,
    params: Vec<(String, CValue)>,
    prec: u32,
    entry: Arc<EntryFn>,
    kernel: Option<Arc<Kernel>>,
    memo: Mutex<HashMap<(usize, usize), CValue>>,
}

impl fmt::Debug for LowerTriangularOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LowerTriangularOperator")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl LowerTriangularOperator {
    /// Operator with entries `entry(k, m)` for `m ≤ k`.
    pub fn new(
        name: impl Into<String>,
        params: Vec<(String, CValue)>,
        prec: u32,
        entry: impl Fn(usize, usize) -> Result<CValue> + Send + Sync + 'static,
    ) -> Self {
        LowerTriangularOperator {
            name: name.into(),
            params,
            prec,
            entry: Arc::new(entry),
            kernel: None,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn with_kernel(mut self, kernel: Arc<Kernel>) -> Self {
        self.kernel = Some(kernel);
        self
    }

    pub fn identity(prec: u32) -> Self {
        LowerTriangularOperator::new("I", Vec::new(), prec, move |k, m| {
            Ok(if k == m { CValue::one(prec) } else { CValue::zero(prec) })
        })
    }

    /// Finite operator from explicit rows; `rows[k][m]` for `m ≤ k`.
    /// Entries outside the given rows are an evaluation error.
    pub fn from_rows(name: impl Into<String>, rows: Vec<Vec<CValue>>, prec: u32) -> Self {
        let rows = Arc::new(rows);
        LowerTriangularOperator::new(name, Vec::new(), prec, move |k, m| {
            rows.get(k)
                .and_then(|r| r.get(m))
                .cloned()
                .ok_or_else(|| Error::Evaluation(format!("entry ({k}, {m}) outside the stored rows")))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, CValue)] {
        &self.params
    }

    pub fn entry(&self, k: usize, m: usize) -> Result<CValue> {
        if m > k {
            return Ok(CValue::zero(self.prec));
        }
        if let Some(v) = self.memo.lock().expect("entry memo").get(&(k, m)) {
            return Ok(v.clone());
        }
        let v = (self.entry)(k, m)?;
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("{} entry ({k}, {m}) is not finite", self.name)));
        }
        self.memo.lock().expect("entry memo").insert((k, m), v.clone());
        Ok(v)
    }

    /// Copy of the operator with entry `(k, m)` multiplied by `factor`.
    pub fn perturbed(&self, k: usize, m: usize, factor: CValue) -> Self {
        let inner = Arc::clone(&self.entry);
        let mut out = LowerTriangularOperator::new(
            format!("{}~", self.name),
            self.params.clone(),
            self.prec,
            move |i, j| {
                let v = inner(i, j)?;
                Ok(if (i, j) == (k, m) { &v * &factor } else { v })
            },
        );
        out.kernel = self.kernel.clone();
        out
    }

    /// Smallest modulus of a denominator theta factor met so far, for
    /// operators built on a theta kernel.
    pub fn min_denominator(&self) -> Option<f64> {
        self.kernel.as_ref().map(|k| k.min_denominator())
    }

    /// `max |entry(k, m)|` over `0 ≤ m ≤ k < n`.
    pub fn max_entry_magnitude(&self, n: usize) -> Result<f64> {
        let mut worst = 0f64;
        for k in 0..n {
            for m in 0..=k {
                worst = worst.max(self.entry(k, m)?.abs_f64());
            }
        }
        Ok(worst)
    }

    /// Dense `n × n` leading block.
    pub fn block(&self, n: usize) -> Result<Vec<Vec<CValue>>> {
        (0..n).map(|k| (0..=k).map(|m| self.entry(k, m)).collect()).collect()
    }
}

/// Inverse of the leading `n × n` block by forward substitution.
pub fn block_inverse(t: &LowerTriangularOperator, n: usize) -> Result<LowerTriangularOperator> {
    let block = t.block(n)?;
    let mut inv: Vec<Vec<CValue>> = Vec::with_capacity(n);
    for k in 0..n {
        let d = block[k][k].checked_recip()?;
        let mut row = Vec::with_capacity(k + 1);
        for m in 0..=k {
            if m == k {
                row.push(d.clone());
                continue;
            }
            // (T X)_{km} = 0 for m < k
            let mut s = CValue::zero(t.prec);
            for j in m..k {
                s += &(&block[k][j] * &inv[j][m]);
            }
            row.push(-(&s * &d));
        }
        inv.push(row);
    }
    Ok(LowerTriangularOperator::from_rows(format!("{}^-1", t.name), inv, t.prec))
}

/// `max_{0 ≤ m ≤ k < n} |∑_j F_{kj} G_{jm} - δ_{km}|`, taken over both
/// products `FG` and `GF`.
pub fn inverse_residual(
    f: &LowerTriangularOperator,
    g: &LowerTriangularOperator,
    n: usize,
    ctx: &NumericContext,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("inverse_residual needs N ≥ 1".into()));
    }
    let fb = f.block(n)?;
    let gb = g.block(n)?;
    let prec = ctx.precision_bits();
    let mut worst = 0f64;
    for (x, y) in [(&fb, &gb), (&gb, &fb)] {
        for k in 0..n {
            for m in 0..=k {
                let mut s = CValue::zero(prec);
                for j in m..=k {
                    s += &(&x[k][j] * &y[j][m]);
                }
                if k == m {
                    s -= &CValue::one(prec);
                }
                worst = worst.max(s.abs_f64());
            }
        }
    }
    Ok(worst)
}

fn binom2(n: usize) -> i64 {
    (n as i64) * (n as i64 - 1) / 2
}

struct Coeffs {
    kernel: Arc<Kernel>,
    one: Coeff,
}

impl Coeffs {
    fn new(q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<Self> {
        let kernel = Arc::new(Kernel::new(q, p, ctx)?);
        let one = kernel.coeff(&ctx.one())?;
        Ok(Coeffs { kernel, one })
    }

    fn c(&self, v: &CValue) -> Result<Coeff> {
        self.kernel.coeff(v)
    }
}

fn params(names: &[&str], values: &[&CValue]) -> Vec<(String, CValue)> {
    names.iter().zip(values).map(|(n, v)| (n.to_string(), (*v).clone())).collect()
}

/// `M_{km}(a, b; q, p) = (aq^k, q^{-k}; q, p)_m / (bq^{1-k}/a, bq^{1+k}; q, p)_m`.
pub fn m_matrix(a: &CValue, b: &CValue, q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<LowerTriangularOperator> {
    let cs = Coeffs::new(q, p, ctx)?;
    let ca = cs.c(a)?;
    let cb = cs.c(b)?;
    let cba = cs.c(&(b / a))?;
    let one = cs.one;
    let k = Arc::clone(&cs.kernel);
    let op = LowerTriangularOperator::new("M", params(&["a", "b", "q", "p"], &[a, b, q, p]), ctx.precision_bits(), move |row, m| {
        let r = row as i64;
        let num = &k.factorial(ca, r, 1, 1, m)? * &k.factorial(one, -r, 1, 1, m)?;
        let den = &k.factorial_den(cba, 1 - r, 1, 1, m)? * &k.factorial_den(cb, 1 + r, 1, 1, m)?;
        num.checked_div(&den)
    });
    Ok(op.with_kernel(cs.kernel))
}

/// A single entry `M_{km}(a, b; q, p)`.
pub fn m_entry(a: &CValue, b: &CValue, q: &CValue, p: &CValue, k: usize, m: usize, ctx: &NumericContext) -> Result<CValue> {
    m_matrix(a, b, q, p, ctx)?.entry(k, m)
}

/// `F_{km}(a, b)`:
/// `θ(aq^{2m}) (bq^k, q^{-k})_m (b/a)_k / (aq^{1+k}, aq^{1-k}/b)_m · (-a/b)^m q^{C(m+1,2)}`.
pub fn warnaar_f(a: &CValue, b: &CValue, q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<LowerTriangularOperator> {
    let cs = Coeffs::new(q, p, ctx)?;
    let (ca, cb, cba, cab, one) = (cs.c(a)?, cs.c(b)?, cs.c(&(b / a))?, cs.c(&(a / b))?, cs.one);
    let sign = -(a / b);
    let k = Arc::clone(&cs.kernel);
    let op = LowerTriangularOperator::new("F", params(&["a", "b", "q", "p"], &[a, b, q, p]), ctx.precision_bits(), move |row, m| {
        let r = row as i64;
        let mi = m as i64;
        let mut num = k.theta(ca, 2 * mi, 1)?;
        num *= &k.factorial(cb, r, 1, 1, m)?;
        num *= &k.factorial(one, -r, 1, 1, m)?;
        num *= &k.factorial(cba, 0, 1, 1, row)?;
        num *= &sign.powi(mi);
        num *= &k.qpow(binom2(m + 1));
        let den = &k.factorial_den(ca, 1 + r, 1, 1, m)? * &k.factorial_den(cab, 1 - r, 1, 1, m)?;
        num.checked_div(&den)
    });
    Ok(op.with_kernel(cs.kernel))
}

/// `G_{km}(a, b)`:
/// `θ(bq^{2m}) (aq^{m+1})_{k-1} (a/b)_k (q^{-k})_m / ((bq^{1-k}/a, q)_m (q)_k (bq^m)_{k+1})
/// · (-b/a)^k q^{m - C(k,2)}`.
///
/// The length `k - 1` factorial is read as `1/θ(aq^m)` at `k = 0`, the
/// value forced by `(GF)_{00} = 1`; only `(k, m) = (0, 0)` uses it.
pub fn warnaar_g(a: &CValue, b: &CValue, q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<LowerTriangularOperator> {
    let cs = Coeffs::new(q, p, ctx)?;
    let (ca, cb, cab, cba, one) = (cs.c(a)?, cs.c(b)?, cs.c(&(a / b))?, cs.c(&(b / a))?, cs.one);
    let sign = -(b / a);
    let k = Arc::clone(&cs.kernel);
    let op = LowerTriangularOperator::new("G", params(&["a", "b", "q", "p"], &[a, b, q, p]), ctx.precision_bits(), move |row, m| {
        let r = row as i64;
        let mi = m as i64;
        let mut num = k.theta(cb, 2 * mi, 1)?;
        if row == 0 {
            let t = k.theta_den(ca, mi, 1)?;
            num = num.checked_div(&t)?;
        } else {
            num *= &k.factorial(ca, mi + 1, 1, 1, row - 1)?;
        }
        num *= &k.factorial(cab, 0, 1, 1, row)?;
        num *= &k.factorial(one, -r, 1, 1, m)?;
        num *= &sign.powi(r);
        num *= &k.qpow(mi - binom2(row));
        let mut den = k.factorial_den(cba, 1 - r, 1, 1, m)?;
        den *= &k.factorial_den(one, 1, 1, 1, m)?;
        den *= &k.factorial_den(one, 1, 1, 1, row)?;
        den *= &k.factorial_den(cb, mi, 1, 1, row + 1)?;
        num.checked_div(&den)
    });
    Ok(op.with_kernel(cs.kernel))
}

/// `B_{km} = (b)_{k+m} (b/a)_{k-m} / ((aq)_{k+m} (q)_{k-m})`.
pub fn bressoud_b(a: &CValue, b: &CValue, q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<LowerTriangularOperator> {
    let cs = Coeffs::new(q, p, ctx)?;
    let (ca, cb, cba, one) = (cs.c(a)?, cs.c(b)?, cs.c(&(b / a))?, cs.one);
    let k = Arc::clone(&cs.kernel);
    let op = LowerTriangularOperator::new("B", params(&["a", "b", "q", "p"], &[a, b, q, p]), ctx.precision_bits(), move |row, m| {
        let num = &k.factorial(cb, 0, 1, 1, row + m)? * &k.factorial(cba, 0, 1, 1, row - m)?;
        let den = &k.factorial_den(ca, 1, 1, 1, row + m)? * &k.factorial_den(one, 1, 1, 1, row - m)?;
        num.checked_div(&den)
    });
    Ok(op.with_kernel(cs.kernel))
}

/// `B⁻¹_{km} = θ(aq^{2k}) θ(bq^{2m}) / (θ(a) θ(b)) · (a)_{m+k} (a/b)_{k-m}
/// / ((bq)_{m+k} (q)_{k-m}) · (b/a)^{k-m}`.
pub fn bressoud_b_inv(a: &CValue, b: &CValue, q: &CValue, p: &CValue, ctx: &NumericContext) -> Result<LowerTriangularOperator> {
    let cs = Coeffs::new(q, p, ctx)?;
    let (ca, cb, cab, one) = (cs.c(a)?, cs.c(b)?, cs.c(&(a / b))?, cs.one);
    let ratio = b / a;
    let k = Arc::clone(&cs.kernel);
    let op = LowerTriangularOperator::new("B^-1", params(&["a", "b", "q", "p"], &[a, b, q, p]), ctx.precision_bits(), move |row, m| {
        let (r, mi) = (row as i64, m as i64);
        let mut num = k.theta(ca, 2 * r, 1)?;
        num *= &k.theta(cb, 2 * mi, 1)?;
        num *= &k.factorial(ca, 0, 1, 1, m + row)?;
        num *= &k.factorial(cab, 0, 1, 1, row - m)?;
        num *= &ratio.powi(r - mi);
        let mut den = k.theta_den(ca, 0, 1)?;
        den *= &k.theta_den(cb, 0, 1)?;
        den *= &k.factorial_den(cb, 1, 1, 1, m + row)?;
        den *= &k.factorial_den(one, 1, 1, 1, row - m)?;
        num.checked_div(&den)
    });
    Ok(op.with_kernel(cs.kernel))
}

/// Largest deviation from 1 of the cross-ratio
/// `r(k,m) r(k',m') / (r(k,m') r(k',m))` with `r(k,m) = M_{km}(b,a) / B_{km}(a,b)`,
/// over `0 ≤ m < m' ≤ k < k' ≤ kmax`. A value near zero means `M(b, a)` is
/// `B(a, b)` up to left and right diagonal factors.
pub fn mb_cross_ratio_deviation(a: &CValue, b: &CValue, q: &CValue, p: &CValue, kmax: usize, ctx: &NumericContext) -> Result<f64> {
    let mm = m_matrix(b, a, q, p, ctx)?;
    let bb = bressoud_b(a, b, q, p, ctx)?;
    let mut r = vec![Vec::new(); kmax + 1];
    for (k, row) in r.iter_mut().enumerate() {
        for m in 0..=k {
            row.push(mm.entry(k, m)?.checked_div(&bb.entry(k, m)?)?);
        }
    }
    let one = ctx.one();
    let mut worst = 0f64;
    for k in 0..kmax {
        for k2 in k + 1..=kmax {
            for m in 0..=k {
                for m2 in m + 1..=k {
                    let x = &(&r[k][m] * &r[k2][m2]) / &(&r[k][m2] * &r[k2][m]);
                    worst = worst.max(rel_error(&x, &one));
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> NumericContext {
        NumericContext::default()
    }

    fn sample(c: &NumericContext) -> [CValue; 4] {
        [c.complex(0.9, 0.6), c.complex(-0.7, 1.2), c.complex(0.4, -0.8), c.complex(0.12, -0.07)]
    }

    #[test]
    fn identity_has_zero_residual() {
        let c = ctx();
        let i = LowerTriangularOperator::identity(256);
        assert_eq!(inverse_residual(&i, &i, 5, &c).unwrap(), 0.0);
    }

    #[test]
    fn triangularity_is_structural() {
        let op = LowerTriangularOperator::new("boom", Vec::new(), 256, |_, _| panic!("evaluated"));
        assert!(op.entry(2, 3).unwrap().is_zero());
    }

    #[test]
    fn f_first_column_and_g_origin() {
        let c = ctx();
        let [a, b, q, p] = sample(&c);
        let f = warnaar_f(&a, &b, &q, &p, &c).unwrap();
        let g = warnaar_g(&a, &b, &q, &p, &c).unwrap();
        let th_a = crate::theta::theta(&a, &p, &c).unwrap();
        let ba = crate::theta::qp_factorial(&crate::theta::FactorialArgs::new(&b / &a, q.clone(), p.clone(), 3), &c).unwrap();
        assert!(rel_error(&f.entry(3, 0).unwrap(), &(&th_a * &ba)) < 1e-60);
        assert!(rel_error(&(&f.entry(0, 0).unwrap() * &g.entry(0, 0).unwrap()), &c.one()) < 1e-60);
    }

    #[test]
    fn b_diagonal() {
        let c = ctx();
        let [a, b, q, p] = sample(&c);
        let op = bressoud_b(&a, &b, &q, &p, &c).unwrap();
        let num = crate::theta::qp_factorial(&crate::theta::FactorialArgs::new(b.clone(), q.clone(), p.clone(), 4), &c).unwrap();
        let den = crate::theta::qp_factorial(&crate::theta::FactorialArgs::new(&a * &q, q.clone(), p.clone(), 4), &c).unwrap();
        assert!(rel_error(&op.entry(2, 2).unwrap(), &(&num / &den)) < 1e-60);
    }

    #[test]
    fn inverse_pairs_small() {
        let c = ctx();
        let [a, b, q, p] = sample(&c);
        let f = warnaar_f(&a, &b, &q, &p, &c).unwrap();
        let g = warnaar_g(&a, &b, &q, &p, &c).unwrap();
        assert!(inverse_residual(&f, &g, 5, &c).unwrap() < 1e-50);
        let bb = bressoud_b(&a, &b, &q, &p, &c).unwrap();
        let bi = bressoud_b_inv(&a, &b, &q, &p, &c).unwrap();
        assert!(inverse_residual(&bb, &bi, 5, &c).unwrap() < 1e-50);
        let bad = f.perturbed(3, 1, c.real(1.0 + 1e-6));
        assert!(inverse_residual(&bad, &g, 5, &c).unwrap() >= 1e-7);
    }

    #[test]
    fn block_inverse_inverts() {
        let c = ctx();
        let rows = vec![
            vec![c.complex(1.5, 0.2)],
            vec![c.complex(0.3, -0.4), c.complex(0.9, 0.9)],
            vec![c.complex(-0.2, 0.1), c.complex(0.7, 0.0), c.complex(1.1, -0.5)],
        ];
        let t = LowerTriangularOperator::from_rows("T", rows, 256);
        let ti = block_inverse(&t, 3).unwrap();
        assert!(inverse_residual(&t, &ti, 3, &c).unwrap() < 1e-70);
    }

    #[test]
    fn m_and_b_differ_by_diagonal_factors() {
        let c = ctx();
        let [a, b, q, p] = sample(&c);
        assert!(mb_cross_ratio_deviation(&a, &b, &q, &p, 4, &c).unwrap() < 1e-50);
    }
}
