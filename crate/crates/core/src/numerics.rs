//! Configurable-precision complex arithmetic and the comparison metric used
//! by every verification.
//!
//! All real arithmetic is carried out by MPFR (through `rug`). A
//! [`NumericContext`] fixes the working precision together with the theta
//! truncation target, the pole-proximity threshold and the pass/fail
//! tolerance; exactly one context is used per run.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Precision, truncation and comparison policy governing all arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericContext {
    precision_bits: u32,
    theta_epsilon: f64,
    pole_delta: f64,
    rel_tolerance: f64,
}

impl NumericContext {
    pub const DEFAULT_PRECISION: u32 = 256;
    pub const MIN_PRECISION: u32 = 64;
    pub const MAX_PRECISION: u32 = 1000;
    pub const DEFAULT_POLE_DELTA: f64 = 1e-3;
    pub const DEFAULT_REL_TOLERANCE: f64 = 1e-30;

    /// Context at `precision_bits` with the remaining fields at their
    /// defaults. The theta truncation target scales with the precision so
    /// that it is exactly `1e-60` at 256 bits and always keeps the same
    /// ~57 bits of headroom above the arithmetic resolution.
    pub fn new(precision_bits: u32) -> Result<Self> {
        if !(Self::MIN_PRECISION..=Self::MAX_PRECISION).contains(&precision_bits) {
            return Err(Error::InvalidContext(format!(
                "precision_bits must lie in [{}, {}], got {precision_bits}",
                Self::MIN_PRECISION,
                Self::MAX_PRECISION
            )));
        }
        let ctx = NumericContext {
            precision_bits,
            theta_epsilon: default_theta_epsilon(precision_bits),
            pole_delta: Self::DEFAULT_POLE_DELTA,
            rel_tolerance: Self::DEFAULT_REL_TOLERANCE,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_theta_epsilon(mut self, theta_epsilon: f64) -> Result<Self> {
        self.theta_epsilon = theta_epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_pole_delta(mut self, pole_delta: f64) -> Result<Self> {
        self.pole_delta = pole_delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rel_tolerance(mut self, rel_tolerance: f64) -> Result<Self> {
        self.rel_tolerance = rel_tolerance;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let floor = 2f64.powi(-(self.precision_bits as i32));
        if !(self.theta_epsilon.is_finite() && self.theta_epsilon > 0.0 && self.theta_epsilon < 1.0)
        {
            return Err(Error::InvalidContext(format!(
                "theta_epsilon must lie in (0, 1), got {:e}",
                self.theta_epsilon
            )));
        }
        if self.theta_epsilon < floor {
            return Err(Error::InvalidContext(format!(
                "theta_epsilon {:e} is below the arithmetic resolution 2^-{}",
                self.theta_epsilon, self.precision_bits
            )));
        }
        if !(self.pole_delta.is_finite() && self.pole_delta > 0.0) {
            return Err(Error::InvalidContext(format!(
                "pole_delta must be positive, got {:e}",
                self.pole_delta
            )));
        }
        if !(self.rel_tolerance.is_finite() && self.rel_tolerance > 0.0) {
            return Err(Error::InvalidContext(format!(
                "rel_tolerance must be positive, got {:e}",
                self.rel_tolerance
            )));
        }
        Ok(())
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn theta_epsilon(&self) -> f64 {
        self.theta_epsilon
    }

    pub fn pole_delta(&self) -> f64 {
        self.pole_delta
    }

    pub fn rel_tolerance(&self) -> f64 {
        self.rel_tolerance
    }

    pub fn zero(&self) -> CValue {
        CValue::zero(self.precision_bits)
    }

    pub fn one(&self) -> CValue {
        CValue::one(self.precision_bits)
    }

    pub fn real(&self, re: f64) -> CValue {
        CValue::from_f64(re, 0.0, self.precision_bits)
    }

    pub fn complex(&self, re: f64, im: f64) -> CValue {
        CValue::from_f64(re, im, self.precision_bits)
    }

    /// Lifts `modulus * e^{i arg}` evaluated in double precision; the
    /// resulting value is exact at working precision.
    pub fn from_polar(&self, modulus: f64, arg: f64) -> CValue {
        self.complex(modulus * arg.cos(), modulus * arg.sin())
    }
}

impl Default for NumericContext {
    fn default() -> Self {
        NumericContext::new(Self::DEFAULT_PRECISION).expect("default context is valid")
    }
}

/// `1e-60 * 2^(256 - bits)`, clamped to the arithmetic resolution.
pub fn default_theta_epsilon(precision_bits: u32) -> f64 {
    let scaled = 1e-60 * 2f64.powi(256 - precision_bits as i32);
    scaled.max(2f64.powi(-(precision_bits as i32)))
}

/// A complex number with MPFR real and imaginary parts.
#[derive(Clone, PartialEq)]
pub struct CValue {
    pub(crate) re: Float,
    pub(crate) im: Float,
}

impl CValue {
    pub fn new(re: Float, im: Float) -> Self {
        CValue { re, im }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        CValue {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        CValue::from_f64(0.0, 0.0, prec)
    }

    pub fn one(prec: u32) -> Self {
        CValue::from_f64(1.0, 0.0, prec)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        let mut n = Float::with_val(prec, self.re.square_ref());
        n += Float::with_val(prec, self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> CValue {
        CValue {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    /// `1 / self`; non-finite when `self` is zero.
    pub fn recip(&self) -> CValue {
        let prec = self.prec();
        let d = self.norm_sqr();
        CValue {
            re: Float::with_val(prec, &self.re / &d),
            im: -Float::with_val(prec, &self.im / &d),
        }
    }

    pub fn checked_recip(&self) -> Result<CValue> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("reciprocal of zero".into()));
        }
        Ok(self.recip())
    }

    pub fn checked_div(&self, rhs: &CValue) -> Result<CValue> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero("complex division by zero".into()));
        }
        Ok(self / rhs)
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> CValue {
        let prec = self.prec();
        CValue {
            re: Float::with_val(prec, 1 - &self.re),
            im: Float::with_val(prec, -&self.im),
        }
    }

    /// Integer power by repeated squaring; `z^0 = 1` exactly.
    pub fn powi(&self, e: i64) -> CValue {
        let prec = self.prec();
        let mut result = CValue::one(prec);
        if e == 0 {
            return result;
        }
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result *= &base;
            }
            k >>= 1;
            if k > 0 {
                let sq = &base * &base;
                base = sq;
            }
        }
        result
    }

    /// Principal square root (branch cut along the negative real axis).
    pub fn sqrt(&self) -> CValue {
        let prec = self.prec();
        if self.is_zero() {
            return CValue::zero(prec);
        }
        let r = self.abs();
        // re = sqrt((r + x)/2), im = sign(y) sqrt((r - x)/2)
        let mut re = Float::with_val(prec, &r + &self.re);
        re /= 2;
        re.sqrt_mut();
        let mut im = Float::with_val(prec, &r - &self.re);
        im /= 2;
        im.sqrt_mut();
        if self.im.is_sign_negative() {
            im = -im;
        }
        CValue { re, im }
    }

    /// Multiplies by a real scalar.
    pub fn scale(&self, s: f64) -> CValue {
        let prec = self.prec();
        CValue {
            re: Float::with_val(prec, &self.re * s),
            im: Float::with_val(prec, &self.im * s),
        }
    }

    pub fn with_prec(&self, prec: u32) -> CValue {
        CValue {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    /// Binary exponent of the larger component, `None` for zero.
    pub(crate) fn magnitude_exp(&self) -> Option<i32> {
        match (self.re.get_exp(), self.im.get_exp()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }
}

impl fmt::Debug for CValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.20e} {:+.20e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for CValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64_pair();
        write!(f, "{re:e}{im:+e}i")
    }
}

impl<'a> Add<&'a CValue> for &'a CValue {
    type Output = CValue;
    fn add(self, rhs: &'a CValue) -> CValue {
        let prec = self.prec().max(rhs.prec());
        CValue {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a CValue> for &'a CValue {
    type Output = CValue;
    fn sub(self, rhs: &'a CValue) -> CValue {
        let prec = self.prec().max(rhs.prec());
        CValue {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a CValue> for &'a CValue {
    type Output = CValue;
    fn mul(self, rhs: &'a CValue) -> CValue {
        let prec = self.prec().max(rhs.prec());
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re -= Float::with_val(prec, &self.im * &rhs.im);
        let mut im = Float::with_val(prec, &self.re * &rhs.im);
        im += Float::with_val(prec, &self.im * &rhs.re);
        CValue { re, im }
    }
}

impl<'a> Div<&'a CValue> for &'a CValue {
    type Output = CValue;
    fn div(self, rhs: &'a CValue) -> CValue {
        let prec = self.prec().max(rhs.prec());
        let d = rhs.norm_sqr();
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re += Float::with_val(prec, &self.im * &rhs.im);
        re /= &d;
        let mut im = Float::with_val(prec, &self.im * &rhs.re);
        im -= Float::with_val(prec, &self.re * &rhs.im);
        im /= &d;
        CValue { re, im }
    }
}

impl Neg for &CValue {
    type Output = CValue;
    fn neg(self) -> CValue {
        CValue {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }
}

impl Neg for CValue {
    type Output = CValue;
    fn neg(mut self) -> CValue {
        self.re = -self.re;
        self.im = -self.im;
        self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<CValue> for CValue {
            type Output = CValue;
            fn $method(self, rhs: CValue) -> CValue {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a CValue> for CValue {
            type Output = CValue;
            fn $method(self, rhs: &'a CValue) -> CValue {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<CValue> for &'a CValue {
            type Output = CValue;
            fn $method(self, rhs: CValue) -> CValue {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl<'a> AddAssign<&'a CValue> for CValue {
    fn add_assign(&mut self, rhs: &'a CValue) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl<'a> SubAssign<&'a CValue> for CValue {
    fn sub_assign(&mut self, rhs: &'a CValue) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl<'a> MulAssign<&'a CValue> for CValue {
    fn mul_assign(&mut self, rhs: &'a CValue) {
        let prec = self.prec();
        let t = Float::with_val(prec, &self.re * &rhs.im);
        let u = Float::with_val(prec, &self.im * &rhs.im);
        self.re *= &rhs.re;
        self.re -= &u;
        self.im *= &rhs.re;
        self.im += &t;
    }
}

impl<'a> DivAssign<&'a CValue> for CValue {
    fn div_assign(&mut self, rhs: &'a CValue) {
        let q = &*self / rhs;
        *self = q;
    }
}

impl CValue {
    /// `self *= rhs` using caller-provided scratch space, allocation free.
    pub(crate) fn mul_assign_scratch(&mut self, rhs: &CValue, s: &mut [Float; 2]) {
        s[0].assign(&self.re * &rhs.im);
        s[1].assign(&self.im * &rhs.im);
        self.re *= &rhs.re;
        self.re -= &s[1];
        self.im *= &rhs.re;
        self.im += &s[0];
    }

    /// `self = x * y` reusing the storage of `self`.
    pub(crate) fn assign_mul(&mut self, x: &CValue, y: &CValue, s: &mut Float) {
        self.re.assign(&x.re * &y.re);
        s.assign(&x.im * &y.im);
        self.re -= &*s;
        self.im.assign(&x.re * &y.im);
        s.assign(&x.im * &y.re);
        self.im += &*s;
    }
}

impl MulAssign<CValue> for CValue {
    fn mul_assign(&mut self, rhs: CValue) {
        *self *= &rhs;
    }
}

impl DivAssign<CValue> for CValue {
    fn div_assign(&mut self, rhs: CValue) {
        *self /= &rhs;
    }
}

impl AddAssign<CValue> for CValue {
    fn add_assign(&mut self, rhs: CValue) {
        *self += &rhs;
    }
}

/// `|x - y| / max(|x|, |y|, 1)`.
///
/// The floor of 1 in the denominator keeps legitimately tiny sides (both
/// vanishing) from being reported as failures.
pub fn rel_error(x: &CValue, y: &CValue) -> f64 {
    let prec = x.prec().max(y.prec());
    let diff = (x - y).abs();
    let mut scale = Float::with_val(prec, 1);
    for m in [x.abs(), y.abs()] {
        if m > scale {
            scale.assign(&m);
        }
    }
    Float::with_val(prec, &diff / &scale).to_f64()
}

/// Product of `factors`, accumulated left to right while the running
/// modulus stays within `[2^(-P/2), 2^(P/2)]`. If it leaves that band the
/// product is recomputed by pairing the largest remaining factor with the
/// smallest one.
pub fn balanced_product(factors: &[CValue], prec: u32) -> CValue {
    let mut acc = CValue::one(prec);
    let bound = (prec / 2) as i32;
    let mut escaped = false;
    for f in factors {
        acc *= f;
        if let Some(e) = acc.magnitude_exp() {
            if e.abs() > bound {
                escaped = true;
                break;
            }
        } else {
            return acc;
        }
    }
    if !escaped {
        return acc;
    }

    let mut sorted: Vec<(i32, &CValue)> = factors
        .iter()
        .map(|f| (f.magnitude_exp().unwrap_or(i32::MIN), f))
        .collect();
    sorted.sort_by_key(|x| x.0);
    let mut lo = 0usize;
    let mut hi = sorted.len();
    let mut acc = CValue::one(prec);
    while lo < hi {
        let running = acc.magnitude_exp().unwrap_or(0);
        // pull from the small end when the running product is large, and
        // vice versa
        let take_small = match running.cmp(&0) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (hi - lo).is_multiple_of(2),
        };
        if take_small {
            acc *= sorted[lo].1;
            lo += 1;
        } else {
            hi -= 1;
            acc *= sorted[hi].1;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> NumericContext {
        NumericContext::default()
    }

    #[test]
    fn defaults_match_documented_values() {
        let c = ctx();
        assert_eq!(c.precision_bits(), 256);
        assert!((c.theta_epsilon() / 1e-60 - 1.0).abs() < 1e-12);
        assert_eq!(c.pole_delta(), 1e-3);
        assert_eq!(c.rel_tolerance(), 1e-30);
    }

    #[test]
    fn context_rejects_bad_fields() {
        assert!(NumericContext::new(32).is_err());
        assert!(ctx().with_theta_epsilon(1e-90).is_err());
        assert!(ctx().with_theta_epsilon(0.0).is_err());
        assert!(ctx().with_pole_delta(0.0).is_err());
        assert!(ctx().with_rel_tolerance(-1.0).is_err());
        assert!(ctx().with_theta_epsilon(1e-70).is_ok());
    }

    #[test]
    fn rel_error_of_identical_zeros_is_zero() {
        let c = ctx();
        assert_eq!(rel_error(&c.zero(), &c.zero()), 0.0);
    }

    #[test]
    fn rel_error_resolves_tiny_differences() {
        let c = ctx();
        let one = c.one();
        let tiny = Float::with_val(256, Float::parse("1e-40").unwrap());
        let other = CValue::new(Float::with_val(256, 1 + &tiny), Float::new(256));
        let e = rel_error(&one, &other);
        assert!((e / 1e-40 - 1.0).abs() < 1e-10, "{e:e}");
    }

    #[test]
    fn rel_error_is_scale_invariant_above_one() {
        let c = ctx();
        let eps = 1e-12;
        let x = c.real(1e6);
        let y = c.real(1e6 * (1.0 + eps));
        let e = rel_error(&x, &y);
        assert!((e / eps - 1.0).abs() < 1e-3, "{e:e}");
    }

    #[test]
    fn powi_handles_negative_and_zero_exponents() {
        let c = ctx();
        let z = c.complex(0.7, -1.3);
        assert_eq!(z.powi(0), c.one());
        let back = &z.powi(-5) * &z.powi(5);
        assert!(rel_error(&back, &c.one()) < 1e-70);
        let direct = &(&(&z * &z) * &z) * &z;
        assert!(rel_error(&z.powi(4), &direct) < 1e-70);
    }

    #[test]
    fn sqrt_is_principal() {
        let c = ctx();
        let z = c.complex(-3.0, -4.0);
        let s = z.sqrt();
        assert!(rel_error(&(&s * &s), &z) < 1e-70);
        assert!(s.re().to_f64() > 0.0);
    }

    #[test]
    fn division_round_trips() {
        let c = ctx();
        let a = c.complex(1.25, 3.5);
        let b = c.complex(-0.5, 0.75);
        let q = &a / &b;
        assert!(rel_error(&(&q * &b), &a) < 1e-70);
        assert!(a.checked_div(&c.zero()).is_err());
    }

    #[test]
    fn balanced_product_matches_plain_product_when_rebalancing() {
        let c = NumericContext::new(64).unwrap();
        // running modulus leaves [2^-32, 2^32] after the first few factors
        let mut factors = Vec::new();
        for i in 0..6 {
            factors.push(c.complex(1e12, 1.0 + i as f64));
            factors.push(c.complex(1e-12, 0.0));
        }
        let balanced = balanced_product(&factors, 64);
        let mut plain = c.one();
        for f in &factors {
            plain *= f;
        }
        assert!(rel_error(&balanced, &plain) < 1e-15);
    }
}
