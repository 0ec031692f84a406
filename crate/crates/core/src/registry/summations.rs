//! Summation theorems S1–S6. The order symbol is `n` throughout.

use super::{Env, Side, SideForm, Variant};
use crate::error::Result;
use crate::series::Term;

/// The 10V9 sum. Balancing forces the last denominator parameter of the
/// left side to be `bcd q^{-n}/a`; the displayed formula has `/c`, kept as
/// the literal variant.
pub(super) fn s1(e: &Env, variant: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b, c, d) = (e.v("a")?, e.v("b")?, e.v("c")?, e.v("d")?);
    let ni = n as i64;
    let one = e.one();
    let ca = e.c(&a)?;
    match side {
        Side::Lhs => {
            let last = match variant {
                Variant::Literal => e.cr(&[&b, &c, &d], &[&c])?,
                Variant::Corrected => e.cr(&[&b, &c, &d], &[&a])?,
            };
            let sum = Term::new()
                .theta(ca, 0, 2, 1)
                .theta_den(ca, 0, 0, 1)
                .fac(&[(ca, 0), (e.c(&b)?, 0), (e.c(&c)?, 0), (e.c(&d)?, 0), (e.cr(&[&a, &a], &[&b, &c, &d])?, ni + 1), (one, -ni)], 1, 1)
                .fac_den(&[(one, 1), (e.cr(&[&a], &[&b])?, 1), (e.cr(&[&a], &[&c])?, 1), (e.cr(&[&a], &[&d])?, 1), (last, -ni), (ca, ni + 1)], 1, 1)
                .qpow(1);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let pre = Term::new()
                .fac(&[(ca, 1), (e.cr(&[&a], &[&b, &c])?, 1), (e.cr(&[&a], &[&b, &d])?, 1), (e.cr(&[&a], &[&c, &d])?, 1)], 1, 1)
                .fac_den(&[(e.cr(&[&a], &[&b])?, 1), (e.cr(&[&a], &[&c])?, 1), (e.cr(&[&a], &[&d])?, 1), (e.cr(&[&a], &[&b, &c, &d])?, 1)], 1, 1);
            Ok(SideForm::product(pre, n))
        }
    }
}

pub(super) fn s2(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let a2 = e.cr(&[&a, &a], &[])?;
    let a2b = e.cr(&[&a, &a], &[&b])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(a2, 0, 4, 2)
                .theta_den(a2, 0, 0, 2)
                .fac(&[(a2, 0), (e.c(&b)?, -1)], 2, 2)
                .fac(&[(e.cr(&[&a], &[&b])?, ni), (one, -ni)], 1, 1)
                .fac_den(&[(one, 2), (a2b, 3)], 2, 2)
                .fac_den(&[(e.c(&b)?, 1 - ni), (e.c(&a)?, 1 + ni)], 1, 1)
                .qpow(2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let mab = e.cr(&[&m1, &a], &[&b])?;
            let binv = e.cr(&[], &[&b])?;
            let pre = Term::new()
                .theta(mab, 0, 2, 1)
                .theta_den(mab, 0, 0, 1)
                .fac(&[(binv, -1)], 2, 2)
                .fac(&[(mab, 0), (e.c(&a)?, 1)], 1, 1)
                .fac_den(&[(a2b, 3)], 2, 2)
                .fac_den(&[(e.c(&m1)?, 1), (binv, 0)], 1, 1)
                .qpow(1);
            Ok(SideForm::product(pre, n))
        }
    }
}

pub(super) fn s3(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let ab = e.cr(&[&a, &b], &[])?;
    let ca = e.c(&a)?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(ab, 0, 4, 2)
                .theta_den(ab, 0, 0, 2)
                .fac(&[(ab, 0), (e.cr(&[&a], &[&b])?, 2), (e.cr(&[&a, &a], &[])?, 2 * ni), (one, -2 * ni)], 2, 2)
                .fac_len(&[(e.c(&b)?, 0)], 1, 1, 2)
                .pow(e.cr(&[&b], &[&a])?, 1)
                .qpow(1)
                .fac_den(&[(one, 2), (e.cr(&[&b, &b], &[])?, 0), (e.cr(&[&b], &[&a])?, 2 - 2 * ni), (ab, 2 + 2 * ni)], 2, 2)
                .fac_den_len(&[(ca, 1)], 1, 1, 2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let pre = Term::new()
                .theta(ca, 0, 0, 1)
                .theta_den(ca, 0, 2, 1)
                .fac(&[(ab, 2)], 2, 2)
                .fac(&[(e.c(&m1)?, 1), (e.cr(&[&a], &[&b])?, 1)], 1, 1)
                .qpow(-1)
                .fac_den(&[(e.cr(&[&a], &[&b])?, 0)], 2, 2)
                .fac_den(&[(ca, 0), (e.cr(&[&m1, &b], &[])?, 0)], 1, 1);
            Ok(SideForm::product(pre, n))
        }
    }
}

pub(super) fn s4(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let p = e.p().clone();
    let ni = n as i64;
    let one = e.one();
    let (ca, cb) = (e.c(&a)?, e.c(&b)?);
    match side {
        Side::Lhs => {
            let b2a = e.cr(&[&b, &b], &[&a])?;
            let sum = Term::new()
                .theta(cb, 0, 2, 1)
                .theta_den(cb, 0, 0, 1)
                .fac(&[(cb, 0), (one, -ni), (ca, ni), (e.cr(&[&a], &[&b])?, 1)], 1, 1)
                .fac_len(&[(b2a, 0)], 1, 2, 2)
                .qpow(1)
                .fac_den(&[(one, 1), (cb, ni + 1), (e.cr(&[&b], &[&a])?, 1 - ni), (b2a, 0)], 1, 1)
                .fac_den_len(&[(ca, 1)], 1, 2, 2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let pre = Term::new()
                .theta(ca, 0, 0, 2)
                .theta_den(ca, 0, 2, 2)
                .fac(&[(cb, 1)], 1, 1)
                .fac(&[(e.c(&p)?, 1), (e.cr(&[&a, &a], &[&b, &b])?, 1)], 1, 2)
                .fac_den(&[(e.cr(&[&a], &[&b])?, 0)], 1, 1)
                .fac_den(&[(ca, 0), (e.cr(&[&b, &b, &p], &[&a])?, 0)], 1, 2);
            Ok(SideForm::product(pre, n))
        }
    }
}

/// The right side carries the indicator of `n` being even.
pub(super) fn s5(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let ab = e.cr(&[&a, &b], &[])?;
    let a2 = e.cr(&[&a, &a], &[])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(ab, 0, 2, 2)
                .theta_den(ab, 0, 0, 2)
                .fac(&[(ab, 0), (e.cr(&[&a], &[&b])?, 1), (a2, ni + 1), (one, -ni)], 1, 2)
                .fac(&[(e.cr(&[&b, &b], &[])?, 0)], 2, 2)
                .pow(e.cr(&[&m1, &b], &[&a])?, 1)
                .fac_den(&[(one, 1), (e.cr(&[&b, &b], &[])?, 0), (e.cr(&[&b], &[&a])?, -ni), (ab, ni + 1)], 1, 2)
                .fac_den(&[(a2, 2)], 2, 2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            if n % 2 == 1 {
                return Ok(SideForm::zero());
            }
            // in the half order h = n/2
            let pre = Term::new()
                .fac_len(&[(ab, 1)], 1, 2, 2)
                .fac(&[(one, 1), (e.cr(&[&a, &a], &[&b, &b])?, 2)], 2, 2)
                .fac_den_len(&[(e.cr(&[&a], &[&b])?, 1)], 1, 2, 2)
                .fac_den(&[(a2, 2), (e.cr(&[&b, &b], &[])?, 1)], 2, 2);
            Ok(SideForm::product(pre, n / 2))
        }
    }
}

pub(super) fn s6(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (b, c) = (e.v("b")?, e.v("c")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let cb = e.c(&b)?;
    let cc = e.c(&c)?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(cb, 0, 2, 2)
                .theta_den(cb, 0, 0, 2)
                .fac(&[(e.cr(&[&b, &b], &[])?, 0)], 2, 2)
                .fac(&[(e.cr(&[&c], &[&b])?, 0), (e.cr(&[&b], &[&c])?, 1), (one, ni + 1), (one, -ni)], 1, 2)
                .pow(e.cr(&[&m1, &b], &[])?, 1)
                .fac_den(&[(one, 2)], 2, 2)
                .fac_den(&[(e.cr(&[&b, &b], &[&c])?, 1), (cc, 0), (cb, ni + 1), (cb, -ni)], 1, 2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let cb2 = e.cr(&[&c], &[&b, &b])?;
            let pre = Term::new()
                .fac(&[(cb, 1), (cb2, 0)], 1, 2)
                .fac_drift(cc, 0, -1, 2, 2)
                .pow(e.cr(&[&m1], &[&b])?, 1)
                .fac_den(&[(e.cr(&[], &[&b])?, 1), (cc, 0)], 1, 2)
                .fac_drift_den(cb2, 0, -1, 2, 2);
            Ok(SideForm::product(pre, n))
        }
    }
}
