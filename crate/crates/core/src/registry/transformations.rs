//! Transformation formulas T1–T8. Left sums run over `j`, right sums over
//! `k`; both are written in the index of the term.

use super::{Env, Side, SideForm, Variant};
use crate::error::Result;
use crate::series::Term;

pub(super) fn t1(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b, c, d) = (e.v("a")?, e.v("b")?, e.v("c")?, e.v("d")?);
    let ni = n as i64;
    let one = e.one();
    let (ca, cb, cd) = (e.c(&a)?, e.c(&b)?, e.c(&d)?);
    let top = [(cb, ni), (one, -ni), (cd, 0), (e.cr(&[&a, &a], &[&b, &c, &d])?, 1)];
    let a2c = e.cr(&[&a, &a], &[&c])?;
    match side {
        Side::Lhs => {
            let a2 = e.cr(&[&a, &a], &[])?;
            let sum = Term::new()
                .theta(a2, 0, 4, 2)
                .theta_den(a2, 0, 0, 2)
                .fac(&top, 1, 1)
                .fac(&[(a2, 0), (e.c(&c)?, -1)], 2, 2)
                .fac_den(&[(e.cr(&[&a], &[&b])?, 1 - ni), (ca, 1 + ni), (e.cr(&[&a], &[&d])?, 1), (e.cr(&[&b, &c, &d], &[&a])?, 0)], 1, 1)
                .fac_den(&[(one, 2), (a2c, 3)], 2, 2)
                .qpow(2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let pre = Term::new()
                .fac(&[(e.cr(&[&b, &c], &[&a])?, 0), (e.cr(&[&a], &[&c, &d])?, 1), (ca, 1), (e.cr(&[&b, &d], &[&a])?, 0)], 1, 1)
                .fac_den(&[(e.cr(&[&a], &[&c])?, 1), (e.cr(&[&b, &c, &d], &[&a])?, 0), (e.cr(&[&b], &[&a])?, 0), (e.cr(&[&a], &[&d])?, 1)], 1, 1);
            let ac2 = e.cr(&[&a, &a], &[&c, &c])?;
            let sum = Term::new()
                .theta(ac2, 0, 4, 2)
                .theta_den(ac2, 0, 0, 2)
                .fac(&[(ac2, 0), (e.cr(&[], &[&c])?, -1)], 2, 2)
                .fac_den(&[(one, 2), (a2c, 3)], 2, 2)
                .fac(&top, 1, 1)
                .fac_den(&[(e.cr(&[&a], &[&b, &c])?, 1 - ni), (e.cr(&[&a], &[&c])?, 1 + ni), (e.cr(&[&a], &[&c, &d])?, 1), (e.cr(&[&b, &d], &[&a])?, 0)], 1, 1)
                .qpow(2);
            Ok(SideForm::sum(pre, sum, n))
        }
    }
}

/// The right sum has the index-dependent factorial `(ad q^{-k}; q^2, p)_k`.
pub(super) fn t2(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b, c, d) = (e.v("a")?, e.v("b")?, e.v("c")?, e.v("d")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let (ca, cb, cc, cd) = (e.c(&a)?, e.c(&b)?, e.c(&c)?, e.c(&d)?);
    let abc = e.cr(&[&a], &[&b, &c])?;
    let bc = e.cr(&[&b, &c], &[])?;
    let ad = e.cr(&[&a, &d], &[])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(ca, 0, 2, 1)
                .theta_den(ca, 0, 0, 1)
                .fac(&[(cb, ni), (one, -ni), (cc, 0), (cd, 0), (abc, 2), (e.cr(&[], &[&d])?, 1)], 1, 1)
                .fac(&[(e.cr(&[&a, &a], &[])?, 0)], 2, 1)
                .pow(e.cr(&[&m1, &a], &[])?, 1)
                .fac_den(&[(e.cr(&[&a], &[&b])?, 1 - ni), (ca, 1 + ni), (e.cr(&[&a], &[&c])?, 1), (ad, 0), (bc, -1), (e.cr(&[&a], &[&d])?, 1)], 1, 1)
                .fac_den(&[(one, 2)], 2, 1);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let bca = e.cr(&[&b, &c], &[&a])?;
            let cinv = e.cr(&[], &[&c])?;
            let da = e.cr(&[&d], &[&a])?;
            let pre = Term::new()
                .fac(&[(ca, 1), (cb, -1), (cinv, 2), (bca, 0)], 1, 1)
                .fac_den(&[(one, 2), (e.cr(&[&b], &[&a])?, 0), (bc, -1), (e.cr(&[&a], &[&c])?, 1)], 1, 1);
            let sum = Term::new()
                .theta(one, 1, 2, 1)
                .theta_den(one, 1, 0, 1)
                .fac_drift(ad, 0, -1, 2, 1)
                .fac_drift_den(da, 0, -1, 2, 1)
                .fac(&[(cb, ni), (one, -ni), (cc, 0), (abc, 2), (da, 0)], 1, 1)
                .fac_den(&[(e.cr(&[], &[&b])?, 2 - ni), (one, 2 + ni), (cinv, 2), (bca, 0), (ad, 0)], 1, 1)
                .pow(e.cr(&[&m1], &[&a])?, 1)
                .qpow(1);
            Ok(SideForm::sum(pre, sum, n))
        }
    }
}

pub(super) fn t3(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b, c, d) = (e.v("a")?, e.v("b")?, e.v("c")?, e.v("d")?);
    let p = e.p().clone();
    let ni = n as i64;
    let one = e.one();
    let (ca, cb, cc, cd) = (e.c(&a)?, e.c(&b)?, e.c(&c)?, e.c(&d)?);
    let abcd = e.cr(&[&a, &b], &[&c, &d])?;
    match side {
        Side::Lhs => {
            let a2b = e.cr(&[&a, &a], &[&b])?;
            let sum = Term::new()
                .theta(ca, 0, 2, 1)
                .theta_den(ca, 0, 0, 1)
                .fac(&[(ca, 0), (cc, ni), (one, -ni), (e.cr(&[&b], &[&a])?, 1), (abcd, 1), (cd, 0)], 1, 1)
                .fac_len(&[(a2b, 0)], 1, 2, 2)
                .fac_den(&[(one, 1), (e.cr(&[&a], &[&c])?, 1 - ni), (ca, 1 + ni), (a2b, 0), (e.cr(&[&c, &d], &[&b])?, 0), (e.cr(&[&a], &[&d])?, 1)], 1, 1)
                .fac_den_len(&[(cb, 1)], 1, 2, 2)
                .qpow(1);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let pre = Term::new()
                .fac(&[(e.cr(&[&c], &[&b])?, 0), (ca, 1), (e.cr(&[&c, &d], &[&a])?, 0), (e.cr(&[&b], &[&d])?, 1)], 1, 1)
                .fac_den(&[(cb, 1), (e.cr(&[&c], &[&a])?, 0), (e.cr(&[&a], &[&d])?, 1), (e.cr(&[&c, &d], &[&b])?, 0)], 1, 1);
            let bp = e.cr(&[&b, &p], &[])?;
            let sum = Term::new()
                .theta(bp, 0, 2, 2)
                .theta_den(bp, 0, 0, 2)
                .fac(&[(bp, 0), (e.cr(&[&b, &b], &[&a, &a])?, 1)], 1, 2)
                .fac_den(&[(one, 1), (e.cr(&[&a, &a, &p], &[&b])?, 0)], 1, 2)
                .fac(&[(cc, ni), (one, -ni), (abcd, 1), (cd, 0)], 1, 1)
                .fac_den(&[(e.cr(&[&b], &[&c])?, 1 - ni), (cb, 1 + ni), (e.cr(&[&c, &d], &[&a])?, 0), (e.cr(&[&b], &[&d])?, 1)], 1, 1)
                .qpow(1);
            Ok(SideForm::sum(pre, sum, n))
        }
    }
}

/// Common prefactor of the right sides of T4–T6:
/// `θ(-b)(-q, b/a; q,p)_n (abq^3; q^2,p^2)_n / (θ(-bq^{2n})(-b, aq; q,p)_n (b/aq; q^2,p^2)_n) q^{-n}`.
fn quadratic_prefactor(e: &Env) -> Result<Term> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let m1 = e.m1();
    let mb = e.cr(&[&m1, &b], &[])?;
    let ba = e.cr(&[&b], &[&a])?;
    Ok(Term::new()
        .theta(mb, 0, 0, 1)
        .fac(&[(e.c(&m1)?, 1), (ba, 0)], 1, 1)
        .fac(&[(e.cr(&[&a, &b], &[])?, 3)], 2, 2)
        .theta_den(mb, 0, 2, 1)
        .fac_den(&[(mb, 0), (e.c(&a)?, 1)], 1, 1)
        .fac_den(&[(ba, -1)], 2, 2)
        .qpow(-1))
}

pub(super) fn t4(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let a3b = e.cr(&[&a, &a, &a, &b], &[])?;
    match side {
        Side::Lhs => {
            let a2b2 = e.cr(&[&a, &a, &b, &b], &[])?;
            let sum = Term::new()
                .theta(a2b2, 2, 8, 4)
                .theta_den(a2b2, 2, 0, 4)
                .fac(&[(e.cr(&[&b, &b], &[])?, 2 * ni), (one, -2 * ni)], 2, 2)
                .fac(&[(a2b2, 2), (e.cr(&[&b], &[&a])?, -1)], 4, 4)
                .fac_len(&[(e.cr(&[&m1, &a], &[])?, 1)], 1, 1, 2)
                .fac_den(&[(e.cr(&[&a], &[&b])?, 3 - 2 * ni), (e.cr(&[&a, &b], &[])?, 3 + 2 * ni)], 2, 2)
                .fac_den(&[(one, 4), (a3b, 7)], 4, 4)
                .fac_den_len(&[(e.cr(&[&m1, &b], &[])?, 1)], 1, 1, 2)
                .pow(e.cr(&[&a], &[&b])?, 1)
                .qpow(4);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let a4 = e.cr(&[&a, &a, &a, &a], &[])?;
            let sum = Term::new()
                .theta(a4, 0, 8, 4)
                .theta_den(a4, 0, 0, 4)
                .fac(&[(e.c(&b)?, ni), (one, -ni)], 1, 1)
                .fac(&[(a4, 0), (e.cr(&[&a], &[&b])?, -3)], 4, 4)
                .fac_den(&[(e.cr(&[&a], &[&b])?, 1 - ni), (e.c(&a)?, 1 + ni)], 1, 1)
                .fac_den(&[(one, 4), (a3b, 7)], 4, 4)
                .qpow(4);
            Ok(SideForm::sum(quadratic_prefactor(e)?, sum, n))
        }
    }
}

pub(super) fn t5(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let (ca, cb) = (e.c(&a)?, e.c(&b)?);
    let ab = e.cr(&[&a, &b], &[])?;
    let a_b = e.cr(&[&a], &[&b])?;
    let mb = e.cr(&[&m1, &b], &[])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(ab, 1, 4, 2)
                .theta_den(ab, 1, 0, 2)
                .fac(&[(e.cr(&[&b, &b], &[])?, 2 * ni), (one, -2 * ni), (a_b, 1), (ab, 1)], 2, 2)
                .fac_len(&[(e.cr(&[&m1, &a], &[])?, 1), (cb, 1)], 1, 1, 2)
                .fac_den(&[(a_b, 3 - 2 * ni), (ab, 3 + 2 * ni), (e.cr(&[&b, &b], &[])?, 2), (one, 2)], 2, 2)
                .fac_den_len(&[(mb, 1), (ca, 1)], 1, 1, 2)
                .qpow(2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let ma = e.cr(&[&m1, &a], &[])?;
            let sum = Term::new()
                .theta(ma, 0, 2, 1)
                .theta_den(ma, 0, 0, 1)
                .fac(&[(ma, 0), (cb, ni), (one, -ni), (a_b, 0)], 1, 1)
                .fac_den(&[(one, 1), (a_b, 1 - ni), (ca, 1 + ni), (mb, 1)], 1, 1)
                .qpow(1);
            Ok(SideForm::sum(quadratic_prefactor(e)?, sum, n))
        }
    }
}

pub(super) fn t6(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let ab = e.cr(&[&a, &b], &[])?;
    let a_b = e.cr(&[&a], &[&b])?;
    let b2 = e.cr(&[&b, &b], &[])?;
    let a2 = e.cr(&[&a, &a], &[])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(ab, 1, 4, 2)
                .theta_den(ab, 1, 0, 2)
                .fac(&[(b2, 2 * ni), (one, -2 * ni), (a_b, -1), (ab, 1)], 2, 2)
                .fac_len(&[(e.cr(&[&m1, &a], &[])?, 1)], 1, 1, 2)
                .fac(&[(b2, 4)], 4, 2)
                .fac_den(&[(a_b, 3 - 2 * ni), (ab, 3 + 2 * ni), (b2, 4), (one, 2)], 2, 2)
                .fac_den_len(&[(e.cr(&[&m1, &b], &[])?, 1)], 1, 1, 2)
                .fac_den(&[(a2, 2)], 4, 2)
                .pow(e.c(&m1)?, 1)
                .qpow(3);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let sum = Term::new()
                .theta(a2, 0, 8, 2)
                .theta_den(a2, 0, 0, 2)
                .fac_len(&[(e.c(&b)?, ni), (one, -ni)], 1, 1, 2)
                .fac(&[(a2, 0), (e.cr(&[&a, &a], &[&b, &b])?, -2)], 4, 2)
                .fac_den_len(&[(a_b, 1 - ni), (e.c(&a)?, 1 + ni)], 1, 1, 2)
                .fac_den(&[(one, 4), (b2, 6)], 4, 2)
                .qpow(4);
            Ok(SideForm::sum(quadratic_prefactor(e)?, sum, n))
        }
    }
}

/// The right sum has the index-dependent factorials
/// `(bq^{1-2k}; q^4, p^2)_k` and `(bq^{1-2k}/a^2; q^4, p^2)_k`.
pub(super) fn t7(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let (ca, cb) = (e.c(&a)?, e.c(&b)?);
    let cm1 = e.c(&m1)?;
    match side {
        Side::Lhs => {
            let a2 = e.cr(&[&a, &a], &[])?;
            let sum = Term::new()
                .theta(ca, 0, 4, 2)
                .theta_den(ca, 0, 0, 2)
                .fac(&[(a2, 2 * ni - 4), (one, -2 * ni), (e.cr(&[&a], &[&b])?, 1), (e.cr(&[&b], &[&a])?, 1)], 2, 2)
                .fac_len(&[(cm1, 2)], 1, 1, 2)
                .fac(&[(a2, 0)], 4, 2)
                .fac_den(&[(e.cr(&[], &[&a])?, 6 - 2 * ni), (ca, 2 * ni + 2), (cb, 1), (e.cr(&[&a, &a], &[&b])?, 1)], 2, 2)
                .fac_den_len(&[(e.cr(&[&m1, &a], &[])?, -1)], 1, 1, 2)
                .fac_den(&[(one, 4)], 4, 2)
                .pow(cm1, 1)
                .qpow(3);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let ma = e.cr(&[&m1, &a], &[])?;
            let pre = Term::new()
                .theta(ma, -2, 0, 1)
                .fac(&[(cm1, 1), (ca, -3)], 1, 1)
                .fac(&[(ca, 2)], 2, 2)
                .theta_den(ma, -2, 2, 1)
                .fac_den(&[(ma, -2), (one, 2)], 1, 1)
                .fac_den(&[(ca, -4)], 2, 2)
                .qpow(-1);
            let ba2 = e.cr(&[&b], &[&a, &a])?;
            let sum = Term::new()
                .theta(one, 2, 4, 2)
                .theta_den(one, 2, 0, 2)
                .fac(&[(ca, ni - 2), (one, -ni)], 1, 1)
                .fac(&[(ba2, 1)], 2, 2)
                .fac_drift(cb, 1, -2, 4, 2)
                .fac_den(&[(e.cr(&[], &[&a])?, 4 - ni), (one, ni + 2)], 1, 1)
                .fac_den(&[(cb, 1)], 2, 2)
                .fac_drift_den(ba2, 1, -2, 4, 2)
                .pow(e.cr(&[&m1], &[&a])?, 1)
                .qpow(2);
            Ok(SideForm::sum(pre, sum, n))
        }
    }
}

pub(super) fn t8(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let p = e.p().clone();
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let ca = e.c(&a)?;
    match side {
        Side::Lhs => {
            let a2b2 = e.cr(&[&a, &a], &[&b, &b])?;
            let sum = Term::new()
                .theta(ca, 0, 4, 2)
                .theta_den(ca, 0, 0, 2)
                .fac(&[(ca, 0), (a2b2, 2 * ni - 2), (one, -2 * ni), (e.cr(&[&b, &b], &[&a])?, 2)], 2, 2)
                .fac_len(&[(a2b2, 0)], 2, 4, 2)
                .fac_len(&[(e.cr(&[&m1, &b], &[])?, 1)], 1, 1, 2)
                .fac_den(&[(one, 2), (e.cr(&[&b, &b], &[&a])?, 4 - 2 * ni), (ca, 2 * ni + 2), (a2b2, 0)], 2, 2)
                .fac_den_len(&[(e.cr(&[&b, &b], &[])?, 2)], 2, 4, 2)
                .fac_den_len(&[(e.cr(&[&m1, &a], &[&b])?, 0)], 1, 1, 2)
                .pow(e.cr(&[&b, &b], &[&a])?, 1)
                .qpow(3);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let mab = e.cr(&[&m1, &a], &[&b])?;
            let pre = Term::new()
                .theta(mab, -1, 0, 1)
                .fac(&[(e.c(&m1)?, 1), (e.cr(&[&a], &[&b, &b])?, -1)], 1, 1)
                .fac(&[(ca, 2)], 2, 2)
                .theta_den(mab, -1, 2, 1)
                .fac_den(&[(mab, -1), (e.c(&b)?, 1)], 1, 1)
                .fac_den(&[(e.cr(&[&a], &[&b, &b])?, -2)], 2, 2)
                .qpow(-1);
            let b2p2 = e.cr(&[&b, &b, &p, &p], &[])?;
            let sum = Term::new()
                .theta(b2p2, 0, 4, 4)
                .theta_den(b2p2, 0, 0, 4)
                .fac(&[(e.cr(&[&a], &[&b])?, ni - 1), (one, -ni)], 1, 1)
                .fac(&[(b2p2, 0), (e.cr(&[&b, &b, &b, &b], &[&a, &a])?, 2)], 2, 4)
                .fac_den(&[(e.cr(&[&b, &b], &[&a])?, 2 - ni), (e.c(&b)?, ni + 1)], 1, 1)
                .fac_den(&[(one, 2), (e.cr(&[&a, &a, &p, &p], &[&b, &b])?, 0)], 2, 4)
                .qpow(2);
            Ok(SideForm::sum(pre, sum, n))
        }
    }
}
