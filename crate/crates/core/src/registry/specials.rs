//! The `p = 0` identities P1–P3. The kernel nome is zero, so every theta
//! function is `1 - x` and the factorials are ordinary q-shifted ones.

use super::{Env, Side, SideForm, Variant};
use crate::error::Result;
use crate::series::Term;

/// `b = beta^2` and `q = gamma^2` so that `±sqrt(b)` and `±sqrt(bq)` are
/// plain slot values.
pub(super) fn p1(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, be, ga, c, d) = (e.v("a")?, e.v("beta")?, e.v("gamma")?, e.v("c")?, e.v("d")?);
    let b = &be * &be;
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let (ca, cc, cd) = (e.c(&a)?, e.c(&c)?, e.c(&d)?);
    let top = e.cr(&[&a, &a, &a], &[&b, &c, &d])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .theta(ca, 0, 2, 1)
                .theta_den(ca, 0, 0, 1)
                .fac(
                    &[
                        (ca, 0),
                        (one, -ni),
                        (e.cr(&[&a], &[&b])?, 1),
                        (cc, 0),
                        (cd, 0),
                        (e.c(&be)?, 0),
                        (e.cr(&[&m1, &be], &[])?, 0),
                        (e.cr(&[&be, &ga], &[])?, 0),
                        (e.cr(&[&m1, &be, &ga], &[])?, 0),
                        (top, 1 + ni),
                    ],
                    1,
                    1,
                )
                .fac_den(
                    &[
                        (one, 1),
                        (ca, 1 + ni),
                        (e.c(&b)?, 0),
                        (e.cr(&[&a], &[&c])?, 1),
                        (e.cr(&[&a], &[&d])?, 1),
                        (e.cr(&[&a], &[&be])?, 1),
                        (e.cr(&[&m1, &a], &[&be])?, 1),
                        (e.cr(&[&a, &ga], &[&be])?, 0),
                        (e.cr(&[&m1, &a, &ga], &[&be])?, 0),
                        (e.cr(&[&b, &c, &d], &[&a, &a])?, -ni),
                    ],
                    1,
                    1,
                )
                .qpow(1);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let pre = Term::new()
                .fac(&[(ca, 1), (e.cr(&[&a, &a], &[&b, &c])?, 1), (e.cr(&[&a, &a], &[&b, &d])?, 1), (e.cr(&[&a], &[&c, &d])?, 1)], 1, 1)
                .fac_den(&[(e.cr(&[&a, &a], &[&b])?, 1), (e.cr(&[&a], &[&c])?, 1), (e.cr(&[&a], &[&d])?, 1), (e.cr(&[&a, &a], &[&b, &c, &d])?, 1)], 1, 1);
            let sum = Term::new()
                .fac(&[(one, -ni), (cc, 0), (cd, 0), (top, 1 + ni), (e.cr(&[&a, &a], &[&b, &b])?, 1)], 1, 1)
                .fac_den(
                    &[
                        (e.cr(&[&a, &a], &[&b])?, 1 + ni),
                        (e.cr(&[&a, &a], &[&b, &c])?, 1),
                        (e.cr(&[&a, &a], &[&b, &d])?, 1),
                        (e.cr(&[&c, &d], &[&a])?, -ni),
                        (one, 1),
                    ],
                    1,
                    1,
                )
                .qpow(1);
            Ok(SideForm::sum(pre, sum, n))
        }
    }
}

pub(super) fn p2(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let ab = e.cr(&[&a, &b], &[])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .fac(&[(one, -ni), (e.c(&a)?, ni - 1), (e.cr(&[&b, &b], &[])?, 1)], 1, 1)
                .fac(&[(ab, 2)], 2, 1)
                .fac_den(&[(ab, 1 + ni), (e.c(&b)?, 2 - ni), (one, 1)], 1, 1)
                .fac_den(&[(ab, 0)], 2, 1)
                .qpow(1);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let a_b = e.cr(&[&a], &[&b])?;
            let pre = Term::new()
                .fac(&[(ab, 1), (e.c(&b)?, 0)], 1, 1)
                .fac(&[(a_b, -1), (a_b, 0)], 2, 1)
                .fac_den(&[(a_b, 0), (e.cr(&[], &[&b])?, -1)], 1, 1)
                .fac_den(&[(ab, 0), (ab, 1)], 2, 1);
            Ok(SideForm::product(pre, n))
        }
    }
}

/// The factor `(aq/b; q^2)_k` occurs on both sides of the fraction and is
/// kept as displayed.
pub(super) fn p3(e: &Env, _: Variant, n: usize, side: Side) -> Result<SideForm> {
    let (a, b) = (e.v("a")?, e.v("b")?);
    let ni = n as i64;
    let one = e.one();
    let m1 = e.m1();
    let a_b = e.cr(&[&a], &[&b])?;
    let ma_b = e.cr(&[&m1, &a], &[&b])?;
    let a2b2 = e.cr(&[&a, &a], &[&b, &b])?;
    let ma_b2 = e.cr(&[&m1, &a], &[&b, &b])?;
    match side {
        Side::Lhs => {
            let sum = Term::new()
                .fac(&[(one, -2 * ni), (ma_b, 2), (e.cr(&[&a, &a], &[&b, &b, &b, &b])?, 2), (e.cr(&[&m1, &a], &[])?, 2 * ni - 1), (a_b, 1)], 2, 1)
                .fac_den(&[(a2b2, 2 * ni + 2), (ma_b2, 3 - 2 * ni), (ma_b, 0), (a_b, 1), (one, 2)], 2, 1)
                .qpow(2);
            Ok(SideForm::sum(Term::new(), sum, n))
        }
        Side::Rhs => {
            let pre = Term::new()
                .fac(&[(ma_b2, 1), (a2b2, 2)], 2, 1)
                .fac_len(&[(e.c(&b)?, 0), (e.cr(&[&m1, &b], &[])?, -1)], 1, 1, 2)
                .fac_den(&[(e.cr(&[&b, &b], &[])?, 0), (e.cr(&[&m1, &b, &b], &[&a])?, -1)], 2, 1)
                .fac_den_len(&[(a_b, 1), (ma_b, 0)], 1, 1, 2);
            Ok(SideForm::product(pre, n))
        }
    }
}
