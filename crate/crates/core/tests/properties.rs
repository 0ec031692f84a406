use ellverify_core::matrix::{block_inverse, inverse_residual, LowerTriangularOperator};
use ellverify_core::theta::{qp_factorial, theta, FactorialArgs};
use ellverify_core::{rel_error, CValue, NumericContext};
use proptest::prelude::*;

fn ctx() -> NumericContext {
    NumericContext::new(256).unwrap()
}

prop_compose! {
    fn annulus(lo: f64, hi: f64)(m in lo..hi, t in 0.0..std::f64::consts::TAU) -> CValue {
        ctx().from_polar(m, t)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theta_inversion(a in annulus(0.5, 2.0), p in annulus(0.01, 0.5)) {
        let c = ctx();
        let lhs = theta(&a, &p, &c).unwrap();
        let rhs = -(&a * &theta(&a.recip(), &p, &c).unwrap());
        prop_assert!(rel_error(&lhs, &rhs) < 1e-50);
    }

    #[test]
    fn theta_nome_shift(a in annulus(0.5, 2.0), p in annulus(0.01, 0.5)) {
        let c = ctx();
        let lhs = theta(&(&p * &a), &p, &c).unwrap();
        let rhs = -(&theta(&a, &p, &c).unwrap() / &a);
        prop_assert!(rel_error(&lhs, &rhs) < 1e-50);
    }

    #[test]
    fn factorial_splits(a in annulus(0.5, 2.0), q in annulus(0.5, 2.0), p in annulus(0.05, 0.3), m in 0usize..5, k in 0usize..5) {
        let c = ctx();
        let whole = qp_factorial(&FactorialArgs::new(a.clone(), q.clone(), p.clone(), m + k), &c).unwrap();
        let head = qp_factorial(&FactorialArgs::new(a.clone(), q.clone(), p.clone(), m), &c).unwrap();
        let tail = qp_factorial(&FactorialArgs::new(&a * &q.powi(m as i64), q, p, k), &c).unwrap();
        prop_assert!(rel_error(&whole, &(&head * &tail)) < 1e-50);
    }

    #[test]
    fn rel_error_is_symmetric_and_scale_free(x in annulus(1.0, 4.0), y in annulus(1.0, 4.0), s in annulus(1.0, 8.0)) {
        prop_assert_eq!(rel_error(&x, &y), rel_error(&y, &x));
        let scaled = rel_error(&(&s * &x), &(&s * &y));
        prop_assert!((scaled - rel_error(&x, &y)).abs() <= 1e-60 + 1e-12 * scaled);
        prop_assert_eq!(rel_error(&x, &x), 0.0);
    }

    #[test]
    fn forward_substitution_inverts(entries in prop::collection::vec((0.5f64..2.0, 0.0..std::f64::consts::TAU), 21)) {
        let c = ctx();
        let mut it = entries.into_iter();
        let rows: Vec<Vec<CValue>> = (0..6).map(|k| (0..=k).map(|_| { let (m, t) = it.next().unwrap(); c.from_polar(m, t) }).collect()).collect();
        let t = LowerTriangularOperator::from_rows("T", rows, 256);
        let ti = block_inverse(&t, 6).unwrap();
        prop_assert!(inverse_residual(&t, &ti, 6, &c).unwrap() < 1e-60);
    }
}
