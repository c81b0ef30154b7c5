use kreweras::series::{rat, Rat, TSeries, XPart};
use proptest::prelude::*;

const PREC: i64 = 8;

/// Random series with small rational coefficients, `x` exponents in `-2..=2`.
fn series(min_val: i64) -> impl Strategy<Value = TSeries> {
    prop::collection::vec((min_val..PREC, -2i64..=2, -5i64..=5, 1i64..=4), 0..8).prop_map(|terms| {
        let terms: Vec<(i64, i64, Rat)> = terms.into_iter().map(|(n, e, a, b)| (n, e, rat(a, b))).collect();
        TSeries::poly(&terms).truncate(PREC)
    })
}

/// Unit: constant term `c != 0` plus higher terms.
fn unit() -> impl Strategy<Value = TSeries> {
    (series(1), prop_oneof![1i64..=5, -5i64..=-1]).prop_map(|(s, c)| &s + &TSeries::constant(rat(c, 1)))
}

proptest! {
    #[test]
    fn addition_is_associative(a in series(0), b in series(0), c in series(0)) {
        let l = &(&a + &b) + &c;
        let r = &a + &(&b + &c);
        prop_assert!(l.check_eq(&r, PREC, "assoc").is_ok());
    }

    #[test]
    fn product_commutes_and_distributes(a in series(0), b in series(0), c in series(0)) {
        prop_assert!((&a * &b).check_eq(&(&b * &a), PREC, "comm").is_ok());
        let l = &a * &(&b + &c);
        let r = &(&a * &b) + &(&a * &c);
        prop_assert!(l.check_eq(&r, PREC, "dist").is_ok());
    }

    #[test]
    fn product_is_associative(a in series(0), b in series(0), c in series(0)) {
        let l = &(&a * &b) * &c;
        let r = &a * &(&b * &c);
        prop_assert!(l.check_eq(&r, PREC, "assoc").is_ok());
    }

    #[test]
    fn inverse_of_unit(u in unit()) {
        let inv = u.invert().unwrap();
        prop_assert!((&u * &inv).check_eq(&TSeries::one(), PREC, "u / u").is_ok());
    }

    #[test]
    fn sqrt_of_square(u in unit()) {
        let sq = &u * &u;
        let s = sq.sqrt().unwrap();
        prop_assert!((&s * &s).check_eq(&sq, PREC, "sqrt^2").is_ok());
        let pos = s.check_eq(&u, PREC, "s = u").is_ok();
        let neg = s.check_eq(&u.scale(&rat(-1, 1)), PREC, "s = -u").is_ok();
        prop_assert!(pos || neg);
    }

    #[test]
    fn x_parts_reassemble(a in series(0)) {
        let pos = a.x_part(XPart::Positive);
        let rest = a.x_part(XPart::NonPositive);
        prop_assert!((&pos + &rest).check_eq(&a, PREC, "split").is_ok());
        let neg = a.x_part(XPart::Negative);
        let nonneg = a.x_part(XPart::NonNegative);
        prop_assert!((&neg + &nonneg).check_eq(&a, PREC, "split").is_ok());
        prop_assert!(pos.x_range().is_none_or(|(lo, _)| lo > 0));
        prop_assert!(neg.x_range().is_none_or(|(_, hi)| hi < 0));
    }

    #[test]
    fn x_shift_round_trip(a in series(0), k in -3i64..=3) {
        prop_assert_eq!(a.shift_x(k).shift_x(-k), a);
    }
}
