use crystal_core::{PrecisionContext, TruncatedSeries};
use proptest::prelude::*;

const P: u64 = 3;
const N: u32 = 8;
const M: usize = 32;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(P, N, M).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<i128>> {
    prop::collection::vec(-10_000i128..10_000, 0..=M + 1)
}

/// Schoolbook product mod `p^N`, cut at `t^M`.
fn naive_product(a: &[i128], b: &[i128]) -> Vec<u64> {
    let m = (P as i128).pow(N);
    let mut out = vec![0i128; M + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= M {
                out[i + j] = (out[i + j] + x * y).rem_euclid(m);
            }
        }
    }
    out.into_iter().map(|c| c as u64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn product_matches_schoolbook(a in coeffs(), b in coeffs()) {
        let c = ctx();
        let prod = &TruncatedSeries::from_coeffs(c, &a) * &TruncatedSeries::from_coeffs(c, &b);
        prop_assert_eq!(prod.residues().to_vec(), naive_product(&a, &b));
    }

    #[test]
    fn ring_laws(a in coeffs(), b in coeffs(), d in coeffs()) {
        let c = ctx();
        let (x, y, z) = (
            TruncatedSeries::from_coeffs(c, &a),
            TruncatedSeries::from_coeffs(c, &b),
            TruncatedSeries::from_coeffs(c, &d),
        );
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn frobenius_is_a_ring_map(a in coeffs(), b in coeffs()) {
        let c = ctx();
        let (x, y) = (TruncatedSeries::from_coeffs(c, &a), TruncatedSeries::from_coeffs(c, &b));
        prop_assert_eq!((&x * &y).frobenius_pullback(), &x.frobenius_pullback() * &y.frobenius_pullback());
        prop_assert_eq!((&x + &y).frobenius_pullback(), &x.frobenius_pullback() + &y.frobenius_pullback());
    }

    #[test]
    fn leibniz_rule(a in coeffs(), b in coeffs()) {
        let c = ctx();
        let (x, y) = (TruncatedSeries::from_coeffs(c, &a), TruncatedSeries::from_coeffs(c, &b));
        let lhs = (&x * &y).derivative();
        let rhs = &x.derivative().scale_by(&y) + &y.derivative().scale_by(&x);
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn integration_inverts_derivative(a in coeffs()) {
        let c = ctx();
        let mut a = a;
        if let Some(x) = a.first_mut() {
            *x = 0;
        }
        let x = TruncatedSeries::from_coeffs(c, &a);
        let back = x.derivative().integrate().unwrap();
        let prec = back.context().precision();
        // loss is max v_p(k) over k <= M
        prop_assert_eq!(prec, N - 3);
        prop_assert_eq!(back, x.with_precision(prec).unwrap());
    }

    #[test]
    fn units_invert(a in coeffs(), u in 1i128..(P as i128)) {
        let c = ctx();
        let mut a = a;
        match a.first_mut() {
            Some(x) => *x = *x * P as i128 + u,
            None => a.push(u),
        }
        let x = TruncatedSeries::from_coeffs(c, &a);
        prop_assert_eq!(&x * &x.inverse().unwrap(), TruncatedSeries::one(c));
    }
}

#[test]
fn non_units_have_no_inverse() {
    let c = ctx();
    assert!(TruncatedSeries::from_coeffs(c, &[3, 1]).inverse().is_err());
    assert!(TruncatedSeries::monomial(c, 1, 1).inverse().is_err());
}
