use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::slopes::{charpoly, constant_lift, newton_polygon_slopes, valuation};
use super::{FCrystalPresentation, SlopeMultiset};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic_series::{PrecisionContext, TruncatedSeries};

/// Internal hom `Hom(c1, c2)` twisted by `p^twist`, on the basis
/// `e*_i (x) f_j` with index `i * r2 + j`.
///
/// Frobenius is `p^twist (F1^{-T} (x) F2)`, with `F1^{-1}` taken over the
/// fraction field; `c1` must have constant Frobenius. The connection is
/// `-A1^T (x) 1 + 1 (x) A2`. When `G1` is constant and perfect the pairing
/// is `G1^{-1} (x) G2` of weight `2 twist + w2 - w1`, otherwise it is zero.
pub fn hom_crystal(
    c1: &FCrystalPresentation,
    c2: &FCrystalPresentation,
    twist: i64,
) -> Result<FCrystalPresentation> {
    let ctx = c1.context();
    if c2.context() != ctx {
        return Err(Error::ContextMismatch);
    }
    if !c1.frobenius().is_constant() {
        return Err(Error::NotConstant("Frobenius of the source depends on t".into()));
    }
    let (r1, r2) = (c1.rank(), c2.rank());
    let inv = rational_inverse(constant_lift(c1.frobenius())).ok_or(Error::NonInvertible)?;
    let p = ctx.p();

    let required = inv
        .iter()
        .flatten()
        .filter(|x| !x.is_zero())
        .map(|x| -valuation(x, p))
        .max()
        .unwrap_or(0);
    if twist < required {
        return Err(Error::TwistTooSmall { twist, required });
    }
    let scale = p_power(p, twist);
    let dual_f = SeriesMatrix::from_fn(ctx, r1, r1, |i, j| {
        reduce_rational(ctx, &(&inv[j][i] * &scale))
    });
    let frobenius = dual_f.kronecker(c2.frobenius());

    let id1 = SeriesMatrix::identity(ctx, r1);
    let id2 = SeriesMatrix::identity(ctx, r2);
    let connection = &id1.kronecker(c2.connection()) - &c1.connection().transpose().kronecker(&id2);

    let weight = 2 * twist + c2.weight() as i64 - c1.weight() as i64;
    let g1 = c1.pairing();
    let pairing_inverse = if g1.is_constant() && g1.det_mod_p() != 0 && weight >= 0 {
        rational_inverse(constant_lift(g1))
    } else {
        None
    };
    let (pairing, weight) = match pairing_inverse {
        Some(gi) => {
            let gi = SeriesMatrix::from_fn(ctx, r1, r1, |i, j| reduce_rational(ctx, &gi[i][j]));
            (gi.kronecker(c2.pairing()), weight as u32)
        }
        None => (SeriesMatrix::zeros(ctx, r1 * r2, r1 * r2), weight.max(0) as u32),
    };
    FCrystalPresentation::new(frobenius, connection, pairing, weight)
}

/// Slopes of `Hom(c1, c2)` twisted by `p^twist`, computed over the
/// rationals so that negative twists and non-integral Frobenius are allowed.
pub fn hom_slopes(
    c1: &FCrystalPresentation,
    c2: &FCrystalPresentation,
    twist: i64,
) -> Result<SlopeMultiset> {
    if c1.context() != c2.context() {
        return Err(Error::ContextMismatch);
    }
    for c in [c1, c2] {
        if !c.is_constant() {
            return Err(Error::NotConstant("hom slopes need constant inputs".into()));
        }
    }
    let p = c1.context().p();
    let inv = rational_inverse(constant_lift(c1.frobenius())).ok_or(Error::NonInvertible)?;
    let f2 = constant_lift(c2.frobenius());
    let scale = p_power(p, twist);
    let (r1, r2) = (c1.rank(), c2.rank());
    let n = r1 * r2;
    let matrix: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let (i, k) = (r / r2, r % r2);
                    let (j, l) = (c / r2, c % r2);
                    &(&inv[j][i] * &f2[k][l]) * &scale
                })
                .collect()
        })
        .collect();
    newton_polygon_slopes(&charpoly(matrix), p)
}

fn p_power(p: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), e.unsigned_abs() as usize)
    }
}

/// Image of a p-integral rational in `Z/p^N`.
fn reduce_rational(ctx: PrecisionContext, x: &BigRational) -> TruncatedSeries {
    let m = BigInt::from(ctx.modulus());
    let num = (x.numer() % &m + &m) % &m;
    let den = (x.denom() % &m).to_u64().unwrap_or(0);
    let inv = crate::padic_series::inverse_mod(den, ctx.modulus());
    let num = num.to_u64().unwrap_or(0) as i128;
    TruncatedSeries::constant(ctx, num * inv as i128)
}

/// Gauss-Jordan inverse over the rationals.
fn rational_inverse(mut a: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|r| !a[*r][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let d = a[col][col].recip();
        for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *x *= &d;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
                let t = &f * &inv[col][c];
                inv[r][c] -= t;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::{
        check_horizontality, check_pairing_compat, make_standard_crystal, newton_slopes,
        standard_pair, StandardKind,
    };
    use num_rational::Rational64;

    #[test]
    fn super_to_sub_slopes() {
        let ctx = PrecisionContext::default();
        for h in [2, 3, 5, 10] {
            let sup = make_standard_crystal(ctx, h, StandardKind::Super1).unwrap();
            let sub = make_standard_crystal(ctx, h, StandardKind::Sub1).unwrap();
            let hom = hom_crystal(&sup, &sub, 2).unwrap();
            let s = newton_slopes(&hom).unwrap();
            let expected = Rational64::from(2) - Rational64::new(2, h as i64);
            assert_eq!(s.entries(), &[(expected, h * h)]);
            let s0 = hom_slopes(&sup, &sub, 0).unwrap();
            assert_eq!(s0.entries(), &[(Rational64::new(-2, h as i64), h * h)]);
        }
    }

    #[test]
    fn twist_must_clear_denominators() {
        let ctx = PrecisionContext::default();
        let sup = make_standard_crystal(ctx, 3, StandardKind::Super1).unwrap();
        let sub = make_standard_crystal(ctx, 3, StandardKind::Sub1).unwrap();
        assert_eq!(
            hom_crystal(&sup, &sub, 1),
            Err(Error::TwistTooSmall { twist: 1, required: 2 })
        );
    }

    #[test]
    fn end_of_pair_contains_slope_zero() {
        let ctx = PrecisionContext::new(3, 8, 6).unwrap();
        let c = standard_pair(ctx, 2).unwrap();
        let s = hom_slopes(&c, &c, 0).unwrap();
        assert!(s.multiplicity_of(Rational64::from(0)) >= c.rank());
        assert_eq!(s.total_multiplicity(), 16);
    }

    #[test]
    fn hom_of_slope_one_is_a_crystal() {
        let ctx = PrecisionContext::new(5, 8, 10).unwrap();
        let one = make_standard_crystal(ctx, 2, StandardKind::Slope1 { rho: 2 }).unwrap();
        let pair = standard_pair(ctx, 2).unwrap();
        let hom = hom_crystal(&one, &pair, 1).unwrap();
        assert_eq!(hom.weight(), 2);
        assert!(check_horizontality(&hom).passed());
        assert!(check_pairing_compat(&hom).passed());
    }

    #[test]
    fn singular_source_is_rejected() {
        let ctx = PrecisionContext::default();
        let z = FCrystalPresentation::new(
            SeriesMatrix::zeros(ctx, 2, 2),
            SeriesMatrix::zeros(ctx, 2, 2),
            SeriesMatrix::zeros(ctx, 2, 2),
            2,
        )
        .unwrap();
        assert_eq!(hom_crystal(&z, &z, 0), Err(Error::NonInvertible));
    }
}
