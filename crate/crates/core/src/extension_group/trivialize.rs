use std::fmt;

use super::{frobenius_terms, pairing_terms, ExtensionData, TrivializationWitness};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;

/// One of the three families of trivialization equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Equation {
    /// `xi_ij = d alpha_ij`.
    Connection,
    /// `v_ij = p^(1 - [j = 0]) phi^* alpha_{i,j-1} - p^(1 + [i = h-1]) alpha_{i+1,j}`.
    Frobenius,
    /// `(1 + delta_ij) m_ij = alpha_ij + alpha_ji`.
    Pairing,
}

impl Equation {
    pub fn name(&self) -> &'static str {
        match self {
            Equation::Connection => "connection",
            Equation::Frobenius => "frobenius",
            Equation::Pairing => "pairing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Untrivializable {
    /// `xi_ij` has no antiderivative over `W`.
    NonIntegrable { i: usize, j: usize, index: usize },
    /// Integration would consume all p-adic precision.
    PrecisionExhausted { needed: u32, available: u32 },
    /// The integrated `alpha` violates an equation at `(i, j)`.
    Fails { equation: Equation, i: usize, j: usize },
}

impl fmt::Display for Untrivializable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Untrivializable::NonIntegrable { i, j, index } => {
                write!(f, "xi[{i}][{j}] is not integrable at coefficient {index}")
            }
            Untrivializable::PrecisionExhausted { needed, available } => write!(
                f,
                "integration needs {needed} p-adic digits, only {available} available"
            ),
            Untrivializable::Fails { equation, i, j } => {
                write!(f, "{} equation fails at ({i}, {j})", equation.name())
            }
        }
    }
}

/// First equation `(equation, i, j)` that `alpha` violates for `e`, compared
/// at the precision of `alpha`. Connection equations are compared through
/// degree `M - 1`.
pub(crate) fn first_violation(
    e: &ExtensionData,
    alpha: &SeriesMatrix,
) -> Result<Option<(Equation, usize, usize)>> {
    let ctx = alpha.context();
    if ctx.truncation() != e.ctx.truncation() || ctx.p() != e.ctx.p() {
        return Err(Error::ContextMismatch);
    }
    let e = e.with_precision(ctx.precision())?;
    let top = ctx.truncation();
    let dalpha = alpha.derivative();
    let targets = [
        (Equation::Connection, dalpha.cut_above(top), e.xi.cut_above(top)),
        (Equation::Frobenius, frobenius_terms(alpha), e.v.clone()),
        (Equation::Pairing, pairing_terms(alpha), e.m.clone()),
    ];
    for (eq, lhs, rhs) in targets {
        for i in 0..e.h {
            for j in 0..e.h {
                if lhs.get(i, j) != rhs.get(i, j) {
                    return Ok(Some((eq, i, j)));
                }
            }
        }
    }
    Ok(None)
}

/// Solves for a splitting: `alpha_ij` is the antiderivative of `xi_ij`, and
/// the Frobenius and pairing equations are then checked at the reduced
/// precision left by integration.
pub fn trivialize(e: &ExtensionData) -> std::result::Result<TrivializationWitness, Untrivializable> {
    let h = e.h;
    let mut rows = Vec::with_capacity(h);
    for i in 0..h {
        let mut row = Vec::with_capacity(h);
        for j in 0..h {
            match e.xi_form(i, j).integrate() {
                Ok(s) => row.push(s),
                Err(Error::NonIntegrable { index }) => {
                    return Err(Untrivializable::NonIntegrable { i, j, index })
                }
                Err(Error::PrecisionExhausted { needed, available }) => {
                    return Err(Untrivializable::PrecisionExhausted { needed, available })
                }
                Err(other) => unreachable!("integration error {other}"),
            }
        }
        rows.push(row);
    }
    let ctx = rows[0][0].context();
    let alpha = SeriesMatrix::from_rows(ctx, rows).expect("uniform shape");
    match first_violation(e, &alpha) {
        Ok(None) => Ok(TrivializationWitness { alpha }),
        Ok(Some((equation, i, j))) => Err(Untrivializable::Fails { equation, i, j }),
        Err(_) => unreachable!("integration keeps the truncation"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension_group::{from_alpha, ExtensionContext};
    use crate::padic_series::{PrecisionContext, TruncatedSeries};

    fn ectx() -> ExtensionContext {
        ExtensionContext::new(PrecisionContext::new(3, 8, 12).unwrap(), 2).unwrap()
    }

    fn alpha(ectx: &ExtensionContext) -> SeriesMatrix {
        let ctx = ectx.context();
        SeriesMatrix::from_fn(ctx, 2, 2, |i, j| {
            TruncatedSeries::from_coeffs(ctx, &[0, 1 + i as i128, 0, 5 * j as i128, 2])
        })
    }

    #[test]
    fn round_trip() {
        let ectx = ectx();
        let a = alpha(&ectx);
        let e = from_alpha(&TrivializationWitness::new(a.clone()).unwrap(), &ectx).unwrap();
        let w = trivialize(&e).unwrap();
        // loss is v_3(9) = 2
        assert_eq!(w.context().precision(), 6);
        assert_eq!(w.alpha(), &a.with_precision(6).unwrap());
    }

    #[test]
    fn zero_is_trivial() {
        let ectx = ectx();
        let w = trivialize(&ectx.zero()).unwrap();
        assert!(w.alpha().is_zero());
    }

    #[test]
    fn perturbed_pairing_fails_at_that_entry() {
        let ectx = ectx();
        let ctx = ectx.context();
        let e = from_alpha(&TrivializationWitness::new(alpha(&ectx)).unwrap(), &ectx).unwrap();
        let mut m = e.m().clone();
        m.set(0, 0, m.get(0, 0) + &TruncatedSeries::monomial(ctx, 1, 1));
        let bad = ExtensionData::new(e.xi().clone(), e.v().clone(), m, false).unwrap();
        assert_eq!(
            trivialize(&bad),
            Err(Untrivializable::Fails {
                equation: Equation::Pairing,
                i: 0,
                j: 0
            })
        );
    }

    #[test]
    fn non_integrable_connection() {
        let ectx = ectx();
        let ctx = ectx.context();
        let mut xi = SeriesMatrix::zeros(ctx, 2, 2);
        // t^2 dt integrates to t^3 / 3
        xi.set(0, 0, TruncatedSeries::monomial(ctx, 1, 2));
        let z = SeriesMatrix::zeros(ctx, 2, 2);
        let e = ExtensionData::new(xi, z.clone(), z, false).unwrap();
        assert_eq!(
            trivialize(&e),
            Err(Untrivializable::NonIntegrable { i: 0, j: 0, index: 2 })
        );
    }
}
