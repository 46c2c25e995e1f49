use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use super::FCrystalPresentation;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;

/// Newton slopes with multiplicities, sorted by slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeMultiset {
    entries: Vec<(Rational64, usize)>,
}

impl SlopeMultiset {
    pub fn new(mut entries: Vec<(Rational64, usize)>) -> Self {
        entries.retain(|(_, m)| *m > 0);
        entries.sort();
        let mut merged: Vec<(Rational64, usize)> = Vec::with_capacity(entries.len());
        for (s, m) in entries {
            match merged.last_mut() {
                Some((last, count)) if *last == s => *count += m,
                _ => merged.push((s, m)),
            }
        }
        Self { entries: merged }
    }

    pub fn entries(&self) -> &[(Rational64, usize)] {
        &self.entries
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// `sum slope * multiplicity`.
    pub fn weighted_sum(&self) -> Rational64 {
        self.entries
            .iter()
            .fold(Rational64::zero(), |acc, (s, m)| acc + s * Rational64::from(*m as i64))
    }

    /// The common slope when the multiset is isoclinic.
    pub fn single_slope(&self) -> Option<Rational64> {
        match self.entries.as_slice() {
            [(s, _)] => Some(*s),
            _ => None,
        }
    }

    pub fn multiplicity_of(&self, slope: Rational64) -> usize {
        self.entries
            .iter()
            .find(|(s, _)| *s == slope)
            .map_or(0, |(_, m)| *m)
    }
}

impl fmt::Display for SlopeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(s, m)| format!("{s} x{m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Slopes of a constant presentation, read from the Newton polygon of the
/// characteristic polynomial of `F(0)`.
///
/// The Frobenius entries are lifted to integers through their balanced
/// representatives and the characteristic polynomial is computed exactly.
pub fn newton_slopes(c: &FCrystalPresentation) -> Result<SlopeMultiset> {
    if !c.connection().is_zero() {
        return Err(Error::NotConstant("connection is nonzero".into()));
    }
    if !c.frobenius().is_constant() {
        return Err(Error::NotConstant("Frobenius depends on t".into()));
    }
    let ctx = c.context();
    let slopes = newton_polygon_slopes(&charpoly(constant_lift(c.frobenius())), ctx.p())?;
    let cap = Rational64::from(ctx.precision() as i64);
    if let Some((s, _)) = slopes.entries().iter().find(|(s, _)| *s > cap) {
        return Err(Error::PrecisionInsufficient(format!(
            "slope {s} exceeds the precision cap N = {cap}"
        )));
    }
    Ok(slopes)
}

/// Slopes from the lower convex hull of `(i, v_p(c_i))`, where `coeffs` are
/// the coefficients `c_0..c_n` of a monic polynomial.
pub fn newton_polygon_slopes(coeffs: &[BigRational], p: u64) -> Result<SlopeMultiset> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(SlopeMultiset::new(vec![]));
    }
    if coeffs[0].is_zero() {
        return Err(Error::PrecisionInsufficient(
            "characteristic polynomial has a zero root; its slope is unbounded".into(),
        ));
    }
    let points: Vec<(usize, i64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, valuation(c, p)))
        .collect();

    let mut entries = Vec::new();
    let mut cur = 0usize;
    while points[cur].0 < n {
        let (x0, y0) = points[cur];
        let mut best = cur + 1;
        for k in cur + 1..points.len() {
            let (x, y) = points[k];
            let (bx, by) = points[best];
            // compare (y - y0)/(x - x0) <= (by - y0)/(bx - x0), preferring the farther point
            let lhs = (y - y0) as i128 * (bx - x0) as i128;
            let rhs = (by - y0) as i128 * (x - x0) as i128;
            if lhs <= rhs {
                best = k;
            }
        }
        let (x1, y1) = points[best];
        let run = (x1 - x0) as i64;
        entries.push((Rational64::new(y0 - y1, run), run as usize));
        cur = best;
    }
    Ok(SlopeMultiset::new(entries))
}

/// Constant terms lifted to integers through balanced representatives.
pub(crate) fn constant_lift(m: &SeriesMatrix) -> Vec<Vec<BigRational>> {
    let ctx = m.context();
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| BigRational::from_integer(BigInt::from(ctx.balanced(m.get(i, j).raw(0)))))
                .collect()
        })
        .collect()
}

pub(crate) fn valuation(x: &BigRational, p: u64) -> i64 {
    vp_int(x.numer(), p) - vp_int(x.denom(), p)
}

fn vp_int(x: &BigInt, p: u64) -> i64 {
    if x.is_zero() {
        return i64::MAX;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

/// Characteristic polynomial `det(x I - A)` as coefficients `c_0..c_n`,
/// via reduction to upper Hessenberg form over the rationals.
pub(crate) fn charpoly(mut a: Vec<Vec<BigRational>>) -> Vec<BigRational> {
    let n = a.len();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|i| !a[*i][j].is_zero()) else {
            continue;
        };
        if piv != j + 1 {
            a.swap(piv, j + 1);
            for row in a.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        for k in j + 2..n {
            if a[k][j].is_zero() {
                continue;
            }
            let u = &a[k][j] / &a[j + 1][j];
            for c in 0..n {
                if !a[j + 1][c].is_zero() {
                    let t = &u * &a[j + 1][c];
                    a[k][c] -= t;
                }
            }
            for r in 0..n {
                if !a[r][k].is_zero() {
                    let t = &u * &a[r][k];
                    a[r][j + 1] += t;
                }
            }
        }
    }

    // p_m(x) = (x - h_mm) p_{m-1} - sum_{i} h_{m-i,m} (prod h_{k,k-1}) p_{m-i-1}
    let mut polys: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    for m in 1..=n {
        let prev = &polys[m - 1];
        let mut next = vec![BigRational::zero(); m + 1];
        for (d, c) in prev.iter().enumerate() {
            next[d + 1] += c.clone();
            next[d] -= &a[m - 1][m - 1] * c;
        }
        let mut prod = BigRational::one();
        for i in 1..m {
            prod *= &a[m - i][m - i - 1];
            if prod.is_zero() {
                break;
            }
            let h = &a[m - i - 1][m - 1];
            if h.is_zero() {
                continue;
            }
            let factor = h * &prod;
            for (d, c) in polys[m - i - 1].iter().enumerate() {
                next[d] -= &factor * c;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap_or_default()
}
