use super::FCrystalPresentation;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic_series::TruncatedSeries;

type Rows = Vec<Vec<TruncatedSeries>>;

/// Gauss-Jordan elimination restricted to the first `pivot_cols` columns.
///
/// Pivots are chosen among unused rows and columns by minimal valuation of
/// the constant term, ties going to the lowest row and then the lowest
/// column; only unit pivots are accepted. Returns the `(row, col)` pivots in
/// the order they were used.
fn eliminate(rows: &mut Rows, pivot_cols: usize) -> Vec<(usize, usize)> {
    let mut used_rows = vec![false; rows.len()];
    let mut used_cols = vec![false; pivot_cols];
    let mut pivots = Vec::new();
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            if used_rows[r] {
                continue;
            }
            for c in 0..pivot_cols {
                if used_cols[c] {
                    continue;
                }
                let v = row[c].coeff(0).valuation();
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, r, c));
                }
            }
        }
        let Some((0, r, c)) = best else {
            return pivots;
        };
        let inv = rows[r][c].inverse().expect("unit pivot");
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        used_rows[r] = true;
        used_cols[c] = true;
        pivots.push((r, c));
    }
}

/// Matrix whose columns are the given vectors.
fn columns_matrix(c: &FCrystalPresentation, vectors: &[Vec<TruncatedSeries>]) -> Result<SeriesMatrix> {
    let r = c.rank();
    if vectors.iter().any(|v| v.len() != r) {
        return Err(Error::Dimension(format!("subspace vectors must have length {r}")));
    }
    SeriesMatrix::from_rows(
        c.context(),
        (0..r).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect(),
    )
    .map(|m| if vectors.is_empty() { SeriesMatrix::zeros(c.context(), r, 0) } else { m })
}

/// Basis of `{x : <x, s> = 0 for every s in subspace}` as the columns of an
/// `r x (r - k)` matrix; the rows at non-pivot coordinates form the identity.
pub fn complement_basis(
    c: &FCrystalPresentation,
    subspace: &[Vec<TruncatedSeries>],
) -> Result<SeriesMatrix> {
    complement_with_free(c, subspace).map(|(b, _)| b)
}

fn complement_with_free(
    c: &FCrystalPresentation,
    subspace: &[Vec<TruncatedSeries>],
) -> Result<(SeriesMatrix, Vec<usize>)> {
    let ctx = c.context();
    let r = c.rank();
    let s = columns_matrix(c, subspace)?;
    let k = s.cols();
    let l = s.transpose().checked_mul(c.pairing())?;
    if (&l * &s).det_mod_p() == 0 {
        return Err(Error::NotPerfect);
    }

    let mut rows = l.row_vecs();
    if k == 0 {
        rows.clear();
    }
    let pivots = eliminate(&mut rows, r);
    if pivots.len() != k {
        return Err(Error::NotPerfect);
    }
    let mut pivot_of_col = vec![None; r];
    for (row, col) in &pivots {
        pivot_of_col[*col] = Some(*row);
    }
    let free: Vec<usize> = (0..r).filter(|c| pivot_of_col[*c].is_none()).collect();

    let mut basis = SeriesMatrix::zeros(ctx, r, free.len());
    for (j, f) in free.iter().enumerate() {
        basis.set(*f, j, TruncatedSeries::one(ctx));
        for (row, col) in &pivots {
            basis.set(*col, j, -&rows[*row][*f]);
        }
    }
    Ok((basis, free))
}

/// Presentation induced on the orthogonal complement of `subspace`.
///
/// The induced Frobenius and connection are read off the identity rows of
/// [`complement_basis`] and then checked against the full equations.
pub fn orthogonal_complement(
    c: &FCrystalPresentation,
    subspace: &[Vec<TruncatedSeries>],
) -> Result<FCrystalPresentation> {
    let ctx = c.context();
    let (basis, free) = complement_with_free(c, subspace)?;

    let restrict = |m: &SeriesMatrix| {
        SeriesMatrix::from_fn(ctx, free.len(), m.cols(), |i, j| m.get(free[i], j).clone())
    };

    let image_f = c.frobenius() * &basis.frobenius_pullback();
    let frobenius = restrict(&image_f);
    if &basis * &frobenius != image_f {
        return Err(Error::NotStable("Frobenius leaves the complement".into()));
    }

    let top = ctx.truncation();
    let image_a = &basis.derivative() + &(c.connection() * &basis);
    let connection = restrict(&image_a).cut_above(top);
    if (&basis * &connection).cut_above(top) != image_a.cut_above(top) {
        return Err(Error::NotStable("connection leaves the complement".into()));
    }

    let pairing = &(&basis.transpose() * c.pairing()) * &basis;
    FCrystalPresentation::new(frobenius, connection, pairing, c.weight())
}

/// Whether every vector lies in the span of `generators`, which must span a
/// direct summand.
pub fn span_contains(
    generators: &[Vec<TruncatedSeries>],
    vectors: &[Vec<TruncatedSeries>],
) -> Result<bool> {
    let Some(first) = generators.first().or(vectors.first()) else {
        return Ok(true);
    };
    let r = first.len();
    let k = generators.len();
    let mut ok = true;
    for v in vectors {
        if v.len() != r || generators.iter().any(|g| g.len() != r) {
            return Err(Error::Dimension("vectors of unequal length".into()));
        }
        let mut rows: Rows = (0..r)
            .map(|i| generators.iter().map(|g| g[i].clone()).chain([v[i].clone()]).collect())
            .collect();
        let pivots = eliminate(&mut rows, k);
        if pivots.len() != k {
            return Err(Error::NonInvertible);
        }
        let pivot_rows: Vec<usize> = pivots.iter().map(|(row, _)| *row).collect();
        ok &= (0..r)
            .filter(|i| !pivot_rows.contains(i))
            .all(|i| rows[i][k].is_zero());
    }
    Ok(ok)
}
