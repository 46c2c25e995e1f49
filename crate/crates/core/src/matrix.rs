//! Dense matrices over the truncated series ring.
//!
//! Convention throughout the crate: column `j` holds the coordinates of the
//! image of basis vector `j`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::padic_series::{PrecisionContext, TruncatedSeries};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    ctx: PrecisionContext,
    rows: usize,
    cols: usize,
    data: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn zeros(ctx: PrecisionContext, rows: usize, cols: usize) -> Self {
        Self {
            ctx,
            rows,
            cols,
            data: vec![TruncatedSeries::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: PrecisionContext, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, TruncatedSeries::one(ctx));
        }
        m
    }

    pub fn from_fn(
        ctx: PrecisionContext,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> TruncatedSeries,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let s = f(i, j);
                assert_eq!(s.context(), ctx, "context mismatch");
                data.push(s);
            }
        }
        Self {
            ctx,
            rows,
            cols,
            data,
        }
    }

    /// Constant integer matrix given row by row.
    pub fn from_ints(ctx: PrecisionContext, rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(ctx, r, c, |i, j| TruncatedSeries::constant(ctx, rows[i][j]))
    }

    pub fn from_rows(ctx: PrecisionContext, rows: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        if rows.iter().flatten().any(|s| s.context() != ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(Self {
            ctx,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: TruncatedSeries) {
        assert_eq!(s.context(), self.ctx, "context mismatch");
        self.data[i * self.cols + j] = s;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &TruncatedSeries)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(k, s)| (k / self.cols, k % self.cols, s))
    }

    pub fn row_vecs(&self) -> Vec<Vec<TruncatedSeries>> {
        self.data.chunks(self.cols.max(1)).map(<[_]>::to_vec).take(self.rows).collect()
    }

    pub fn column(&self, j: usize) -> Vec<TruncatedSeries> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(TruncatedSeries::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.data.iter().all(TruncatedSeries::is_constant)
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        let data: Vec<_> = self.data.iter().map(f).collect();
        let ctx = data.first().map_or(self.ctx, TruncatedSeries::context);
        Self {
            ctx,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn try_map(&self, f: impl Fn(&TruncatedSeries) -> Result<TruncatedSeries>) -> Result<Self> {
        let data = self.data.iter().map(&f).collect::<Result<Vec<_>>>()?;
        let ctx = match data.first() {
            Some(s) => s.context(),
            None => f(&TruncatedSeries::zero(self.ctx))?.context(),
        };
        Ok(Self {
            ctx,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ctx, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn frobenius_pullback(&self) -> Self {
        self.map(TruncatedSeries::frobenius_pullback)
    }

    /// Entrywise differential bodies, i.e. `dM/dt`.
    pub fn derivative(&self) -> Self {
        self.map(|s| s.derivative().into_body())
    }

    /// Entrywise `phi^*` of a matrix of one-form bodies.
    pub fn one_form_pullback(&self) -> Self {
        let ctx = self.ctx;
        let dphi = TruncatedSeries::monomial(ctx, ctx.p() as i128, ctx.p() as usize - 1);
        self.map(|s| &s.frobenius_pullback() * &dphi)
    }

    pub fn scale_int(&self, c: i128) -> Self {
        self.map(|s| s.scale_int(c))
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        self.try_map(|s| s.with_precision(precision))
    }

    pub fn truncate(&self, truncation: usize) -> Self {
        let mut out = self.map(|s| s.truncate(truncation));
        out.ctx = self.ctx.with_truncation(truncation);
        out
    }

    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        self.try_map(|s| s.div_p_pow(k))
    }

    /// Zeroes every coefficient at degree `>= from` (used to compare one-form
    /// matrices on their trusted prefix).
    pub fn cut_above(&self, from: usize) -> Self {
        self.map(|s| s.cut_above(from))
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(self.ctx, rows.len(), cols.len(), |i, j| {
            self.get(r0 + i, c0 + j).clone()
        })
    }

    /// Places `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &SeriesMatrix) {
        for (i, j, s) in block.entries() {
            self.set(r0 + i, c0 + j, s.clone());
        }
    }

    pub fn block_diag(blocks: &[&SeriesMatrix]) -> Self {
        let ctx = blocks[0].ctx;
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(ctx, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Kronecker product, row index `(i, k) -> i * other.rows + k`.
    pub fn kronecker(&self, other: &SeriesMatrix) -> Self {
        Self::from_fn(
            self.ctx,
            self.rows * other.rows,
            self.cols * other.cols,
            |r, c| {
                let (i, k) = (r / other.rows, r % other.rows);
                let (j, l) = (c / other.cols, c % other.cols);
                self.get(i, j) * other.get(k, l)
            },
        )
    }

    pub fn checked_mul(&self, rhs: &SeriesMatrix) -> Result<Self> {
        if self.ctx != rhs.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.ctx, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Determinant of the constant term reduced mod p, as an element of F_p.
    pub fn det_mod_p(&self) -> u64 {
        assert_eq!(self.rows, self.cols, "square matrix expected");
        let p = self.ctx.p();
        let n = self.rows;
        let mut a: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).raw(0) % p).collect())
            .collect();
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (col..n).find(|r| a[*r][col] != 0) else {
                return 0;
            };
            if piv != col {
                a.swap(piv, col);
                det = (p - det) % p;
            }
            det = det * a[col][col] % p;
            let inv = pow_mod(a[col][col], p - 2, p);
            for r in col + 1..n {
                let f = a[r][col] * inv % p;
                if f == 0 {
                    continue;
                }
                for c in col..n {
                    a[r][c] = (a[r][c] + p * p - f * a[col][c] % p) % p;
                }
            }
        }
        det
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for (i, j, s) in self.entries() {
            if !s.is_zero() {
                writeln!(f, "  ({i},{j}): {s}")?;
            }
        }
        Ok(())
    }
}

impl Add for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn add(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }
}

impl Sub for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn sub(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }
}

impl Neg for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn neg(self) -> SeriesMatrix {
        self.map(|s| -s)
    }
}

impl Mul for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn mul(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}
