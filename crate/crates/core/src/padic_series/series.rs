use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::scalar::{add_mod, inverse_mod, mul_mod, sub_mod};
use super::{PAdicScalar, PrecisionContext};
use crate::error::{Error, Result};

/// An element of `W[[t]] / (p^N, t^(M+1))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    ctx: PrecisionContext,
    coeffs: Vec<u64>,
}

/// Selector for [`series_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic on two series sharing a context.
pub fn series_arith(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    op: SeriesOp,
) -> Result<TruncatedSeries> {
    if a.ctx != b.ctx {
        return Err(Error::ContextMismatch);
    }
    Ok(match op {
        SeriesOp::Add => a + b,
        SeriesOp::Sub => a - b,
        SeriesOp::Mul => a * b,
    })
}

impl TruncatedSeries {
    pub fn zero(ctx: PrecisionContext) -> Self {
        Self {
            ctx,
            coeffs: vec![0; ctx.len()],
        }
    }

    pub fn one(ctx: PrecisionContext) -> Self {
        Self::constant(ctx, 1)
    }

    pub fn constant(ctx: PrecisionContext, c: i128) -> Self {
        Self::monomial(ctx, c, 0)
    }

    /// `c * t^degree`, zero when the degree is truncated away.
    pub fn monomial(ctx: PrecisionContext, c: i128, degree: usize) -> Self {
        let mut s = Self::zero(ctx);
        if degree <= ctx.truncation() {
            s.coeffs[degree] = ctx.reduce_i128(c);
        }
        s
    }

    /// Builds a series from integer coefficients; missing ones are zero and
    /// extra ones are truncated.
    pub fn from_coeffs(ctx: PrecisionContext, coeffs: &[i128]) -> Self {
        let mut s = Self::zero(ctx);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = ctx.reduce_i128(*c);
        }
        s
    }

    /// Builds a series from canonical residues; rejects out-of-range values.
    pub fn from_residues(ctx: PrecisionContext, coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.len() != ctx.len() {
            return Err(Error::Parse(format!(
                "series has {} coefficients, expected M+1 = {}",
                coeffs.len(),
                ctx.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| **c >= ctx.modulus()) {
            return Err(Error::Parse(format!(
                "coefficient {c} is not a canonical residue mod {}",
                ctx.modulus()
            )));
        }
        Ok(Self { ctx, coeffs })
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn coeff(&self, n: usize) -> PAdicScalar {
        PAdicScalar::from_canonical(self.ctx, self.raw(n))
    }

    /// Raw residue of the coefficient at degree `n` (zero past truncation).
    pub fn raw(&self, n: usize) -> u64 {
        self.coeffs.get(n).copied().unwrap_or(0)
    }

    pub fn residues(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// Degree-zero only (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| *c == 0)
    }

    /// Membership in the ideal `t W[[t]]`.
    pub fn in_t_ideal(&self) -> bool {
        self.coeffs[0] == 0
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_multiple_of(self.ctx.p())
    }

    /// Minimal p-adic valuation over all coefficients (`N` for zero).
    pub fn valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .filter(|c| **c != 0)
            .map(|c| self.ctx.vp(*c))
            .min()
            .unwrap_or(self.ctx.precision())
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != 0)
    }

    /// Lowest degree whose coefficient is not divisible by `p^k`.
    pub fn first_degree_not_divisible(&self, k: u32) -> Option<usize> {
        let q = self.ctx.p_pow(k);
        if q == 0 {
            return None;
        }
        self.coeffs.iter().position(|c| c % q != 0)
    }

    pub fn is_divisible_by_p_pow(&self, k: u32) -> bool {
        self.first_degree_not_divisible(k).is_none()
    }

    pub fn scale(&self, c: &PAdicScalar) -> Self {
        assert_eq!(self.ctx, c.context(), "context mismatch");
        self.scale_raw(c.value())
    }

    pub fn scale_int(&self, c: i128) -> Self {
        self.scale_raw(self.ctx.reduce_i128(c))
    }

    fn scale_raw(&self, c: u64) -> Self {
        let m = self.ctx.modulus();
        Self {
            ctx: self.ctx,
            coeffs: self.coeffs.iter().map(|x| mul_mod(*x, c, m)).collect(),
        }
    }

    pub fn mul_p_pow(&self, k: u32) -> Self {
        self.scale_raw(self.ctx.p_pow(k))
    }

    /// Exact division by `p^k`; the quotient is only known modulo
    /// `p^(N-k)` and is returned in that reduced context.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        let available = self.ctx.precision();
        if k >= available {
            return Err(Error::PrecisionExhausted {
                needed: k + 1,
                available,
            });
        }
        if !self.is_divisible_by_p_pow(k) {
            return Err(Error::NonInvertible);
        }
        let ctx = self.ctx.with_precision(available - k)?;
        let q = self.ctx.p_pow(k);
        Ok(Self {
            ctx,
            coeffs: self.coeffs.iter().map(|c| (c / q) % ctx.modulus()).collect(),
        })
    }

    /// Reduction to a lower p-adic precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        if precision > self.ctx.precision() {
            return Err(Error::PrecisionExhausted {
                needed: precision,
                available: self.ctx.precision(),
            });
        }
        let ctx = self.ctx.with_precision(precision)?;
        Ok(self.reduce_into(ctx))
    }

    /// Lift to a higher precision using canonical representatives.
    /// Only meaningful for values that are exact integers.
    pub fn lift_precision(&self, precision: u32) -> Result<Self> {
        let ctx = self.ctx.with_precision(precision)?;
        Ok(Self {
            ctx,
            coeffs: self.coeffs.iter().map(|c| c % ctx.modulus()).collect(),
        })
    }

    /// Base change `k[t]/t^(M+1) -> k[t]/t^(M'+1)` for `M' <= M`.
    pub fn truncate(&self, truncation: usize) -> Self {
        assert!(truncation <= self.ctx.truncation(), "truncation can only shrink");
        Self {
            ctx: self.ctx.with_truncation(truncation),
            coeffs: self.coeffs[..=truncation].to_vec(),
        }
    }

    fn reduce_into(&self, ctx: PrecisionContext) -> Self {
        Self {
            ctx,
            coeffs: self.coeffs.iter().map(|c| c % ctx.modulus()).collect(),
        }
    }

    /// Coefficients reduced mod p.
    pub fn mod_p(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c % self.ctx.p()).collect()
    }

    /// The differential `d a = a'(t) dt`.
    pub fn derivative(&self) -> OneForm {
        let m = self.ctx.modulus();
        let mut body = vec![0u64; self.ctx.len()];
        for n in 1..self.ctx.len() {
            body[n - 1] = mul_mod(self.coeffs[n], n as u64 % m, m);
        }
        OneForm {
            body: Self {
                ctx: self.ctx,
                coeffs: body,
            },
        }
    }

    /// `phi^*(a) = a(t^p)`, with `sigma = id` on the coefficients.
    pub fn frobenius_pullback(&self) -> Self {
        let p = self.ctx.p() as usize;
        let mut out = Self::zero(self.ctx);
        for (n, c) in self.coeffs.iter().enumerate() {
            let d = n * p;
            if d > self.ctx.truncation() {
                break;
            }
            out.coeffs[d] = *c;
        }
        out
    }

    /// Multiplicative inverse of a unit, by the coefficient recurrence.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonInvertible);
        }
        let m = self.ctx.modulus();
        let c0_inv = inverse_mod(self.coeffs[0], m);
        let mut inv = vec![0u64; self.ctx.len()];
        inv[0] = c0_inv;
        for n in 1..self.ctx.len() {
            let mut acc = 0u64;
            for k in 1..=n {
                acc = add_mod(acc, mul_mod(self.coeffs[k], inv[n - k], m), m);
            }
            inv[n] = mul_mod(sub_mod(0, acc, m), c0_inv, m);
        }
        Ok(Self {
            ctx: self.ctx,
            coeffs: inv,
        })
    }

    /// Value at `t = 0`.
    pub fn constant_term(&self) -> PAdicScalar {
        self.coeff(0)
    }

    /// Same series with every coefficient at degree `>= from` set to zero.
    pub fn cut_above(&self, from: usize) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().skip(from) {
            *c = 0;
        }
        out
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(n, c)| match n {
                0 => format!("{c}"),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{n}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&TruncatedSeries> for TruncatedSeries {
    fn add_assign(&mut self, rhs: &TruncatedSeries) {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        let m = self.ctx.modulus();
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = add_mod(*a, *b, m);
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl SubAssign<&TruncatedSeries> for TruncatedSeries {
    fn sub_assign(&mut self, rhs: &TruncatedSeries) {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        let m = self.ctx.modulus();
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = sub_mod(*a, *b, m);
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        let m = self.ctx.modulus();
        TruncatedSeries {
            ctx: self.ctx,
            coeffs: self.coeffs.iter().map(|c| sub_mod(0, *c, m)).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        let (Some(da), Some(db)) = (self.degree(), rhs.degree()) else {
            return TruncatedSeries::zero(self.ctx);
        };
        if da == 0 {
            return rhs.scale_raw(self.coeffs[0]);
        }
        if db == 0 {
            return self.scale_raw(rhs.coeffs[0]);
        }
        let m = self.ctx.modulus();
        let top = self.ctx.truncation();
        let mut acc = vec![0u128; self.ctx.len()];
        let bound = (m as u128) * (m as u128);
        for (i, a) in self.coeffs.iter().enumerate().take(da + 1) {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take((db).min(top - i) + 1) {
                let slot = &mut acc[i + j];
                *slot += *a as u128 * *b as u128;
                if *slot >= bound {
                    *slot %= m as u128;
                }
            }
        }
        TruncatedSeries {
            ctx: self.ctx,
            coeffs: acc.into_iter().map(|x| (x % m as u128) as u64).collect(),
        }
    }
}

/// A one-form `g(t) dt`; only `body` is stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OneForm {
    body: TruncatedSeries,
}

impl OneForm {
    pub fn new(body: TruncatedSeries) -> Self {
        Self { body }
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self::new(TruncatedSeries::zero(ctx))
    }

    pub fn body(&self) -> &TruncatedSeries {
        &self.body
    }

    pub fn into_body(self) -> TruncatedSeries {
        self.body
    }

    pub fn context(&self) -> PrecisionContext {
        self.body.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// Module action of `W[[t]]`.
    pub fn scale_by(&self, a: &TruncatedSeries) -> Self {
        Self::new(&self.body * a)
    }

    /// `phi^*(g dt) = g(t^p) * p t^(p-1) dt`.
    pub fn frobenius_pullback(&self) -> Self {
        let ctx = self.body.ctx;
        let dphi = TruncatedSeries::monomial(ctx, ctx.p() as i128, ctx.p() as usize - 1);
        Self::new(&self.body.frobenius_pullback() * &dphi)
    }

    /// Trusted-prefix comparison: bodies agree through degree `M - 1`.
    pub fn agrees_with(&self, other: &OneForm) -> bool {
        let top = self.context().truncation();
        self.body.residues()[..top] == other.body.residues()[..top]
    }

    /// Antiderivative with zero constant term.
    ///
    /// Writing the form as `sum g_n t^n dt`, each `g_n` must be divisible by
    /// `p^(v_p(n+1))`. The result lives at precision
    /// `N - max_{n <= M-1} v_p(n+1)` for the whole series.
    pub fn integrate(&self) -> Result<TruncatedSeries> {
        let ctx = self.body.ctx;
        let top = ctx.truncation();
        let loss = (1..=top as u64).map(|k| ctx.vp(k)).max().unwrap_or(0);
        let available = ctx.precision();
        if loss >= available {
            return Err(Error::PrecisionExhausted {
                needed: loss + 1,
                available,
            });
        }
        let out_ctx = ctx.with_precision(available - loss)?;
        let m = out_ctx.modulus();
        let mut coeffs = vec![0u64; out_ctx.len()];
        for n in 0..top {
            let g = self.body.coeffs[n];
            let k = (n + 1) as u64;
            let e = ctx.vp(k);
            let pe = ctx.p_pow(e);
            if !g.is_multiple_of(pe) {
                return Err(Error::NonIntegrable { index: n });
            }
            let unit = (k / pe) % m;
            coeffs[n + 1] = mul_mod((g / pe) % m, inverse_mod(unit, m), m);
        }
        Ok(TruncatedSeries { ctx: out_ctx, coeffs })
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) dt", self.body)
    }
}

impl Add for &OneForm {
    type Output = OneForm;
    fn add(self, rhs: &OneForm) -> OneForm {
        OneForm::new(&self.body + &rhs.body)
    }
}

impl Sub for &OneForm {
    type Output = OneForm;
    fn sub(self, rhs: &OneForm) -> OneForm {
        OneForm::new(&self.body - &rhs.body)
    }
}

impl Neg for &OneForm {
    type Output = OneForm;
    fn neg(self) -> OneForm {
        OneForm::new(-&self.body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32, m: usize) -> PrecisionContext {
        PrecisionContext::new(p, n, m).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let c = ctx(5, 4, 6);
        let a = TruncatedSeries::from_coeffs(c, &[1, 1]);
        let b = TruncatedSeries::from_coeffs(c, &[1, -1]);
        assert_eq!(&a * &b, TruncatedSeries::from_coeffs(c, &[1, 0, -1]));
    }

    #[test]
    fn truncation_ideal_kills_top_times_t() {
        let c = ctx(3, 8, 5);
        let top = TruncatedSeries::monomial(c, 1, 5);
        let t = TruncatedSeries::monomial(c, 1, 1);
        assert!((&top * &t).is_zero());
    }

    #[test]
    fn square_with_nine_vanishing() {
        let c = ctx(3, 2, 4);
        let a = TruncatedSeries::from_coeffs(c, &[3, 1]);
        assert_eq!(&a * &a, TruncatedSeries::from_coeffs(c, &[0, 6, 1]));
    }

    #[test]
    fn checked_arith_rejects_mismatch() {
        let a = TruncatedSeries::one(ctx(3, 4, 4));
        let b = TruncatedSeries::one(ctx(3, 5, 4));
        assert_eq!(series_arith(&a, &b, SeriesOp::Add), Err(Error::ContextMismatch));
        assert!(series_arith(&a, &a, SeriesOp::Mul).is_ok());
    }

    #[test]
    fn derivative_power_rule() {
        let c = ctx(3, 8, 6);
        let t2 = TruncatedSeries::monomial(c, 1, 2);
        assert_eq!(t2.derivative().body(), &TruncatedSeries::monomial(c, 2, 1));
        assert!(TruncatedSeries::constant(c, 17).derivative().is_zero());
        let d = TruncatedSeries::monomial(c, 1, 3).derivative();
        assert_eq!(d.body(), &TruncatedSeries::monomial(c, 3, 2));
        assert_eq!(d.body().coeff(2).valuation(), 1);
    }

    #[test]
    fn integrate_examples() {
        let c = ctx(3, 8, 6);
        let w = OneForm::new(TruncatedSeries::monomial(c, 2, 1));
        let a = w.integrate().unwrap();
        // max v_3(k) for k <= 6 is 1
        assert_eq!(a.context().precision(), 7);
        assert_eq!(a, TruncatedSeries::monomial(a.context(), 1, 2));
        assert!(OneForm::zero(c).integrate().unwrap().is_zero());

        let bad = OneForm::new(TruncatedSeries::monomial(c, 1, 2));
        assert_eq!(bad.integrate(), Err(Error::NonIntegrable { index: 2 }));
        let good = OneForm::new(TruncatedSeries::monomial(c, 3, 2));
        let a = good.integrate().unwrap();
        assert_eq!(a, TruncatedSeries::monomial(a.context(), 1, 3));
    }

    #[test]
    fn frobenius_examples() {
        let c = ctx(3, 8, 10);
        let t = TruncatedSeries::monomial(c, 1, 1);
        assert_eq!(t.frobenius_pullback(), TruncatedSeries::monomial(c, 1, 3));
        let k = TruncatedSeries::constant(c, 42);
        assert_eq!(k.frobenius_pullback(), k);
        let a = TruncatedSeries::from_coeffs(c, &[1, 1, 0, 0, 1]);
        assert_eq!(a.frobenius_pullback(), TruncatedSeries::from_coeffs(c, &[1, 0, 0, 1]));
    }

    #[test]
    fn one_form_pullback() {
        let c = ctx(3, 8, 10);
        // phi^*(t dt) = t^3 * 3 t^2 dt
        let w = OneForm::new(TruncatedSeries::monomial(c, 1, 1));
        assert_eq!(
            w.frobenius_pullback().body(),
            &TruncatedSeries::monomial(c, 3, 5)
        );
    }

    #[test]
    fn inverse_of_unit_series() {
        let c = ctx(5, 6, 8);
        let a = TruncatedSeries::from_coeffs(c, &[2, 5, -7, 1]);
        assert_eq!(&a * &a.inverse().unwrap(), TruncatedSeries::one(c));
        assert!(TruncatedSeries::monomial(c, 1, 1).inverse().is_err());
    }

    #[test]
    fn division_by_p_drops_precision() {
        let c = ctx(3, 5, 3);
        let a = TruncatedSeries::from_coeffs(c, &[0, 9, -3]);
        let q = a.div_p_pow(1).unwrap();
        assert_eq!(q.context().precision(), 4);
        assert_eq!(q, TruncatedSeries::from_coeffs(q.context(), &[0, 3, -1]));
        assert!(TruncatedSeries::from_coeffs(c, &[1]).div_p_pow(1).is_err());
    }
}
