use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::PrecisionContext;
use crate::error::{Error, Result};

/// A residue class in `Z / p^N`, kept as its representative in `[0, p^N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PAdicScalar {
    ctx: PrecisionContext,
    value: u64,
}

impl PAdicScalar {
    pub fn new(ctx: PrecisionContext, value: i128) -> Self {
        Self {
            ctx,
            value: ctx.reduce_i128(value),
        }
    }

    pub(crate) fn from_canonical(ctx: PrecisionContext, value: u64) -> Self {
        debug_assert!(value < ctx.modulus());
        Self { ctx, value }
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self { ctx, value: 0 }
    }

    pub fn one(ctx: PrecisionContext) -> Self {
        Self::new(ctx, 1)
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Precision-capped valuation: `valuation(0) = N`.
    pub fn valuation(&self) -> u32 {
        if self.value == 0 {
            self.ctx.precision()
        } else {
            self.ctx.vp(self.value)
        }
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.ctx.p())
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonInvertible);
        }
        Ok(Self::from_canonical(
            self.ctx,
            inverse_mod(self.value, self.ctx.modulus()),
        ))
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// Inverse of a unit modulo `m` by the extended Euclidean algorithm.
pub(crate) fn inverse_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "not a unit");
    s0.rem_euclid(m as i128) as u64
}

impl Add for PAdicScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        Self::from_canonical(self.ctx, add_mod(self.value, rhs.value, self.ctx.modulus()))
    }
}

impl Sub for PAdicScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        Self::from_canonical(self.ctx, sub_mod(self.value, rhs.value, self.ctx.modulus()))
    }
}

impl Mul for PAdicScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.ctx, rhs.ctx, "context mismatch");
        Self::from_canonical(self.ctx, mul_mod(self.value, rhs.value, self.ctx.modulus()))
    }
}

impl Neg for PAdicScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_canonical(self.ctx, sub_mod(0, self.value, self.ctx.modulus()))
    }
}

impl fmt::Display for PAdicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
