use super::FCrystalPresentation;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic_series::{PrecisionContext, TruncatedSeries};

/// The constant crystals in normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    /// Slope `1 - 1/h`: `F a_i = p a_{i+1}` for `i < h`, `F a_h = a_1`.
    Sub1,
    /// Slope `1 + 1/h`: `F b_i = p b_{i+1}` for `i < h`, `F b_h = p^2 b_1`.
    Super1,
    /// Slope 1, rank `rho`: `F = p * Id`.
    Slope1 { rho: usize },
}

pub const MIN_HEIGHT: usize = 2;
pub const MAX_HEIGHT: usize = 10;

pub(crate) fn check_height(h: usize) -> Result<()> {
    if (MIN_HEIGHT..=MAX_HEIGHT).contains(&h) {
        Ok(())
    } else {
        Err(Error::UnsupportedHeight(h))
    }
}

/// Cyclic normal form: `e_i -> p e_{i+1}` for `i < h` and `e_h -> p^last_exponent e_1`.
pub(crate) fn cyclic_frobenius(ctx: PrecisionContext, h: usize, last_exponent: u32) -> SeriesMatrix {
    let mut f = SeriesMatrix::zeros(ctx, h, h);
    for i in 0..h {
        let e = if i == h - 1 { last_exponent } else { 1 };
        f.set((i + 1) % h, i, TruncatedSeries::constant(ctx, ctx.p_pow(e) as i128));
    }
    f
}

/// Standard slope crystals with zero connection.
///
/// `Sub1` and `Super1` carry the zero pairing (each is isotropic inside the
/// K3 lattice); `Slope1` carries `G = Id` with weight 2.
pub fn make_standard_crystal(
    ctx: PrecisionContext,
    h: usize,
    kind: StandardKind,
) -> Result<FCrystalPresentation> {
    check_height(h)?;
    let (frobenius, pairing) = match kind {
        StandardKind::Sub1 => (cyclic_frobenius(ctx, h, 0), SeriesMatrix::zeros(ctx, h, h)),
        StandardKind::Super1 => (cyclic_frobenius(ctx, h, 2), SeriesMatrix::zeros(ctx, h, h)),
        StandardKind::Slope1 { rho } => (
            SeriesMatrix::identity(ctx, rho).scale_int(ctx.p() as i128),
            SeriesMatrix::identity(ctx, rho),
        ),
    };
    let r = frobenius.rows();
    FCrystalPresentation::new(frobenius, SeriesMatrix::zeros(ctx, r, r), pairing, 2)
}

/// `sub1 (+) super1` in the basis `(a_1..a_h, b_1..b_h)` with
/// `<a_i, b_j> = delta_ij` and weight 2.
pub fn standard_pair(ctx: PrecisionContext, h: usize) -> Result<FCrystalPresentation> {
    let a = make_standard_crystal(ctx, h, StandardKind::Sub1)?;
    let b = make_standard_crystal(ctx, h, StandardKind::Super1)?;
    let sum = a.direct_sum(&b)?;
    let mut g = SeriesMatrix::zeros(ctx, 2 * h, 2 * h);
    for i in 0..h {
        g.set(i, h + i, TruncatedSeries::one(ctx));
        g.set(h + i, i, TruncatedSeries::one(ctx));
    }
    sum.with_pairing(g, 2)
}
