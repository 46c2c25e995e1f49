use super::{assemble_crystal, ExtensionData};
use crate::crystal::FCrystalPresentation;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic_series::PrecisionContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaerMode {
    /// Componentwise sum of `(xi, v, m)`.
    Fast,
    /// Pull back along the diagonal of `H_{>1}`, then push out along the sum
    /// map of `H_{<1}`.
    PullbackPushout,
    /// Push out first, then pull back.
    PushoutPullback,
}

impl BaerMode {
    pub fn name(&self) -> &'static str {
        match self {
            BaerMode::Fast => "fast",
            BaerMode::PullbackPushout => "pp",
            BaerMode::PushoutPullback => "pop",
        }
    }
}

/// Baer sum of two extensions with the same ends.
pub fn baer_sum(e1: &ExtensionData, e2: &ExtensionData, mode: BaerMode) -> Result<ExtensionData> {
    if e1.ctx != e2.ctx || e1.h != e2.h {
        return Err(Error::ContextMismatch);
    }
    let geometric = e1.geometric && e2.geometric;
    match mode {
        BaerMode::Fast => Ok(ExtensionData {
            ctx: e1.ctx,
            h: e1.h,
            xi: &e1.xi + &e2.xi,
            v: &e1.v + &e2.v,
            m: &e1.m + &e2.m,
            geometric,
        }),
        BaerMode::PullbackPushout => pullback_pushout(e1, e2, geometric),
        BaerMode::PushoutPullback => pushout_pullback(e1, e2, geometric),
    }
}

/// 0/1 matrix with ones at the given `(row, col)` positions.
fn selector(ctx: PrecisionContext, rows: usize, cols: usize, ones: &[(usize, usize)]) -> SeriesMatrix {
    let mut m = SeriesMatrix::zeros(ctx, rows, cols);
    for (r, c) in ones {
        m.set(*r, *c, crate::padic_series::TruncatedSeries::one(ctx));
    }
    m
}

/// Frobenius and connection on a submodule with inclusion `inc` and left
/// inverse `left`, checking that both preserve it.
fn restrict_to_sub(
    c: &FCrystalPresentation,
    inc: &SeriesMatrix,
    left: &SeriesMatrix,
    what: &str,
) -> Result<(SeriesMatrix, SeriesMatrix)> {
    let top = c.context().truncation();
    let fi = c.frobenius() * inc;
    let f = left * &fi;
    if (inc * &f) != fi {
        return Err(Error::NotStable(format!("Frobenius does not preserve the {what}")));
    }
    let ai = c.connection() * inc;
    let a = left * &ai;
    if (inc * &a).cut_above(top) != ai.cut_above(top) {
        return Err(Error::NotStable(format!("connection does not preserve the {what}")));
    }
    Ok((f, a))
}

/// Frobenius and connection on a quotient with projection `proj` and
/// section `sec`, checking that the kernel is preserved.
fn descend_to_quotient(
    f: &SeriesMatrix,
    a: &SeriesMatrix,
    proj: &SeriesMatrix,
    sec: &SeriesMatrix,
    what: &str,
) -> Result<(SeriesMatrix, SeriesMatrix)> {
    let top = f.context().truncation();
    let pf = proj * f;
    let fq = &pf * sec;
    if &fq * proj != pf {
        return Err(Error::NotStable(format!("Frobenius does not descend to the {what}")));
    }
    let pa = proj * a;
    let aq = &pa * sec;
    if (&aq * proj).cut_above(top) != pa.cut_above(top) {
        return Err(Error::NotStable(format!("connection does not descend to the {what}")));
    }
    Ok((fq, aq))
}

fn direct_sum(e1: &ExtensionData, e2: &ExtensionData) -> Result<FCrystalPresentation> {
    // basis (a1, c1, a2, c2)
    assemble_crystal(e1).direct_sum(&assemble_crystal(e2))
}

fn pullback_pushout(e1: &ExtensionData, e2: &ExtensionData, geometric: bool) -> Result<ExtensionData> {
    let (ctx, h) = (e1.ctx, e1.h);
    let sum = direct_sum(e1, e2)?;

    // P' = pullback along the diagonal, basis (a1, a2, d) with d_i = c1_i + c2_i
    let mut inc = Vec::new();
    let mut left = Vec::new();
    for i in 0..h {
        inc.extend([(i, i), (2 * h + i, h + i), (h + i, 2 * h + i), (3 * h + i, 2 * h + i)]);
        left.extend([(i, i), (h + i, 2 * h + i), (2 * h + i, h + i)]);
    }
    let inc = selector(ctx, 4 * h, 3 * h, &inc);
    let left = selector(ctx, 3 * h, 4 * h, &left);
    let (f1, a1) = restrict_to_sub(&sum, &inc, &left, "diagonal pullback")?;
    let g1 = &(&inc.transpose() * sum.pairing()) * &inc;

    // pushout along a1 + a2 -> a; the section keeps the first copy
    let mut proj = Vec::new();
    let mut sec = Vec::new();
    for i in 0..h {
        proj.extend([(i, i), (i, h + i), (h + i, 2 * h + i)]);
        sec.extend([(i, i), (2 * h + i, h + i)]);
    }
    let proj = selector(ctx, 2 * h, 3 * h, &proj);
    let sec = selector(ctx, 3 * h, 2 * h, &sec);
    let (f, a) = descend_to_quotient(&f1, &a1, &proj, &sec, "sum pushout")?;
    let g = &(&sec.transpose() * &g1) * &sec;
    if &(&proj.transpose() * &g) * &proj != g1 {
        return Err(Error::NotStable("pairing does not descend to the sum pushout".into()));
    }
    ExtensionData::from_crystal(&FCrystalPresentation::new(f, a, g, 2)?, h, geometric)
}

fn pushout_pullback(e1: &ExtensionData, e2: &ExtensionData, geometric: bool) -> Result<ExtensionData> {
    let (ctx, h) = (e1.ctx, e1.h);
    let sum = direct_sum(e1, e2)?;

    // P'' = pushout along the sum map, basis (a, c1, c2)
    let mut proj = Vec::new();
    let mut sec = Vec::new();
    for i in 0..h {
        proj.extend([(i, i), (i, 2 * h + i), (h + i, h + i), (2 * h + i, 3 * h + i)]);
        sec.extend([(i, i), (h + i, h + i), (3 * h + i, 2 * h + i)]);
    }
    let proj = selector(ctx, 3 * h, 4 * h, &proj);
    let sec = selector(ctx, 4 * h, 3 * h, &sec);
    let (f1, a1) = descend_to_quotient(sum.frobenius(), sum.connection(), &proj, &sec, "sum pushout")?;

    // pullback along the diagonal, basis (a, d) with d_i = c1_i + c2_i
    let mut inc = Vec::new();
    let mut left = Vec::new();
    for i in 0..h {
        inc.extend([(i, i), (h + i, h + i), (2 * h + i, h + i)]);
        left.extend([(i, i), (h + i, h + i)]);
    }
    let inc = selector(ctx, 3 * h, 2 * h, &inc);
    let left = selector(ctx, 2 * h, 3 * h, &left);
    let mid = FCrystalPresentation::new(f1, a1, SeriesMatrix::zeros(ctx, 3 * h, 3 * h), 2)?;
    let (f, a) = restrict_to_sub(&mid, &inc, &left, "diagonal pullback")?;

    // the pairing is evaluated on lifts to P1 (+) P2
    let lift = &sec * &inc;
    let g = &(&lift.transpose() * sum.pairing()) * &lift;
    ExtensionData::from_crystal(&FCrystalPresentation::new(f, a, g, 2)?, h, geometric)
}
