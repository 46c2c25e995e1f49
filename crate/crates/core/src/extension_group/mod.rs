//! Extensions `0 -> H_{<1} -> P -> H_{>1} -> 0` in canonical coordinates.
//!
//! `P` has basis `(a_0..a_{h-1}, c_0..c_{h-1})` where the `a_i` span the
//! sub1 crystal and the `c_i` lift the super1 basis with `<a_i, c_j> =
//! delta_ij`. The extension is recorded by three `h x h` matrices, indexed
//! `[i][j]`:
//! - `xi`: `nabla c_i = sum_j xi_ij a_j` (one-form bodies),
//! - `v`: `F(phi^* c_i) = p^(1 + [i = h-1]) c_{i+1} + sum_j v_ij a_j`,
//! - `m`: `<c_i, c_j> = (1 + delta_ij) m_ij`.

mod baer;
mod sample;
mod torsion;
mod trivialize;

pub use baer::{baer_sum, BaerMode};
pub use sample::{
    log_type_extension, random_alpha, random_extension, random_extension_pair, random_log_seeds,
    LogSeed,
};
pub use torsion::{p_torsion_check, TorsionOutcome, TraceStep};
pub use trivialize::{trivialize, Equation, Untrivializable};

use crate::crystal::standard::{check_height, cyclic_frobenius};
use crate::crystal::FCrystalPresentation;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic_series::{OneForm, PrecisionContext, TruncatedSeries};

/// The two ends of the extension: `H_{<1} = sub1` and `H_{>1} = super1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionContext {
    ctx: PrecisionContext,
    h: usize,
}

impl ExtensionContext {
    pub fn new(ctx: PrecisionContext, h: usize) -> Result<Self> {
        check_height(h)?;
        Ok(Self { ctx, h })
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn sub1(&self) -> FCrystalPresentation {
        crate::crystal::make_standard_crystal(self.ctx, self.h, crate::crystal::StandardKind::Sub1)
            .expect("height checked")
    }

    pub fn super1(&self) -> FCrystalPresentation {
        crate::crystal::make_standard_crystal(self.ctx, self.h, crate::crystal::StandardKind::Super1)
            .expect("height checked")
    }

    /// The split extension.
    pub fn zero(&self) -> ExtensionData {
        ExtensionData::zero(self.ctx, self.h)
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        Self {
            ctx: self.ctx.with_truncation(truncation),
            h: self.h,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionData {
    ctx: PrecisionContext,
    h: usize,
    xi: SeriesMatrix,
    v: SeriesMatrix,
    m: SeriesMatrix,
    geometric: bool,
}

/// `alpha_ij` with `alpha_ij(0) = 0`, splitting the extension through
/// `c_i = b_i + sum_j alpha_ij a_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrivializationWitness {
    alpha: SeriesMatrix,
}

impl TrivializationWitness {
    pub fn new(alpha: SeriesMatrix) -> Result<Self> {
        if alpha.rows() != alpha.cols() {
            return Err(Error::Dimension("witness must be square".into()));
        }
        check_height(alpha.rows())?;
        if let Some((i, j, _)) = alpha.entries().find(|(_, _, s)| !s.in_t_ideal()) {
            return Err(Error::WitnessInvalid(format!(
                "alpha[{i}][{j}] has a nonzero constant term"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn zero(ctx: PrecisionContext, h: usize) -> Self {
        Self {
            alpha: SeriesMatrix::zeros(ctx, h, h),
        }
    }

    pub fn alpha(&self) -> &SeriesMatrix {
        &self.alpha
    }

    pub fn context(&self) -> PrecisionContext {
        self.alpha.context()
    }

    pub fn height(&self) -> usize {
        self.alpha.rows()
    }
}

impl ExtensionData {
    pub fn new(
        xi: SeriesMatrix,
        v: SeriesMatrix,
        m: SeriesMatrix,
        geometric: bool,
    ) -> Result<Self> {
        let ctx = xi.context();
        let h = xi.rows();
        check_height(h)?;
        for (name, x) in [("xi", &xi), ("v", &v), ("m", &m)] {
            if x.rows() != h || x.cols() != h {
                return Err(Error::Dimension(format!("{name} must be {h}x{h}")));
            }
            if x.context() != ctx {
                return Err(Error::ContextMismatch);
            }
        }
        let e = Self {
            ctx,
            h,
            xi,
            v,
            m,
            geometric,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn zero(ctx: PrecisionContext, h: usize) -> Self {
        let z = SeriesMatrix::zeros(ctx, h, h);
        Self {
            ctx,
            h,
            xi: z.clone(),
            v: z.clone(),
            m: z,
            geometric: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some((i, j, _)) = self.v.entries().find(|(_, _, s)| !s.in_t_ideal()) {
            return Err(Error::NotExtensionShaped(format!(
                "v[{i}][{j}] has a nonzero constant term"
            )));
        }
        for i in 0..self.h {
            for j in i + 1..self.h {
                if self.m.get(i, j) != self.m.get(j, i) {
                    return Err(Error::NotExtensionShaped(format!(
                        "m is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if self.geometric {
            if let Some((i, j)) = self.rank_one_violation() {
                return Err(Error::HypothesisMissing(format!(
                    "geometric flag set but v[{i}][{j}] is not divisible by p"
                )));
            }
        }
        Ok(())
    }

    /// First `(i, j)` with `j >= 1` and `v_ij` not divisible by p.
    fn rank_one_violation(&self) -> Option<(usize, usize)> {
        (0..self.h)
            .flat_map(|i| (1..self.h).map(move |j| (i, j)))
            .find(|(i, j)| !self.v.get(*i, *j).is_divisible_by_p_pow(1))
    }

    /// The Frobenius of `P` is of rank one mod p on the `a`-components:
    /// `v_ij = 0 mod p` for `j >= 1`.
    pub fn satisfies_rank_one(&self) -> bool {
        self.rank_one_violation().is_none()
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn xi(&self) -> &SeriesMatrix {
        &self.xi
    }

    pub fn xi_form(&self, i: usize, j: usize) -> OneForm {
        OneForm::new(self.xi.get(i, j).clone())
    }

    pub fn v(&self) -> &SeriesMatrix {
        &self.v
    }

    pub fn m(&self) -> &SeriesMatrix {
        &self.m
    }

    pub fn is_geometric(&self) -> bool {
        self.geometric
    }

    pub fn with_geometric(mut self, geometric: bool) -> Result<Self> {
        self.geometric = geometric;
        self.validate()?;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.xi.is_zero() && self.v.is_zero() && self.m.is_zero()
    }

    /// Base change to a smaller truncation.
    pub fn truncate(&self, truncation: usize) -> Self {
        Self {
            ctx: self.ctx.with_truncation(truncation),
            h: self.h,
            xi: self.xi.truncate(truncation),
            v: self.v.truncate(truncation),
            m: self.m.truncate(truncation),
            geometric: self.geometric,
        }
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Ok(Self {
            ctx: self.ctx.with_precision(precision)?,
            h: self.h,
            xi: self.xi.with_precision(precision)?,
            v: self.v.with_precision(precision)?,
            m: self.m.with_precision(precision)?,
            geometric: self.geometric,
        })
    }

    /// Both crystal checkers pass on the assembled presentation.
    pub fn is_consistent(&self) -> bool {
        let c = assemble_crystal(self);
        crate::crystal::check_horizontality(&c).passed()
            && crate::crystal::check_pairing_compat(&c).passed()
    }

    /// Reads `(xi, v, m)` back from a rank-`2h` presentation in the
    /// canonical frame, checking every fixed block.
    pub fn from_crystal(c: &FCrystalPresentation, h: usize, geometric: bool) -> Result<Self> {
        check_height(h)?;
        if c.rank() != 2 * h {
            return Err(Error::NotExtensionShaped(format!(
                "rank {} is not 2h = {}",
                c.rank(),
                2 * h
            )));
        }
        if c.weight() != 2 {
            return Err(Error::NotExtensionShaped(format!("weight {} is not 2", c.weight())));
        }
        let ctx = c.context();
        let (a, cc) = (0..h, h..2 * h);
        let f = c.frobenius();
        let conn = c.connection();
        let g = c.pairing();
        let zero = SeriesMatrix::zeros(ctx, h, h);
        let id = SeriesMatrix::identity(ctx, h);
        let fixed = [
            ("Frobenius on H_{<1}", f.submatrix(a.clone(), a.clone()), cyclic_frobenius(ctx, h, 0)),
            ("Frobenius on H_{>1}", f.submatrix(cc.clone(), cc.clone()), cyclic_frobenius(ctx, h, 2)),
            ("Frobenius c-rows of a-columns", f.submatrix(cc.clone(), a.clone()), zero.clone()),
            ("connection on H_{<1}", conn.submatrix(a.clone(), a.clone()), zero.clone()),
            ("connection on H_{>1}", conn.submatrix(cc.clone(), cc.clone()), zero.clone()),
            ("connection c-rows of a-columns", conn.submatrix(cc.clone(), a.clone()), zero.clone()),
            ("pairing on H_{<1}", g.submatrix(a.clone(), a.clone()), zero.clone()),
            ("pairing <a, c>", g.submatrix(a.clone(), cc.clone()), id.clone()),
            ("pairing <c, a>", g.submatrix(cc.clone(), a.clone()), id),
        ];
        for (name, got, want) in fixed {
            if got != want {
                return Err(Error::NotExtensionShaped(format!("{name} is not standard")));
            }
        }
        let half = TruncatedSeries::constant(ctx, crate::padic_series::inverse_mod(2, ctx.modulus()) as i128);
        let xi = conn.submatrix(a.clone(), cc.clone()).transpose();
        let v = f.submatrix(a, cc.clone()).transpose();
        let m = SeriesMatrix::from_fn(ctx, h, h, |i, j| {
            let x = g.get(h + i, h + j);
            if i == j {
                x * &half
            } else {
                x.clone()
            }
        });
        Self::new(xi, v, m, geometric)
    }
}

/// `v_ij = p^(1 - [j = 0]) phi^*(alpha_{i, j-1}) - p^(1 + [i = h-1]) alpha_{i+1, j}`,
/// indices mod h.
pub(crate) fn frobenius_terms(alpha: &SeriesMatrix) -> SeriesMatrix {
    let h = alpha.rows();
    let ctx = alpha.context();
    let pull = alpha.frobenius_pullback();
    SeriesMatrix::from_fn(ctx, h, h, |i, j| {
        let prev = (j + h - 1) % h;
        let a = pull.get(i, prev).mul_p_pow(if j == 0 { 0 } else { 1 });
        let b = alpha.get((i + 1) % h, j).mul_p_pow(if i == h - 1 { 2 } else { 1 });
        &a - &b
    })
}

/// `(1 + delta_ij) m_ij = alpha_ij + alpha_ji`.
pub(crate) fn pairing_terms(alpha: &SeriesMatrix) -> SeriesMatrix {
    let h = alpha.rows();
    SeriesMatrix::from_fn(alpha.context(), h, h, |i, j| {
        if i == j {
            alpha.get(i, i).clone()
        } else {
            alpha.get(i, j) + alpha.get(j, i)
        }
    })
}

/// The extension split by `c_i = b_i + sum_j alpha_ij a_j`.
pub fn from_alpha(w: &TrivializationWitness, ectx: &ExtensionContext) -> Result<ExtensionData> {
    let alpha = w.alpha();
    if alpha.rows() != ectx.height() {
        return Err(Error::Dimension(format!(
            "witness has height {}, context has {}",
            alpha.rows(),
            ectx.height()
        )));
    }
    let xi = alpha.derivative();
    ExtensionData::new(xi, frobenius_terms(alpha), pairing_terms(alpha), false)
}

/// Rank-`2h` presentation in the basis `(a_0..a_{h-1}, c_0..c_{h-1})`.
pub fn assemble_crystal(e: &ExtensionData) -> FCrystalPresentation {
    let (ctx, h) = (e.ctx, e.h);
    let mut f = SeriesMatrix::zeros(ctx, 2 * h, 2 * h);
    f.set_block(0, 0, &cyclic_frobenius(ctx, h, 0));
    f.set_block(h, h, &cyclic_frobenius(ctx, h, 2));
    f.set_block(0, h, &e.v.transpose());
    let mut conn = SeriesMatrix::zeros(ctx, 2 * h, 2 * h);
    conn.set_block(0, h, &e.xi.transpose());
    let mut g = SeriesMatrix::zeros(ctx, 2 * h, 2 * h);
    let id = SeriesMatrix::identity(ctx, h);
    g.set_block(0, h, &id);
    g.set_block(h, 0, &id);
    let cc = SeriesMatrix::from_fn(ctx, h, h, |i, j| {
        if i == j {
            e.m.get(i, i).scale_int(2)
        } else {
            e.m.get(i, j).clone()
        }
    });
    g.set_block(h, h, &cc);
    FCrystalPresentation::new(f, conn, g, 2).expect("shapes are consistent")
}

/// Multiplication by `n` in the extension group.
pub fn int_scale(e: &ExtensionData, n: i128) -> ExtensionData {
    ExtensionData {
        ctx: e.ctx,
        h: e.h,
        xi: e.xi.scale_int(n),
        v: e.v.scale_int(n),
        m: e.m.scale_int(n),
        geometric: e.geometric,
    }
}
