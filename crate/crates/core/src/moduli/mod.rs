//! Points of the formal moduli over `R = k[t]/(t^n)`.
//!
//! A point is an extension `P` of `H_{>1}` by `H_{<1}` over the naive lift
//! `W[[t]]/(p^N, t^n)` together with a Hodge line generated by
//! `e = c_{h-1} + sum_j s_j a_j`. Points are added by Baer sum on the
//! extension and by adding the `a`-components of the normalized generators.

mod grouplaw;
mod probe;
mod slope;

pub use grouplaw::{group_law_check, AxiomTally, GroupLawReport, AXIOMS};
pub use probe::{multiply_by_p_injectivity_probe, Counterexample, ProbeReport};
pub use slope::{slope_report, SlopeReport};

use rand::Rng;

use crate::crystal::FCrystalPresentation;
use crate::error::{Error, Result};
use crate::extension_group::{
    assemble_crystal, baer_sum, from_alpha, int_scale, log_type_extension, random_alpha,
    random_log_seeds, BaerMode, ExtensionContext, ExtensionData,
};
use crate::matrix::SeriesMatrix;
use crate::padic_series::{PrecisionContext, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationPoint {
    ectx: ExtensionContext,
    n: usize,
    extension: ExtensionData,
    hodge: Vec<TruncatedSeries>,
}

/// Which kind of extension class a random point carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Population {
    /// Integral witness with support in degrees `1..=min(n-1, M/p)`.
    Integral,
    /// Log-type class; needs `M >= p^2`, otherwise falls back to `Integral`.
    LogType,
}

/// The extension context over `k[t]/(t^n)`, i.e. truncation `n - 1`.
pub fn base_context(ectx: &ExtensionContext, n: usize) -> Result<ExtensionContext> {
    if n == 0 {
        return Err(Error::InvalidPoint("base degree must be at least 1".into()));
    }
    Ok(ectx.with_truncation(n - 1))
}

impl DeformationPoint {
    pub fn new(
        ectx: &ExtensionContext,
        n: usize,
        extension: ExtensionData,
        hodge: Vec<TruncatedSeries>,
    ) -> Result<Self> {
        let ectx = base_context(ectx, n)?;
        let h = ectx.height();
        if extension.context() != ectx.context() || extension.height() != h {
            return Err(Error::ContextMismatch);
        }
        if hodge.len() != h {
            return Err(Error::Dimension(format!("hodge vector must have length {h}")));
        }
        if hodge.iter().any(|s| s.context() != ectx.context()) {
            return Err(Error::ContextMismatch);
        }
        let y = Self {
            ectx,
            n,
            extension,
            hodge,
        };
        y.validate()?;
        Ok(y)
    }

    fn validate(&self) -> Result<()> {
        let h = self.ectx.height();
        if let Some(j) = self.hodge.iter().position(|s| !s.in_t_ideal()) {
            return Err(Error::InvalidPoint(format!("s_{j} does not vanish at t = 0")));
        }
        if let Some((i, j, _)) = self.extension.m().entries().find(|(_, _, s)| !s.in_t_ideal()) {
            return Err(Error::InvalidPoint(format!("m[{i}][{j}] does not vanish at t = 0")));
        }
        let c = self.assemble();
        let e = self.generator();
        let norm = &(&e.transpose() * c.pairing()) * &e;
        if !norm.is_zero() {
            return Err(Error::InvalidPoint(format!(
                "Hodge line is not isotropic: s_{} != -m[{}][{}]",
                h - 1,
                h - 1,
                h - 1
            )));
        }
        let fe = c.frobenius() * &e.frobenius_pullback();
        if let Some(r) = (0..2 * h).find(|r| !fe.get(*r, 0).is_divisible_by_p_pow(2)) {
            return Err(Error::InvalidPoint(format!(
                "F(e) is not divisible by p^2 in basis component {r}"
            )));
        }
        Ok(())
    }

    pub fn extension_context(&self) -> &ExtensionContext {
        &self.ectx
    }

    pub fn context(&self) -> PrecisionContext {
        self.ectx.context()
    }

    pub fn height(&self) -> usize {
        self.ectx.height()
    }

    pub fn base_degree(&self) -> usize {
        self.n
    }

    pub fn extension(&self) -> &ExtensionData {
        &self.extension
    }

    pub fn hodge(&self) -> &[TruncatedSeries] {
        &self.hodge
    }

    /// The Hodge generator as a `2h x 1` column in the basis `(a, c)`.
    pub fn generator(&self) -> SeriesMatrix {
        let (ctx, h) = (self.context(), self.height());
        SeriesMatrix::from_fn(ctx, 2 * h, 1, |r, _| {
            if r < h {
                self.hodge[r].clone()
            } else if r == 2 * h - 1 {
                TruncatedSeries::one(ctx)
            } else {
                TruncatedSeries::zero(ctx)
            }
        })
    }

    pub fn assemble(&self) -> FCrystalPresentation {
        assemble_crystal(&self.extension)
    }

    pub fn is_identity(&self) -> bool {
        self.extension.is_zero() && self.hodge.iter().all(|s| s.is_zero())
    }
}

pub fn identity_point(ectx: &ExtensionContext, n: usize) -> Result<DeformationPoint> {
    let base = base_context(ectx, n)?;
    let ctx = base.context();
    DeformationPoint::new(
        &base,
        n,
        base.zero(),
        vec![TruncatedSeries::zero(ctx); base.height()],
    )
}

pub fn add_points(y: &DeformationPoint, z: &DeformationPoint) -> Result<DeformationPoint> {
    if y.ectx != z.ectx || y.n != z.n {
        return Err(Error::ContextMismatch);
    }
    let extension = baer_sum(&y.extension, &z.extension, BaerMode::Fast)?;
    let hodge = y.hodge.iter().zip(&z.hodge).map(|(a, b)| a + b).collect();
    DeformationPoint::new(&y.ectx, y.n, extension, hodge)
}

/// Same as [`add_points`], with the extension summed by the diagram
/// construction `mode`.
pub fn add_points_with(
    y: &DeformationPoint,
    z: &DeformationPoint,
    mode: BaerMode,
) -> Result<DeformationPoint> {
    if y.ectx != z.ectx || y.n != z.n {
        return Err(Error::ContextMismatch);
    }
    let extension = baer_sum(&y.extension, &z.extension, mode)?;
    let hodge = y.hodge.iter().zip(&z.hodge).map(|(a, b)| a + b).collect();
    DeformationPoint::new(&y.ectx, y.n, extension, hodge)
}

pub fn negate(y: &DeformationPoint) -> DeformationPoint {
    DeformationPoint {
        ectx: y.ectx,
        n: y.n,
        extension: int_scale(&y.extension, -1),
        hodge: y.hodge.iter().map(|s| -s).collect(),
    }
}

/// `[k] Y` by repeated addition (negation first for `k < 0`).
pub fn multiply(y: &DeformationPoint, k: i64) -> Result<DeformationPoint> {
    let base = if k < 0 { negate(y) } else { y.clone() };
    let mut acc = identity_point(&y.ectx, y.n)?;
    for _ in 0..k.unsigned_abs() {
        acc = add_points(&acc, &base)?;
    }
    Ok(acc)
}

pub fn multiply_by_p(y: &DeformationPoint) -> Result<DeformationPoint> {
    multiply(y, y.context().p() as i64)
}

/// Base change along `k[t]/(t^n) -> k[t]/(t^n')`.
pub fn truncate(y: &DeformationPoint, n_prime: usize) -> Result<DeformationPoint> {
    if n_prime == 0 || n_prime > y.n {
        return Err(Error::InvalidPoint(format!(
            "cannot base change from degree {} to {n_prime}",
            y.n
        )));
    }
    let top = n_prime - 1;
    DeformationPoint::new(
        &y.ectx,
        n_prime,
        y.extension.truncate(top),
        y.hodge.iter().map(|s| s.truncate(top)).collect(),
    )
}

/// Over `k[eps]`: the `eps`-coefficients of `s_0..s_{h-2}` mod p.
pub fn tangent_coordinates(y: &DeformationPoint) -> Result<Vec<u64>> {
    if y.n != 2 {
        return Err(Error::WrongBase(y.n));
    }
    let p = y.context().p();
    Ok(y.hodge[..y.height() - 1].iter().map(|s| s.raw(1) % p).collect())
}

/// The point over `k[eps]` with split extension and `s_j = c_j eps`.
pub fn point_from_tangent(ectx: &ExtensionContext, coords: &[u64]) -> Result<DeformationPoint> {
    let base = base_context(ectx, 2)?;
    let (ctx, h) = (base.context(), base.height());
    if coords.len() != h - 1 {
        return Err(Error::Dimension(format!("tangent vector must have length {}", h - 1)));
    }
    let mut hodge: Vec<TruncatedSeries> = coords
        .iter()
        .map(|c| TruncatedSeries::monomial(ctx, (c % ctx.p()) as i128, 1))
        .collect();
    hodge.push(TruncatedSeries::zero(ctx));
    DeformationPoint::new(&base, 2, base.zero(), hodge)
}

/// A Hodge vector for `extension`: `s_{h-1} = -m_{h-1,h-1}` and, for
/// `k >= 1`, `s_{k-1}(d) = -w(pd) mod p` where `v_{h-1,k} = p w`.
pub fn hodge_particular(extension: &ExtensionData) -> Result<Vec<TruncatedSeries>> {
    let (ctx, h) = (extension.context(), extension.height());
    let p = ctx.p();
    let top = ctx.truncation();
    let mut hodge = Vec::with_capacity(h);
    for k in 1..h {
        let w = extension.v().get(h - 1, k).div_p_pow(1).map_err(|_| {
            Error::InvalidPoint(format!("v[{}][{k}] is not divisible by p", h - 1))
        })?;
        let mut s = vec![0u64; ctx.len()];
        for d in 1..=top {
            let r = w.raw(d) % p;
            if (d as u64).is_multiple_of(p) {
                s[d / p as usize] = (p - r) % p;
            } else if r != 0 {
                return Err(Error::InvalidPoint(format!(
                    "v[{}][{k}] / p is nonzero mod p at degree {d}, outside the Frobenius image",
                    h - 1
                )));
            }
        }
        hodge.push(TruncatedSeries::from_residues(ctx, s)?);
    }
    hodge.push(-extension.m().get(h - 1, h - 1));
    Ok(hodge)
}

/// A random point of the given population, with a random admissible Hodge
/// line: the particular solution plus `p * (random)` on degrees up to `M/p`
/// and arbitrary coefficients above.
pub fn random_point<R: Rng + ?Sized>(
    ectx: &ExtensionContext,
    n: usize,
    population: Population,
    rng: &mut R,
) -> Result<DeformationPoint> {
    let base = base_context(ectx, n)?;
    let (ctx, h) = (base.context(), base.height());
    let top = ctx.truncation();
    let window = ctx.frobenius_window();
    let support = top.min(window);
    let seeds = match population {
        Population::LogType => random_log_seeds(&base, rng),
        Population::Integral => Vec::new(),
    };
    let extension = if seeds.is_empty() {
        let mut alpha = random_alpha(ctx, h, support, rng);
        while support > 0 && alpha.alpha().is_zero() {
            alpha = random_alpha(ctx, h, support, rng);
        }
        from_alpha(&alpha, &base)?.with_geometric(true)?
    } else {
        let gamma = random_alpha(ctx, h, support, rng);
        log_type_extension(&base, &seeds, Some(&gamma))?
    };
    let mut hodge = hodge_particular(&extension)?;
    for s in hodge.iter_mut().take(h - 1) {
        let free: Vec<i128> = (0..=top)
            .map(|d| match d {
                0 => 0,
                d if d <= window => ctx.p() as i128 * rng.gen_range(0..ctx.modulus()) as i128,
                _ => rng.gen_range(0..ctx.modulus()) as i128,
            })
            .collect();
        *s += &TruncatedSeries::from_coeffs(ctx, &free);
    }
    DeformationPoint::new(&base, n, extension, hodge)
}
