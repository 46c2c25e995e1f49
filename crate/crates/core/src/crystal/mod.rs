//! Presentations of F-crystals over the truncated ring.
//!
//! A presentation fixes a basis `e_1..e_r` and records
//! - `frobenius`: column `j` is `F(phi^* e_j)` in the basis,
//! - `connection`: column `j` is `nabla e_j`, stored as one-form bodies,
//! - `pairing`: the Gram matrix `G_ij = <e_i, e_j>`,
//! - `weight`: `<F x, F y> = p^weight * phi^* <x, y>`.

mod checks;
mod hom;
mod perp;
mod slopes;
pub(crate) mod standard;

pub use checks::{check_horizontality, check_pairing_compat, CheckFailure, CheckReport, Relation};
pub use hom::{hom_crystal, hom_slopes};
pub use perp::{complement_basis, orthogonal_complement, span_contains};
pub use slopes::{newton_polygon_slopes, newton_slopes, SlopeMultiset};
pub use standard::{make_standard_crystal, standard_pair, StandardKind};

use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic_series::PrecisionContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FCrystalPresentation {
    ctx: PrecisionContext,
    frobenius: SeriesMatrix,
    connection: SeriesMatrix,
    pairing: SeriesMatrix,
    weight: u32,
}

impl FCrystalPresentation {
    pub fn new(
        frobenius: SeriesMatrix,
        connection: SeriesMatrix,
        pairing: SeriesMatrix,
        weight: u32,
    ) -> Result<Self> {
        let ctx = frobenius.context();
        let r = frobenius.rows();
        for (name, m) in [
            ("frobenius", &frobenius),
            ("connection", &connection),
            ("pairing", &pairing),
        ] {
            if m.context() != ctx {
                return Err(Error::ContextMismatch);
            }
            if m.rows() != r || m.cols() != r {
                return Err(Error::Dimension(format!(
                    "{name} matrix is {}x{}, expected {r}x{r}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Self {
            ctx,
            frobenius,
            connection,
            pairing,
            weight,
        })
    }

    /// The rank-0 presentation.
    pub fn zero(ctx: PrecisionContext, weight: u32) -> Self {
        let z = SeriesMatrix::zeros(ctx, 0, 0);
        Self {
            ctx,
            frobenius: z.clone(),
            connection: z.clone(),
            pairing: z,
            weight,
        }
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn rank(&self) -> usize {
        self.frobenius.rows()
    }

    pub fn frobenius(&self) -> &SeriesMatrix {
        &self.frobenius
    }

    pub fn connection(&self) -> &SeriesMatrix {
        &self.connection
    }

    pub fn pairing(&self) -> &SeriesMatrix {
        &self.pairing
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn with_pairing(mut self, pairing: SeriesMatrix, weight: u32) -> Result<Self> {
        if pairing.rows() != self.rank() || pairing.cols() != self.rank() {
            return Err(Error::Dimension("pairing shape".into()));
        }
        self.pairing = pairing;
        self.weight = weight;
        Ok(self)
    }

    /// Zero connection and `t`-independent Frobenius.
    pub fn is_constant(&self) -> bool {
        self.connection.is_zero() && self.frobenius.is_constant()
    }

    /// Block direct sum; the pairing is block diagonal, so both summands
    /// must carry the same weight.
    pub fn direct_sum(&self, other: &FCrystalPresentation) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let weight = match (self.rank(), other.rank()) {
            (0, _) => other.weight,
            (_, 0) => self.weight,
            _ if self.weight == other.weight => self.weight,
            _ => {
                return Err(Error::Dimension(format!(
                    "cannot sum pairings of weights {} and {}",
                    self.weight, other.weight
                )))
            }
        };
        Ok(Self {
            ctx: self.ctx,
            frobenius: SeriesMatrix::block_diag(&[&self.frobenius, &other.frobenius]),
            connection: SeriesMatrix::block_diag(&[&self.connection, &other.connection]),
            pairing: SeriesMatrix::block_diag(&[&self.pairing, &other.pairing]),
            weight,
        })
    }

    /// Presentation in the new basis whose vectors are the columns of `basis`
    /// (an invertible matrix with inverse `inverse`).
    pub fn change_basis(&self, basis: &SeriesMatrix, inverse: &SeriesMatrix) -> Result<Self> {
        let id = SeriesMatrix::identity(self.ctx, self.rank());
        if basis.checked_mul(inverse)? != id {
            return Err(Error::NonInvertible);
        }
        let frobenius = &(inverse * &self.frobenius) * &basis.frobenius_pullback();
        let connection = inverse * &(&basis.derivative() + &(&self.connection * basis));
        let pairing = &(&basis.transpose() * &self.pairing) * basis;
        Self::new(frobenius, connection, pairing, self.weight)
    }

    /// Base change to a smaller truncation.
    pub fn truncate(&self, truncation: usize) -> Self {
        Self {
            ctx: self.ctx.with_truncation(truncation),
            frobenius: self.frobenius.truncate(truncation),
            connection: self.connection.truncate(truncation),
            pairing: self.pairing.truncate(truncation),
            weight: self.weight,
        }
    }
}
