//! Exact arithmetic in `Z/p^N` and in the truncated power-series ring
//! `W[[t]] / (p^N, t^(M+1))`, with the Frobenius lift `phi(t) = t^p`.
//!
//! The residue field is `F_p`, so `W = Z_p` and the Witt-vector Frobenius is
//! the identity on coefficients. All values are immutable after
//! construction.

mod context;
mod scalar;
mod series;

pub use context::PrecisionContext;
pub use scalar::PAdicScalar;
pub(crate) use scalar::inverse_mod;
pub use series::{series_arith, OneForm, SeriesOp, TruncatedSeries};
