//! Exact F-crystal calculus over `W[[t]]/(p^N, t^(M+1))` with `W = Z_p`.
//!
//! The extension group of the slope `1 + 1/h` crystal by the slope `1 - 1/h`
//! crystal, its Baer-sum group law, deformation points with Hodge lines, and
//! the p-divisibility and slope checks built on them.

pub mod crystal;
pub mod error;
pub mod extension_group;
pub mod json;
pub mod matrix;
pub mod moduli;
pub mod padic_series;

pub use crystal::{FCrystalPresentation, SlopeMultiset, StandardKind};
pub use error::{Error, Result};
pub use extension_group::{
    baer_sum, from_alpha, p_torsion_check, trivialize, BaerMode, ExtensionContext, ExtensionData,
    TorsionOutcome, TrivializationWitness, Untrivializable,
};
pub use matrix::SeriesMatrix;
pub use moduli::{add_points, identity_point, slope_report, DeformationPoint, ProbeReport};
pub use padic_series::{OneForm, PAdicScalar, PrecisionContext, TruncatedSeries};
