use num_rational::Rational64;

use crate::crystal::{hom_crystal, newton_slopes, SlopeMultiset};
use crate::error::{Error, Result};
use crate::extension_group::ExtensionContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeReport {
    /// Frobenius slope of the formal group.
    pub slope: Rational64,
    /// Common slope of `Hom(H_{>1}, H_{<1})(2)`.
    pub hom_slope: Rational64,
    /// `slope(H_{>1}) - slope(H_{<1})`.
    pub difference: Rational64,
    pub detail: SlopeMultiset,
}

pub fn slope_report(ectx: &ExtensionContext) -> Result<SlopeReport> {
    let hom = hom_crystal(&ectx.super1(), &ectx.sub1(), 2)?;
    let detail = newton_slopes(&hom)?;
    let hom_slope = detail
        .single_slope()
        .ok_or_else(|| Error::PrecisionInsufficient(format!("hom slopes {detail} are not isoclinic")))?;
    let single = |m: SlopeMultiset| {
        m.single_slope()
            .ok_or_else(|| Error::PrecisionInsufficient(format!("slopes {m} are not isoclinic")))
    };
    let difference = single(newton_slopes(&ectx.super1())?)? - single(newton_slopes(&ectx.sub1())?)?;
    Ok(SlopeReport {
        slope: Rational64::from(2) - hom_slope,
        hom_slope,
        difference,
        detail,
    })
}
