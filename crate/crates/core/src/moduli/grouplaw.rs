use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    add_points, add_points_with, identity_point, negate, random_point, tangent_coordinates, truncate,
    Population,
};
use crate::crystal::{check_horizontality, check_pairing_compat};
use crate::error::Result;
use crate::extension_group::{BaerMode, ExtensionContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomTally {
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLawReport {
    pub seed: u64,
    pub samples: usize,
    pub axioms: Vec<AxiomTally>,
    /// `(sample, axiom)` of the first failure.
    pub first_failure: Option<(usize, &'static str)>,
}

impl GroupLawReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub const AXIOMS: [&str; 8] = [
    "identity",
    "inverse",
    "commutativity",
    "associativity",
    "closure",
    "diagram-sum",
    "functoriality",
    "tangent-additivity",
];

/// Checks the group axioms on `samples` random triples over `k[t]/(t^n)`.
/// Functoriality truncates to `n' = 1 + i mod (n - 1)`; tangent additivity
/// is read after base change to `k[eps]` and is skipped for `n < 2`.
pub fn group_law_check(ectx: &ExtensionContext, n: usize, samples: usize, seed: u64) -> Result<GroupLawReport> {
    let mut tallies: Vec<AxiomTally> = AXIOMS
        .iter()
        .map(|name| AxiomTally {
            name,
            checked: 0,
            failed: 0,
        })
        .collect();
    let mut first_failure = None;
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let pop = |k: usize| {
            if (i + k) % 2 == 1 {
                Population::LogType
            } else {
                Population::Integral
            }
        };
        let x = random_point(ectx, n, pop(0), &mut rng)?;
        let y = random_point(ectx, n, pop(1), &mut rng)?;
        let z = random_point(ectx, n, pop(2), &mut rng)?;
        let xy = add_points(&x, &y)?;
        let zero = identity_point(ectx, n)?;
        let c = xy.assemble();
        let mut results = vec![
            add_points(&x, &zero)? == x,
            add_points(&x, &negate(&x))?.is_identity(),
            xy == add_points(&y, &x)?,
            add_points(&xy, &z)? == add_points(&x, &add_points(&y, &z)?)?,
            check_horizontality(&c).passed() && check_pairing_compat(&c).passed(),
            add_points_with(&x, &y, BaerMode::PullbackPushout)? == xy
                && add_points_with(&x, &y, BaerMode::PushoutPullback)? == xy,
        ];
        let functorial = if n >= 2 {
            let n2 = 1 + i % (n - 1);
            Some(truncate(&xy, n2)? == add_points(&truncate(&x, n2)?, &truncate(&y, n2)?)?)
        } else {
            None
        };
        let tangent = if n >= 2 {
            let p = ectx.context().p();
            let (tx, ty) = (tangent_coordinates(&truncate(&x, 2)?)?, tangent_coordinates(&truncate(&y, 2)?)?);
            let sum: Vec<u64> = tx.iter().zip(&ty).map(|(a, b)| (a + b) % p).collect();
            Some(tangent_coordinates(&truncate(&xy, 2)?)? == sum)
        } else {
            None
        };
        results.extend([functorial, tangent].into_iter().flatten());
        for (k, ok) in results.into_iter().enumerate() {
            tallies[k].checked += 1;
            if !ok {
                tallies[k].failed += 1;
                first_failure.get_or_insert((i, tallies[k].name));
            }
        }
    }
    Ok(GroupLawReport {
        seed,
        samples,
        axioms: tallies,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_series::PrecisionContext;

    #[test]
    fn all_axioms_hold() {
        let e = ExtensionContext::new(PrecisionContext::new(3, 8, 32).unwrap(), 3).unwrap();
        for n in [1, 2, 6, 12] {
            let r = group_law_check(&e, n, 6, 1).unwrap();
            assert!(r.passed(), "n={n}: {:?}", r.first_failure);
            let checked: Vec<usize> = r.axioms.iter().map(|a| a.checked).collect();
            if n >= 2 {
                assert_eq!(checked, vec![6; 8]);
            } else {
                assert_eq!(checked, vec![6, 6, 6, 6, 6, 6, 0, 0]);
            }
        }
    }
}
