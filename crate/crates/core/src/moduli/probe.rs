use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{multiply_by_p, random_point, Population};
use crate::error::Result;
use crate::extension_group::{p_torsion_check, trivialize, ExtensionContext, TorsionOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub sample: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub seed: u64,
    pub samples: usize,
    /// Samples whose `[p]Y` does not trivialize.
    pub nontrivial_py: usize,
    /// Samples with trivial `[p]Y` whose `Y` was certified trivial.
    pub torsion_certified: usize,
    /// Samples with trivial `[p]Y` where the certificate could not be
    /// completed at this truncation.
    pub inconclusive: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Sample `i` draws from its own ChaCha8 stream of `seed`. Odd samples use
/// log-type classes when `M >= p^2`, all others integral ones.
pub fn multiply_by_p_injectivity_probe(
    ectx: &ExtensionContext,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let mut report = ProbeReport {
        seed,
        samples,
        nontrivial_py: 0,
        torsion_certified: 0,
        inconclusive: 0,
        counterexamples: Vec::new(),
    };
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let population = if i % 2 == 1 {
            Population::LogType
        } else {
            Population::Integral
        };
        let y = random_point(ectx, n, population, &mut rng)?;
        let py = multiply_by_p(&y)?;
        let witness = match trivialize(py.extension()) {
            Ok(w) => w,
            Err(_) => {
                report.nontrivial_py += 1;
                continue;
            }
        };
        match p_torsion_check(y.extension(), &witness) {
            Ok(TorsionOutcome::Certified { trace, .. }) => match trace.iter().find(|s| !s.holds) {
                None => report.torsion_certified += 1,
                Some(step) => report.counterexamples.push(Counterexample {
                    sample: i,
                    reason: format!("certificate replays a failing step: {}", step.statement),
                }),
            },
            Ok(TorsionOutcome::Inconclusive { .. }) => report.inconclusive += 1,
            Ok(TorsionOutcome::Refuted { step, .. }) => report.counterexamples.push(Counterexample {
                sample: i,
                reason: format!("[p]Y is trivial but Y is not: {}", step.statement),
            }),
            Err(e) => report.counterexamples.push(Counterexample {
                sample: i,
                reason: format!("torsion check rejected its input: {e}"),
            }),
        }
    }
    Ok(report)
}
