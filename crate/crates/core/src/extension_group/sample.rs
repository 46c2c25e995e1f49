//! Seeded generators for extension classes.
//!
//! Trivial classes come from integral witnesses. Nontrivial classes come
//! from witnesses `alpha` with p-power denominators whose data `(xi, v, m)`
//! is nevertheless integral ("log-type" classes): the coefficient of
//! `alpha_{0,j}` at a degree divisible by p may carry a `1/p`, and the
//! Frobenius and pairing equations then force the rest of `alpha` modulo
//! integers.

use rand::Rng;

use super::{from_alpha, ExtensionContext, ExtensionData, TrivializationWitness};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic_series::{PrecisionContext, TruncatedSeries};

/// A `1/p`-denominator `value / p` placed in `alpha_{0,column}` at `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LogSeed {
    pub column: usize,
    pub degree: usize,
    pub value: u64,
}

/// Integral witness with coefficients uniform in `[0, p^N)` at degrees
/// `1..=max_degree` (capped at `M`).
pub fn random_alpha<R: Rng + ?Sized>(
    ctx: PrecisionContext,
    h: usize,
    max_degree: usize,
    rng: &mut R,
) -> TrivializationWitness {
    let top = max_degree.min(ctx.truncation());
    let alpha = SeriesMatrix::from_fn(ctx, h, h, |_, _| {
        let mut c = vec![0u64; ctx.len()];
        for x in c.iter_mut().take(top + 1).skip(1) {
            *x = rng.gen_range(0..ctx.modulus());
        }
        TruncatedSeries::from_residues(ctx, c).expect("canonical residues")
    });
    TrivializationWitness { alpha }
}

/// Log-type seeds in the last column at degrees `d` with `p | d` and
/// `p d <= M`; empty when `M < p^2`.
pub fn random_log_seeds<R: Rng + ?Sized>(ectx: &ExtensionContext, rng: &mut R) -> Vec<LogSeed> {
    let ctx = ectx.context();
    let p = ctx.p() as usize;
    let degrees: Vec<usize> = (1..=ctx.frobenius_window()).filter(|d| d % p == 0).collect();
    if degrees.is_empty() {
        return Vec::new();
    }
    let mut seeds = Vec::new();
    for d in &degrees {
        if rng.gen_bool(0.5) {
            seeds.push(LogSeed {
                column: ectx.height() - 1,
                degree: *d,
                value: rng.gen_range(1..p as u64),
            });
        }
    }
    if seeds.is_empty() {
        seeds.push(LogSeed {
            column: ectx.height() - 1,
            degree: degrees[rng.gen_range(0..degrees.len())],
            value: rng.gen_range(1..p as u64),
        });
    }
    seeds
}

/// A random geometric extension: an integral witness of full support plus,
/// when the truncation allows it, a log-type class.
pub fn random_extension<R: Rng + ?Sized>(ectx: &ExtensionContext, rng: &mut R) -> ExtensionData {
    let ctx = ectx.context();
    let gamma = random_alpha(ctx, ectx.height(), ctx.truncation(), rng);
    let seeds = if rng.gen_bool(0.5) {
        random_log_seeds(ectx, rng)
    } else {
        Vec::new()
    };
    log_type_extension(ectx, &seeds, Some(&gamma)).expect("seeds are admissible")
}

pub fn random_extension_pair<R: Rng + ?Sized>(
    ectx: &ExtensionContext,
    rng: &mut R,
) -> (ExtensionData, ExtensionData) {
    (random_extension(ectx, rng), random_extension(ectx, rng))
}

/// Largest `K` with `p^K <= M`: no admissible denominator exceeds `p^K`.
fn denominator_exponent(ctx: PrecisionContext) -> u32 {
    let (p, top) = (ctx.p() as usize, ctx.truncation());
    let mut k = 0;
    let mut q = p;
    while q <= top {
        k += 1;
        q *= p;
    }
    k
}

/// Fractional parts `frac[i][j][n]`, as numerators over `p^K`.
fn fractional_parts(ectx: &ExtensionContext, seeds: &[LogSeed], k: u32) -> Result<Vec<Vec<Vec<i128>>>> {
    let ctx = ectx.context();
    let (h, top) = (ectx.height(), ctx.truncation());
    let p = ctx.p() as i128;
    let pk = p.pow(k);
    for s in seeds {
        if s.column == 0 || s.column >= h {
            return Err(Error::NotExtensionShaped(format!("seed column {} outside 1..{h}", s.column)));
        }
        if s.degree == 0 || s.degree > top || s.degree as i128 % p != 0 {
            return Err(Error::NotExtensionShaped(format!(
                "seed degree {} must be a positive multiple of p up to M",
                s.degree
            )));
        }
    }
    let mut frac = vec![vec![vec![0i128; top + 1]; h]; h];
    if k == 0 {
        return Ok(frac);
    }
    for n in 1..=top {
        let phi = |frac: &Vec<Vec<Vec<i128>>>, i: usize, j: usize| {
            if n as i128 % p == 0 {
                frac[i][j][n / p as usize]
            } else {
                0
            }
        };
        for i in 1..h {
            for j in 1..h {
                frac[i][j][n] = phi(&frac, i - 1, j - 1);
            }
        }
        for j in 1..h {
            let f = phi(&frac, h - 1, j - 1);
            if f % p != 0 {
                return Err(Error::NotExtensionShaped(format!(
                    "seeds force a denominator beyond p^{k} at degree {n}"
                )));
            }
            let seed: i128 = seeds
                .iter()
                .filter(|s| s.column == j && s.degree == n)
                .map(|s| s.value as i128)
                .sum();
            frac[0][j][n] = (f / p + seed * pk / p).rem_euclid(pk);
            frac[j][0][n] = (-frac[0][j][n]).rem_euclid(pk);
        }
    }
    Ok(frac)
}

/// The class of `alpha = frac + gamma`, where `frac` is the fractional
/// witness generated by `seeds` and `gamma` an optional integral witness.
/// The data is computed from `p^K alpha` at precision `N + K` and divided
/// by `p^K`; the result is flagged geometric.
pub fn log_type_extension(
    ectx: &ExtensionContext,
    seeds: &[LogSeed],
    gamma: Option<&TrivializationWitness>,
) -> Result<ExtensionData> {
    let ctx = ectx.context();
    let h = ectx.height();
    let k = denominator_exponent(ctx);
    let frac = fractional_parts(ectx, seeds, if seeds.is_empty() { 0 } else { k })?;
    let k = if seeds.is_empty() { 0 } else { k };
    let hi = PrecisionContext::new(ctx.p(), ctx.precision() + k, ctx.truncation())?;
    let pk = (ctx.p() as i128).pow(k);
    let scaled = SeriesMatrix::from_fn(hi, h, h, |i, j| {
        let coeffs: Vec<i128> = (0..ctx.len())
            .map(|n| {
                let g = gamma.map_or(0, |w| w.alpha().get(i, j).raw(n) as i128);
                frac[i][j][n] + pk * g
            })
            .collect();
        TruncatedSeries::from_coeffs(hi, &coeffs)
    });
    let hectx = ExtensionContext::new(hi, h)?;
    let big = from_alpha(&TrivializationWitness::new(scaled)?, &hectx)?;
    let divide = |m: &SeriesMatrix| {
        m.div_p_pow(k).map_err(|_| {
            Error::NotExtensionShaped("seeds do not give integral extension data".into())
        })
    };
    let (xi, v, m) = (divide(big.xi())?, divide(big.v())?, divide(big.m())?);
    ExtensionData::new(xi, v, m, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension_group::{int_scale, p_torsion_check, trivialize, TorsionOutcome};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn denominator_exponent_values() {
        assert_eq!(denominator_exponent(PrecisionContext::new(3, 8, 32).unwrap()), 3);
        assert_eq!(denominator_exponent(PrecisionContext::new(5, 8, 32).unwrap()), 2);
        assert_eq!(denominator_exponent(PrecisionContext::new(3, 8, 5).unwrap()), 1);
    }

    #[test]
    fn last_column_seed_gives_nontrivial_p_multiple() {
        for (p, h) in [(3, 2), (3, 3), (3, 5), (3, 10), (5, 2), (5, 3)] {
            let ctx = PrecisionContext::new(p, 8, 32).unwrap();
            let ectx = ExtensionContext::new(ctx, h).unwrap();
            let seed = LogSeed {
                column: h - 1,
                degree: p as usize,
                value: 1,
            };
            let e = log_type_extension(&ectx, &[seed], None).unwrap();
            assert!(e.is_consistent(), "p={p} h={h}");
            assert!(e.satisfies_rank_one());
            assert!(trivialize(&e).is_err());
            assert!(trivialize(&int_scale(&e, p as i128)).is_err(), "p={p} h={h}");
        }
    }

    #[test]
    fn random_extensions_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, h) in [(3, 2), (3, 5), (5, 3)] {
            let ectx = ExtensionContext::new(PrecisionContext::new(p, 8, 32).unwrap(), h).unwrap();
            for _ in 0..4 {
                let e = random_extension(&ectx, &mut rng);
                assert!(e.is_consistent());
                assert!(e.is_geometric());
            }
        }
    }

    #[test]
    fn inner_column_seed_is_truncation_torsion() {
        // a seed away from the last column dies after multiplication by p at
        // this truncation; the chain cannot reach the surviving coefficient
        let ctx = PrecisionContext::new(3, 8, 32).unwrap();
        let ectx = ExtensionContext::new(ctx, 3).unwrap();
        let seed = LogSeed {
            column: 1,
            degree: 6,
            value: 1,
        };
        let e = log_type_extension(&ectx, &[seed], None).unwrap();
        assert!(trivialize(&e).is_err());
        let w = trivialize(&int_scale(&e, 3)).unwrap();
        let out = p_torsion_check(&e, &w).unwrap();
        assert!(matches!(out, TorsionOutcome::Inconclusive { .. }), "{out:?}");
    }

    #[test]
    fn random_log_seeds_keep_p_multiple_nontrivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, h) in [(3, 2), (3, 3), (3, 5), (3, 10), (5, 2), (5, 10)] {
            let ectx = ExtensionContext::new(PrecisionContext::new(p, 8, 32).unwrap(), h).unwrap();
            for _ in 0..6 {
                let seeds = random_log_seeds(&ectx, &mut rng);
                assert!(!seeds.is_empty());
                let gamma = random_alpha(ectx.context(), h, 32, &mut rng);
                let e = log_type_extension(&ectx, &seeds, Some(&gamma)).unwrap();
                assert!(trivialize(&int_scale(&e, p as i128)).is_err(), "{seeds:?}");
            }
        }
    }

    #[test]
    fn no_seeds_below_p_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ectx = ExtensionContext::new(PrecisionContext::new(5, 8, 24).unwrap(), 3).unwrap();
        assert!(random_log_seeds(&ectx, &mut rng).is_empty());
    }

    #[test]
    fn bad_seed_degree_rejected() {
        let ectx = ExtensionContext::new(PrecisionContext::new(3, 8, 32).unwrap(), 2).unwrap();
        let seed = LogSeed {
            column: 1,
            degree: 4,
            value: 1,
        };
        assert!(log_type_extension(&ectx, &[seed], None).is_err());
    }
}
