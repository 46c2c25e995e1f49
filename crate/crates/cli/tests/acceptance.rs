//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Every comparison is exact; the only pinned quantities are the scale
//! constants below.

use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crystal_core::crystal::{check_horizontality, check_pairing_compat, newton_slopes, SlopeMultiset};
use crystal_core::extension_group::{
    assemble_crystal, baer_sum, from_alpha, int_scale, random_alpha, random_extension,
    random_extension_pair, trivialize, BaerMode, ExtensionContext, ExtensionData,
};
use crystal_core::moduli::{
    add_points, identity_point, multiply_by_p_injectivity_probe, negate, point_from_tangent,
    random_point, slope_report, tangent_coordinates, truncate, DeformationPoint, Population,
};
use crystal_core::{FCrystalPresentation, PrecisionContext};

const PRIMES: [u64; 2] = [3, 5];
const HEIGHTS: [usize; 4] = [2, 3, 5, 10];
const N: u32 = 8;
const M: usize = 32;
/// Base degree `n` of `k[t]/(t^n)`.
const BASE: usize = 6;
/// A base large enough (`n - 1 >= p^2`) to carry log-type classes.
const LARGE_BASE: usize = 33;
const PAIRS: usize = 100;
const TRIPLES: usize = 100;
const ROUND_TRIPS: usize = 100;
const PROBE_SAMPLES: usize = 50;
const LARGE_PROBE_SAMPLES: usize = 50;
const FUNCTORIALITY_PAIRS: usize = 50;
const TANGENT_PAIRS: usize = 100;
const SUITE_BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn ectx(p: u64, h: usize) -> ExtensionContext {
    ExtensionContext::new(PrecisionContext::new(p, N, M).unwrap(), h).unwrap()
}

fn combos() -> impl Iterator<Item = (u64, usize)> {
    PRIMES.into_iter().flat_map(|p| HEIGHTS.into_iter().map(move |h| (p, h)))
}

fn rng_for(tag: u64, p: u64, h: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(tag * 1_000 + p * 100 + h as u64)
}

fn consistent(c: &FCrystalPresentation) -> bool {
    check_horizontality(c).passed() && check_pairing_compat(c).passed()
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn standard_slopes() -> Outcome {
    for (p, h) in combos() {
        let e = ectx(p, h);
        let hi = h as i64;
        let sub = newton_slopes(&e.sub1()).map_err(|x| x.to_string())?;
        let sup = newton_slopes(&e.super1()).map_err(|x| x.to_string())?;
        ensure(sub == SlopeMultiset::new(vec![(Rational64::new(hi - 1, hi), h)]), || {
            format!("sub1 slopes {sub} at p={p} h={h}")
        })?;
        ensure(sup == SlopeMultiset::new(vec![(Rational64::new(hi + 1, hi), h)]), || {
            format!("super1 slopes {sup} at p={p} h={h}")
        })?;
    }
    Ok(format!("{} (p, h) combinations", PRIMES.len() * HEIGHTS.len()))
}

fn moduli_slope() -> Outcome {
    for (p, h) in combos() {
        let r = slope_report(&ectx(p, h)).map_err(|x| x.to_string())?;
        let want = Rational64::new(2, h as i64);
        ensure(r.slope == want && r.difference == want, || {
            format!("slope {} / difference {} at p={p} h={h}", r.slope, r.difference)
        })?;
        ensure(r.detail.total_multiplicity() == h * h && r.detail.entries().len() == 1, || {
            format!("hom detail {} at p={p} h={h}", r.detail)
        })?;
    }
    Ok("slope 2/h for h in {2, 3, 5, 10}".into())
}

fn baer_oracles() -> Outcome {
    let mut count = 0;
    for (p, h) in combos() {
        let e = ectx(p, h);
        let mut rng = rng_for(3, p, h);
        for i in 0..PAIRS {
            let (a, b) = random_extension_pair(&e, &mut rng);
            let fast = baer_sum(&a, &b, BaerMode::Fast).map_err(|x| x.to_string())?;
            for mode in [BaerMode::PullbackPushout, BaerMode::PushoutPullback] {
                let other = baer_sum(&a, &b, mode).map_err(|x| format!("{}: {x}", mode.name()))?;
                ensure(other == fast, || format!("{} differs from fast at p={p} h={h} pair {i}", mode.name()))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} pairs, three constructions agree"))
}

fn add(u: &DeformationPoint, v: &DeformationPoint) -> Result<DeformationPoint, String> {
    add_points(u, v).map_err(|x| x.to_string())
}

fn ext_axioms(a: &ExtensionData, b: &ExtensionData, c: &ExtensionData, zero: &ExtensionData) -> Result<bool, String> {
    let s = |x: &ExtensionData, y: &ExtensionData| baer_sum(x, y, BaerMode::Fast).map_err(|e| e.to_string());
    Ok(s(&s(a, b)?, c)? == s(a, &s(b, c)?)?
        && s(a, b)? == s(b, a)?
        && s(a, zero)? == *a
        && s(a, &int_scale(a, -1))?.is_zero())
}

fn group_axioms() -> Outcome {
    let mut count = 0;
    for (p, h) in combos() {
        let e = ectx(p, h);
        let mut rng = rng_for(4, p, h);
        let zero = e.zero();
        let id = identity_point(&e, BASE).map_err(|x| x.to_string())?;
        for i in 0..TRIPLES {
            let a = random_extension(&e, &mut rng);
            let b = random_extension(&e, &mut rng);
            let c = random_extension(&e, &mut rng);
            ensure(ext_axioms(&a, &b, &c, &zero)?, || format!("extension axioms at p={p} h={h} triple {i}"))?;

            let pop = if i % 2 == 0 { Population::Integral } else { Population::LogType };
            let x = random_point(&e, BASE, pop, &mut rng).map_err(|x| x.to_string())?;
            let y = random_point(&e, BASE, pop, &mut rng).map_err(|x| x.to_string())?;
            let z = random_point(&e, BASE, Population::Integral, &mut rng).map_err(|x| x.to_string())?;
            let ok = add(&add(&x, &y)?, &z)? == add(&x, &add(&y, &z)?)?
                && add(&x, &y)? == add(&y, &x)?
                && add(&x, &id)? == x
                && add(&x, &negate(&x))?.is_identity();
            ensure(ok, || format!("point axioms at p={p} h={h} triple {i}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} triples of extensions (M = {M}) and of points (n = {BASE})"))
}

fn closure() -> Outcome {
    let (mut alphas, mut sums) = (0, 0);
    for (p, h) in combos() {
        let e = ectx(p, h);
        let mut rng = rng_for(5, p, h);
        for i in 0..PAIRS {
            let w = random_alpha(e.context(), h, M, &mut rng);
            let ext = from_alpha(&w, &e).map_err(|x| x.to_string())?;
            ensure(consistent(&assemble_crystal(&ext)), || format!("from_alpha output at p={p} h={h} sample {i}"))?;
            alphas += 1;
        }
        for (n, count) in [(BASE, PAIRS), (LARGE_BASE, 10)] {
            for i in 0..count {
                let x = random_point(&e, n, Population::LogType, &mut rng).map_err(|x| x.to_string())?;
                let y = random_point(&e, n, Population::Integral, &mut rng).map_err(|x| x.to_string())?;
                let s = add_points(&x, &y).map_err(|x| x.to_string())?;
                ensure(consistent(&s.assemble()), || format!("add_points output at p={p} h={h} n={n} sample {i}"))?;
                sums += 1;
            }
        }
    }
    Ok(format!("{alphas} from_alpha outputs, {sums} add_points outputs"))
}

fn round_trip() -> Outcome {
    let mut count = 0;
    for (p, h) in combos() {
        let e = ectx(p, h);
        let ctx = e.context();
        let mut rng = rng_for(6, p, h);
        // integration divides coefficient k by k
        let loss = (1..=M).map(|k| ctx.vp(k as u64)).max().unwrap();
        let precision = N - loss;
        for i in 0..ROUND_TRIPS {
            let w = random_alpha(ctx, h, ctx.frobenius_window(), &mut rng);
            let ext = from_alpha(&w, &e).map_err(|x| x.to_string())?;
            let back = trivialize(&ext).map_err(|u| format!("p={p} h={h} sample {i}: {u}"))?;
            ensure(back.context().precision() == precision, || {
                format!("precision {} instead of {precision}", back.context().precision())
            })?;
            let want = w.alpha().with_precision(precision).map_err(|x| x.to_string())?;
            ensure(back.alpha() == &want, || format!("alpha differs at p={p} h={h} sample {i}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} witnesses recovered at precision N - max v_p(k)"))
}

fn p_divisibility() -> Outcome {
    let (mut certified, mut nontrivial) = (0, 0);
    for (p, h) in combos() {
        let e = ectx(p, h);
        for (n, samples) in [(BASE, PROBE_SAMPLES), (LARGE_BASE, LARGE_PROBE_SAMPLES)] {
            let r = multiply_by_p_injectivity_probe(&e, n, samples, 7).map_err(|x| x.to_string())?;
            ensure(r.counterexamples.is_empty(), || format!("p={p} h={h} n={n}: {:?}", r.counterexamples[0]))?;
            ensure(r.inconclusive == 0 && r.torsion_certified + r.nontrivial_py == samples, || {
                format!("p={p} h={h} n={n}: {} inconclusive samples", r.inconclusive)
            })?;
            ensure(n < LARGE_BASE || r.nontrivial_py > 0, || format!("p={p} h={h}: no nontrivial [p]Y sampled"))?;
            certified += r.torsion_certified;
            nontrivial += r.nontrivial_py;
        }
    }
    Ok(format!("{certified} trivial [p]Y certified with passing traces, {nontrivial} nontrivial [p]Y, 0 counterexamples"))
}

fn tangent_space() -> Outcome {
    let mut count = 0;
    for (p, h) in combos() {
        let e = ectx(p, h);
        let mut rng = rng_for(8, p, h);
        let zero = identity_point(&e, 2).map_err(|x| x.to_string())?;
        let dim = tangent_coordinates(&zero).map_err(|x| x.to_string())?.len();
        ensure(dim == h - 1, || format!("dimension {dim} at h={h}"))?;
        for j in 0..h - 1 {
            let mut basis = vec![0; h - 1];
            basis[j] = 1;
            let y = point_from_tangent(&e, &basis).map_err(|x| x.to_string())?;
            ensure(tangent_coordinates(&y).unwrap() == basis, || format!("basis vector {j} not hit at h={h}"))?;
        }
        for i in 0..TANGENT_PAIRS {
            let pop = if i % 2 == 0 { Population::Integral } else { Population::LogType };
            let n = if i % 2 == 0 { 2 } else { LARGE_BASE };
            let x = truncate(&random_point(&e, n, pop, &mut rng).map_err(|x| x.to_string())?, 2).unwrap();
            let y = truncate(&random_point(&e, n, pop, &mut rng).map_err(|x| x.to_string())?, 2).unwrap();
            let (tx, ty) = (tangent_coordinates(&x).unwrap(), tangent_coordinates(&y).unwrap());
            let sum: Vec<u64> = tx.iter().zip(&ty).map(|(a, b)| (a + b) % p).collect();
            let txy = tangent_coordinates(&add_points(&x, &y).map_err(|x| x.to_string())?).unwrap();
            ensure(txy == sum, || format!("tangent map not additive at p={p} h={h} pair {i}"))?;
            count += 1;
        }
    }
    Ok(format!("dimension h - 1, basis hit, {count} additive pairs"))
}

fn functoriality() -> Outcome {
    let mut count = 0;
    for (p, h) in combos() {
        let e = ectx(p, h);
        let mut rng = rng_for(9, p, h);
        for i in 0..FUNCTORIALITY_PAIRS {
            let n = if i % 5 == 4 { LARGE_BASE } else { BASE };
            let pop = if i % 2 == 0 { Population::Integral } else { Population::LogType };
            let x = random_point(&e, n, pop, &mut rng).map_err(|x| x.to_string())?;
            let y = random_point(&e, n, Population::Integral, &mut rng).map_err(|x| x.to_string())?;
            let xy = add_points(&x, &y).map_err(|x| x.to_string())?;
            for n2 in 1..n {
                let lhs = truncate(&xy, n2).map_err(|x| x.to_string())?;
                let rhs = add_points(&truncate(&x, n2).unwrap(), &truncate(&y, n2).unwrap()).map_err(|x| x.to_string())?;
                ensure(lhs == rhs, || format!("p={p} h={h} pair {i}: n={n} -> {n2}"))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} pairs, every truncation n' < n"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_crystal-lab");
    let runs: [&[&str]; 3] = [
        &["probe", "--p", "3", "--h", "2", "--n", "6", "--N", "8", "--samples", "50", "--seed", "7"],
        &["grouplaw", "--p", "5", "--h", "3", "--n", "6", "--samples", "10", "--seed", "11"],
        &["gen", "--p", "3", "--h", "5", "--kind", "extension", "--seed", "3"],
    ];
    for args in runs {
        let once = || Command::new(bin).args(args).output().map_err(|e| e.to_string());
        let (a, b) = (once()?, once()?);
        ensure(a.status.success() && b.status.success(), || format!("{} exited with failure", args[0]))?;
        ensure(a.stdout == b.stdout, || format!("{} output differs between runs", args[0]))?;
    }
    Ok(format!("{} verbs byte-identical across runs", runs.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("standard crystal slopes", standard_slopes),
        ("slope of the moduli", moduli_slope),
        ("Baer sum constructions agree", baer_oracles),
        ("group axioms", group_axioms),
        ("crystal axioms closed", closure),
        ("trivialization round trip", round_trip),
        ("p-divisibility", p_divisibility),
        ("tangent space", tangent_space),
        ("functoriality", functoriality),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > SUITE_BUDGET {
                Err(format!("{detail}; took {elapsed:.1?}, over the {SUITE_BUDGET:?} budget"))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {title}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {title}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
