use crystal_core::crystal::{check_horizontality, check_pairing_compat, standard_pair};
use crystal_core::extension_group::{
    assemble_crystal, int_scale, random_alpha, random_extension, random_extension_pair,
};
use crystal_core::{
    baer_sum, from_alpha, p_torsion_check, trivialize, BaerMode, ExtensionContext, ExtensionData,
    PrecisionContext, SeriesMatrix, TorsionOutcome,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ectx(p: u64, h: usize, m: usize) -> ExtensionContext {
    ExtensionContext::new(PrecisionContext::new(p, 8, m).unwrap(), h).unwrap()
}

fn params() -> impl Strategy<Value = (u64, usize, u64)> {
    (prop_oneof![Just(3u64), Just(5u64)], 2usize..=5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn baer_modes_agree((p, h, seed) in params()) {
        let e = ectx(p, h, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = random_extension_pair(&e, &mut rng);
        let fast = baer_sum(&a, &b, BaerMode::Fast).unwrap();
        prop_assert_eq!(&baer_sum(&a, &b, BaerMode::PullbackPushout).unwrap(), &fast);
        prop_assert_eq!(&baer_sum(&a, &b, BaerMode::PushoutPullback).unwrap(), &fast);
        prop_assert!(fast.is_consistent());
    }

    #[test]
    fn from_alpha_is_a_basis_change((p, h, seed) in params()) {
        // independent route: conjugate the split crystal by (I alpha^T; 0 I)
        let e = ectx(p, h, 12);
        let ctx = e.context();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_alpha(ctx, h, 12, &mut rng);
        let data = from_alpha(&w, &e).unwrap();
        let mut b = SeriesMatrix::identity(ctx, 2 * h);
        b.set_block(0, h, &w.alpha().transpose());
        let mut binv = SeriesMatrix::identity(ctx, 2 * h);
        binv.set_block(0, h, &(-&w.alpha().transpose()));
        let conj = standard_pair(ctx, h).unwrap().change_basis(&b, &binv).unwrap();
        let read = ExtensionData::from_crystal(&conj, h, false).unwrap();
        prop_assert_eq!(read.v(), data.v());
        prop_assert_eq!(read.m(), data.m());
    }

    #[test]
    fn trivialize_recovers_split_classes((p, h, seed) in params()) {
        let e = ectx(p, h, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_alpha(e.context(), h, 16, &mut rng);
        let data = from_alpha(&w, &e).unwrap();
        let found = trivialize(&data).unwrap();
        // the witness comes back at the precision lost to integration
        let prec = found.context().precision();
        let e2 = ExtensionContext::new(e.context().with_precision(prec).unwrap(), h).unwrap();
        prop_assert_eq!(from_alpha(&found, &e2).unwrap(), data.with_precision(prec).unwrap());
    }

    #[test]
    fn int_scale_is_repeated_sum((p, h, seed) in params(), k in 0i128..5) {
        let e = ectx(p, h, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_extension(&e, &mut rng);
        let mut acc = e.zero();
        for _ in 0..k {
            acc = baer_sum(&acc, &y, BaerMode::Fast).unwrap();
        }
        prop_assert_eq!(int_scale(&y, k), acc);
        prop_assert!(baer_sum(&y, &int_scale(&y, -1), BaerMode::Fast).unwrap().is_zero());
    }

    #[test]
    fn assembled_classes_pass_checks((p, h, seed) in params()) {
        let e = ectx(p, h, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = assemble_crystal(&random_extension(&e, &mut rng));
        prop_assert!(check_horizontality(&c).passed());
        prop_assert!(check_pairing_compat(&c).passed());
    }

    #[test]
    fn split_classes_are_certified_torsion((p, h, seed) in params()) {
        let e = ectx(p, h, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_alpha(e.context(), h, e.context().frobenius_window(), &mut rng);
        let y = from_alpha(&w, &e).unwrap().with_geometric(true).unwrap();
        let py = int_scale(&y, p as i128);
        let pw = trivialize(&py).unwrap();
        let outcome = p_torsion_check(&y, &pw).unwrap();
        prop_assert!(
            matches!(outcome, TorsionOutcome::Certified { .. }),
            "{:?}",
            outcome
        );
        prop_assert!(outcome.trace().iter().all(|s| s.holds));
    }
}
