mod common;

use b92_core::objective::{ambiguity_from_purification, purify};
use b92_core::optimizer::sample_feasible;
use b92_core::{eve_ambiguity, Channel64, Error};
use common::*;
use proptest::prelude::*;

#[test]
fn block_formula_matches_literal_construction() {
    let c = ctx();
    let r = &mut rng(5);
    let mut channels: Vec<Channel64> = (0..50).map(|_| random_cp_channel(r)).collect();
    channels.extend([Channel64::identity(), Channel64::depolarizing(0.065).unwrap(), Channel64::zero()]);
    channels.extend(sample_feasible(&c, 0.05, 10, 3).unwrap());
    for ch in &channels {
        let phi = purify(&c.joint_state(ch)).unwrap();
        let blocks = ambiguity_from_purification(&c, &phi).unwrap().value;
        let literal = literal_ambiguity(&c, &phi);
        assert!((blocks - literal).abs() <= 1e-9, "{blocks} vs {literal} for {ch:?}");
    }
}

#[test]
fn literal_construction_at_identity() {
    let c = ctx();
    let phi = purify(&c.joint_state(&Channel64::identity())).unwrap();
    let a2 = ALPHA * ALPHA;
    assert!((literal_ambiguity(&c, &phi) - 2.0 * a2 * (1.0 - a2)).abs() <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariant_under_unitaries_on_eve(seed in any::<u64>()) {
        let c = ctx();
        let r = &mut rng(seed);
        let phi = purify(&c.joint_state(&random_cp_channel(r))).unwrap();
        let rotated = phi.act_on_eve(&random_unitary(r, 4));
        prop_assert!((rotated.norm_sqr() - 1.0).abs() <= 1e-12);
        let s = ambiguity_from_purification(&c, &phi).unwrap().value;
        let s_rot = ambiguity_from_purification(&c, &rotated).unwrap().value;
        prop_assert!((s - s_rot).abs() <= 1e-9);
    }

    #[test]
    fn bounded_by_zero_and_acceptance(seed in any::<u64>()) {
        let c = ctx();
        let ch = random_cp_channel(&mut rng(seed));
        let ev = eve_ambiguity(&c, &ch).unwrap();
        let p_acc = c.acceptance_probability(&c.joint_state(&ch));
        prop_assert!((ev.prob_conclusive - p_acc).abs() <= 1e-10);
        prop_assert!((ev.prob_conclusive + ev.prob_inconclusive - 1.0).abs() <= 1e-10);
        prop_assert!(ev.value >= -1e-10 && ev.value <= p_acc + 1e-10);
    }
}

#[test]
fn convex_along_midpoints() {
    let c = ctx();
    let r = &mut rng(17);
    let s = |e: &Channel64| eve_ambiguity(&c, e).unwrap().value;
    for _ in 0..50 {
        let (a, b) = (random_cp_channel(r), random_cp_channel(r));
        let mid = Channel64::mix(&a, &b, 0.5);
        assert!(s(&mid) <= 0.5 * (s(&a) + s(&b)) + 1e-8);
    }
    let feasible = sample_feasible(&c, 0.065, 100, 9).unwrap();
    for pair in feasible.chunks(2) {
        let mid = Channel64::mix(&pair[0], &pair[1], 0.5);
        assert!(s(&mid) <= 0.5 * (s(&pair[0]) + s(&pair[1])) + 1e-8);
    }
}

#[test]
fn rejects_clearly_non_cp_channels() {
    let mut r = [[0.0; 3]; 3];
    r[0][0] = 1.0;
    r[1][1] = 1.0;
    r[2][2] = -1.0;
    let transpose = Channel64::new(r, [0.0; 3]).unwrap();
    assert!(matches!(eve_ambiguity(&ctx(), &transpose), Err(Error::NotPositive { .. })));
}

#[test]
fn single_precision_agrees() {
    let c32 = b92_core::Context32::new(0.39).unwrap();
    let c64 = ctx();
    for q in [0.0, 0.05, 0.065, 0.3] {
        let s32 = eve_ambiguity(&c32, &b92_core::Channel32::depolarizing(q as f32).unwrap()).unwrap().value;
        let s64 = eve_ambiguity(&c64, &Channel64::depolarizing(q).unwrap()).unwrap().value;
        assert!((s32 as f64 - s64).abs() <= 1e-4, "q = {q}: {s32} vs {s64}");
    }
}
