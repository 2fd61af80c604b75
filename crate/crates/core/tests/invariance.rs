//! Property tests: invariants survive random move sequences, and the
//! distinguishing battery never separates a code from its moved copy.

mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use vknot::alexander::generalized_alexander;
use vknot::algebra::{colorings, iq_colorings};
use vknot::catalog::catalog;
use vknot::moves::{apply_move, enumerate_moves, replay, Move};
use vknot::poly::LaurentPoly1;
use vknot::quaternion::quaternion_invariants;
use vknot::report::{distinguish, small_biquandles, small_involutory_quandles, Verdict};
use vknot::statesum::{bracket, f_polynomial};
use vknot::{parse_gauss, GaussCode};

fn knots() -> Vec<GaussCode> {
    catalog().iter().filter_map(|e| e.code().cloned()).collect()
}

/// Follows `picks` through the applicable moves, never growing past six
/// chords. Returns the moves taken.
fn walk(start: &GaussCode, picks: &[usize]) -> Vec<Move> {
    let mut k = start.clone();
    let mut taken = Vec::new();
    for &pick in picks {
        let mut moves = enumerate_moves(&k);
        if k.chord_count() >= 6 {
            moves.retain(|m| !matches!(m, Move::R1Plus { .. } | Move::R2Plus { .. }));
        }
        let m = moves[pick % moves.len()];
        k = apply_move(&k, &m).unwrap();
        taken.push(m);
    }
    taken
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_survive_moves(which in 0usize..8, picks in prop::collection::vec(any::<usize>(), 1..12)) {
        let knots = knots();
        let k = &knots[which % knots.len()];
        let moved = replay(k, &walk(k, &picks)).unwrap();
        prop_assert_eq!(f_polynomial(&moved), f_polynomial(k));
        prop_assert_eq!(bracket(&moved).span(), bracket(k).span());
        prop_assert_eq!(generalized_alexander(&moved), generalized_alexander(k));
        for q in small_involutory_quandles() {
            prop_assert_eq!(iq_colorings(&moved, q), iq_colorings(k, q));
        }
        for b in small_biquandles() {
            prop_assert_eq!(colorings(&moved, b), colorings(k, b));
        }
        prop_assert_eq!(
            quaternion_invariants(&moved).unwrap().study_det,
            quaternion_invariants(k).unwrap().study_det
        );
    }

    #[test]
    fn distinguish_is_sound_on_moved_copies(which in 0usize..8, picks in prop::collection::vec(any::<usize>(), 1..8)) {
        let knots = knots();
        let k = &knots[which % knots.len()];
        let moved = replay(k, &walk(k, &picks)).unwrap();
        prop_assert_eq!(distinguish(k, &moved).unwrap(), Verdict::Inconclusive);
    }

    #[test]
    fn bracket_matches_the_state_oracle(seed in any::<u64>(), n in 0usize..7, comps in 1usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let text = common::random_code(&mut rng, n, comps.min(2 * n).max(1));
        let want = common::bracket(&text);
        let got = bracket(&parse_gauss(&text).unwrap());
        prop_assert_eq!(got, LaurentPoly1::from_i64(&want.into_iter().collect::<Vec<_>>()));
    }
}
