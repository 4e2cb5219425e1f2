use proptest::prelude::*;

use mcg_abelian::abelian::{AbelianGroup, Signature};
use mcg_abelian::genvec::{cup_invariant, orbit_classes_oracle, reduced_cup, GeneratingVector, Move, OracleOptions};
use mcg_abelian::ramified::table51;

fn vector_over(g: &AbelianGroup, sig: &Signature, picks: &[usize]) -> GeneratingVector {
    let xs = picks.iter().map(|&i| g.element_at(i % g.order() as usize)).collect();
    GeneratingVector::from_slots(g, sig, xs).unwrap()
}

fn any_move(rho: usize, r: usize) -> impl Strategy<Value = Move> {
    let k = -5i64..6;
    prop_oneof![
        (0..rho, k.clone()).prop_map(|(i, k)| Move::A { i, k }),
        (0..rho, k.clone()).prop_map(|(i, k)| Move::B { i, k }),
        (0..rho - 1, k.clone()).prop_map(|(i, k)| Move::Z { i, k }),
        (0..rho).prop_map(|i| Move::R { i }),
        (0..rho - 1).prop_map(|i| Move::S { i }),
        (0..r - 1).prop_map(|j| Move::T { j }),
        (0..rho, 0..r, k.clone()).prop_map(|(i, j, k)| Move::U { i, j, k }),
        (0..rho, 0..r, k).prop_map(|(i, j, k)| Move::V { i, j, k }),
    ]
}

#[test]
fn oracle_partition_ignores_scan_order() {
    for (factors, sig) in [
        (vec![4, 2], "1;-"),
        (vec![3, 3], "1;-"),
        (vec![6], "0;2,3,6"),
        (vec![2, 2], "0;2,2,2,2"),
    ] {
        let g = AbelianGroup::new(factors).unwrap();
        let sig: Signature = sig.parse().unwrap();
        let plain = orbit_classes_oracle(&g, &sig, &OracleOptions::default()).unwrap();
        let total = g
            .order()
            .pow((2 * sig.orbit_genus as usize + sig.branch_count()) as u32);
        let stride = (2..).find(|s| num_gcd(*s, total) == 1).unwrap();
        let strided = orbit_classes_oracle(
            &g,
            &sig,
            &OracleOptions {
                scan_stride: Some(stride),
                ..OracleOptions::default()
            },
        )
        .unwrap();
        assert_eq!(plain.count, strided.count);
        assert_eq!(plain.representatives, strided.representatives);
        let mut a = plain.orbit_sizes.clone();
        let mut b = strided.orbit_sizes.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(plain.orbit_sizes.iter().sum::<u64>(), plain.valid_total);
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

#[test]
fn cyclic_prime_order_actions_match_closed_form() {
    // C_p with three branch points of order p, counted two independent ways
    for p in [5u64, 7, 11, 13] {
        let g = AbelianGroup::new(vec![p]).unwrap();
        let sig = Signature::new(0, vec![p; 3]).unwrap();
        let oracle = orbit_classes_oracle(&g, &sig, &OracleOptions::default()).unwrap().count as u64;
        assert_eq!(oracle, table51(3, 1, p).unwrap(), "p={p}");
    }
}

#[test]
fn genus33_vectors_fall_into_two_orbits() {
    let g = AbelianGroup::new(vec![4, 4, 2]).unwrap();
    let sig = Signature::unramified(2);
    let (w1, w2, w3, z): (&[i64], &[i64], &[i64], &[i64]) = (&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]);
    let eta1 = GeneratingVector::from_coords(&g, &sig, &[w1, w3], &[w2, z], &[]).unwrap();
    let eta2 = GeneratingVector::from_coords(&g, &sig, &[w1, w2], &[w3, z], &[]).unwrap();
    let eta3 = GeneratingVector::from_coords(&g, &sig, &[w1, &[0, 2, 0]], &[w2, w3], &[]).unwrap();
    let res = orbit_classes_oracle(
        &g,
        &sig,
        &OracleOptions {
            keep_labels: true,
            ..OracleOptions::default()
        },
    )
    .unwrap();
    assert_eq!(res.count, 2);
    let (o1, o2, o3) = (
        res.orbit_of(&eta1).unwrap(),
        res.orbit_of(&eta2).unwrap(),
        res.orbit_of(&eta3).unwrap(),
    );
    assert_eq!(o1, o3);
    assert_ne!(o1, o2);
}

#[test]
fn invalid_vectors_are_reported() {
    let g = AbelianGroup::new(vec![6]).unwrap();
    let sig: Signature = "0;2,3,6".parse().unwrap();
    let bad_sum = GeneratingVector::from_coords(&g, &sig, &[], &[], &[&[3], &[2], &[5]]).unwrap();
    assert!(bad_sum.validate().elliptic_sum_nonzero);
    let bad_order = GeneratingVector::from_coords(&g, &sig, &[], &[], &[&[3], &[3], &[0]]).unwrap();
    assert!(!bad_order.validate().order_mismatches.is_empty());
    let g = AbelianGroup::new(vec![2, 2]).unwrap();
    let sig = Signature::unramified(1);
    let not_onto = GeneratingVector::from_coords(&g, &sig, &[&[1, 0]], &[&[1, 0]], &[]).unwrap();
    assert!(not_onto.validate().not_surjective);
}

proptest! {
    #[test]
    fn inverse_words_undo_moves(picks in prop::collection::vec(0usize..27, 7), m in any_move(2, 3)) {
        let g = AbelianGroup::new(vec![9, 3]).unwrap();
        let sig: Signature = "2;3,3,3".parse().unwrap();
        let gv = vector_over(&g, &sig, &picks);
        let moved = gv.apply_move(m).unwrap();
        prop_assert_eq!(moved.apply_word(&m.inverse_word()).unwrap(), gv);
    }

    #[test]
    fn moves_preserve_validity(picks in prop::collection::vec(0usize..16, 6), m in any_move(2, 2)) {
        let g = AbelianGroup::new(vec![4, 4]).unwrap();
        let sig: Signature = "2;4,4".parse().unwrap();
        let gv = vector_over(&g, &sig, &picks);
        prop_assert_eq!(gv.apply_move(m).unwrap().is_valid(), gv.is_valid());
    }

    #[test]
    fn cup_is_move_invariant(picks in prop::collection::vec(0usize..27, 7), m in any_move(2, 3)) {
        let g = AbelianGroup::new(vec![9, 3]).unwrap();
        let sig: Signature = "2;3,3,3".parse().unwrap();
        let gv = vector_over(&g, &sig, &picks);
        let moved = gv.apply_move(m).unwrap();
        prop_assert_eq!(reduced_cup(&moved), reduced_cup(&gv));
        if !matches!(m, Move::U { .. } | Move::V { .. }) {
            prop_assert_eq!(cup_invariant(&moved), cup_invariant(&gv));
        }
    }
}
