mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use mcg_abelian::linalg::{enumerate_gl, FpMatrix};
use mcg_abelian::perm::{all_perms, Perm};
use mcg_abelian::ramified::{
    act, build_strata_report, constructive_classes, enumerate_omega, fixed_set_size, normalizer_size, omega_count,
    orbit_count_oracle, pipeline_count, point_stabilizer, scan_strata_sizes, stabilizer_classes, ActionElement,
    OmegaMatrix, SubgroupRecord, SPACE_CEILING,
};

use common::{class_inventory, fixed_rows};

#[test]
fn inventory_at_13_has_twelve_rows() {
    assert_eq!(class_inventory(13).len(), 12);
}

fn whole_group(v: usize, r: usize, p: u64) -> Vec<ActionElement> {
    let perms = all_perms(r);
    enumerate_gl(v, p, 1 << 24)
        .unwrap()
        .flat_map(|g| {
            perms
                .iter()
                .map(move |a| ActionElement::new(g.clone(), a.clone()).unwrap())
        })
        .collect()
}

fn generators(rec: &SubgroupRecord) -> Vec<ActionElement> {
    rec.generator_pairs()
        .into_iter()
        .map(|(a, q)| ActionElement::new(q, a).unwrap())
        .collect()
}

fn brute_fixed(rec: &SubgroupRecord, points: &[OmegaMatrix]) -> u128 {
    let gens = generators(rec);
    points
        .iter()
        .filter(|x| gens.iter().all(|g| act(g, x).unwrap() == **x))
        .count() as u128
}

fn contains(big: &SubgroupRecord, small: &SubgroupRecord) -> bool {
    small.table().iter().all(|(a, q)| big.q(a) == Some(q))
}

/// Normalizer orders at `p = 5` of the subgroup rows present there.
fn normalizer_formula(label: &str, p: u128) -> u128 {
    let gl2 = p * (p - 1) * (p * p - 1);
    match label {
        "1" => 24 * gl2,
        "2" => 4 * gl2,
        "3" | "7" | "10" => 4 * (p - 1) * (p - 1),
        "4" | "8" | "9" | "11a" => 8 * (p - 1) * (p - 1),
        "5" => 8 * gl2,
        "12" => 8 * (p - 1),
        _ => unreachable!("row {label} is absent at this prime"),
    }
}

#[test]
fn fixed_sets_and_normalizers_match_brute_force_at_5() {
    let p = 5;
    let group = whole_group(2, 4, p);
    assert_eq!(group.len(), 11520);
    let points: Vec<OmegaMatrix> = enumerate_omega(2, 4, p, 1 << 24).unwrap().collect();
    assert_eq!(points.len() as u128, omega_count(2, 4, p));
    for row in fixed_rows(p) {
        let Some(rec) = row.record else { continue };
        assert_eq!(
            fixed_set_size(&rec, SPACE_CEILING).unwrap(),
            brute_fixed(&rec, &points),
            "row {}",
            row.label
        );
        let normalizer = group.iter().filter(|c| rec.conjugate_by(c) == rec).count() as u128;
        assert_eq!(
            normalizer_size(&rec, SPACE_CEILING).unwrap(),
            normalizer,
            "row {}",
            row.label
        );
        assert_eq!(
            normalizer,
            normalizer_formula(row.label, p as u128),
            "row {}",
            row.label
        );
    }
}

#[test]
fn containment_counts_match_brute_force_at_5() {
    let p = 5;
    let group = whole_group(2, 4, p);
    let classes = stabilizer_classes(2, 4, p, SPACE_CEILING).unwrap();
    let report = build_strata_report(&classes, SPACE_CEILING).unwrap();
    for (j, hj) in classes.iter().enumerate() {
        let conjugates: BTreeSet<Vec<(Perm, FpMatrix)>> = group
            .iter()
            .map(|c| hj.conjugate_by(c).table().clone().into_iter().collect())
            .collect();
        let conjugates: Vec<SubgroupRecord> = conjugates
            .into_iter()
            .map(|t| {
                let gens: Vec<(Perm, FpMatrix)> = t;
                SubgroupRecord::from_generators(4, 2, p, &gens).unwrap()
            })
            .collect();
        assert_eq!(conjugates.len() as u128 * report.n[j], 11520);
        for (i, hi) in classes.iter().enumerate() {
            let u = conjugates.iter().filter(|k| contains(k, hi)).count() as u128;
            assert_eq!(report.u[i][j], u, "u[{}][{}]", i + 1, j + 1);
        }
    }
}

#[test]
fn rows_present_at_5_are_exactly_the_stabilizer_classes() {
    let classes = stabilizer_classes(2, 4, 5, SPACE_CEILING).unwrap();
    let rows: Vec<SubgroupRecord> = fixed_rows(5)
        .into_iter()
        .filter(|r| r.label != "11")
        .filter_map(|r| r.record)
        .collect();
    assert_eq!(classes.len(), rows.len());
    for want in &rows {
        let hits = classes
            .iter()
            .filter(|c| c.is_conjugate_to(want, SPACE_CEILING).unwrap())
            .count();
        assert_eq!(hits, 1);
    }
}

#[test]
fn strata_scan_matches_inversion() {
    for (v, r, p) in [(2usize, 4usize, 5u64), (1, 4, 5), (2, 3, 7), (1, 5, 7), (2, 4, 7)] {
        let classes = stabilizer_classes(v, r, p, SPACE_CEILING).unwrap();
        let report = build_strata_report(&classes, SPACE_CEILING).unwrap();
        assert_eq!(
            scan_strata_sizes(&classes, SPACE_CEILING).unwrap(),
            report.e_open,
            "v={v} r={r} p={p}"
        );
        assert_eq!(report.e_open.iter().sum::<u128>(), omega_count(v, r, p));
    }
}

#[test]
fn constructive_classes_agree_with_stabilizer_scan() {
    for (v, r, p) in [(2usize, 4usize, 5u64), (1, 4, 5), (2, 3, 7), (1, 3, 11)] {
        let scanned = stabilizer_classes(v, r, p, SPACE_CEILING).unwrap();
        let built = constructive_classes(v, r, p, SPACE_CEILING).unwrap();
        assert_eq!(scanned.len(), built.len(), "v={v} r={r} p={p}");
        for s in &scanned {
            let hits = built
                .iter()
                .filter(|b| b.is_conjugate_to(s, SPACE_CEILING).unwrap())
                .count();
            assert_eq!(hits, 1, "v={v} r={r} p={p}");
        }
    }
}

#[test]
fn pipeline_is_integral_and_matches_oracle() {
    for (v, r, p) in [
        (1usize, 3usize, 5u64),
        (1, 4, 7),
        (2, 4, 5),
        (2, 4, 11),
        (3, 4, 5),
        (2, 5, 7),
    ] {
        let oracle = orbit_count_oracle(v, r, p, 1 << 28).unwrap() as u128;
        assert_eq!(
            pipeline_count(v, r, p, SPACE_CEILING).unwrap(),
            oracle,
            "v={v} r={r} p={p}"
        );
    }
}

#[test]
fn singular_primes_are_refused() {
    assert!(pipeline_count(2, 4, 3, SPACE_CEILING).is_err());
}

fn element(v: usize, r: usize, p: u64) -> impl Strategy<Value = ActionElement> {
    (
        prop::collection::vec(0..p, v * v),
        Just((0..r).collect::<Vec<usize>>()).prop_shuffle(),
    )
        .prop_filter_map("singular", move |(d, images)| {
            let g = FpMatrix::from_residues(v, v, p, d);
            g.is_invertible()
                .then(|| ActionElement::new(g, Perm::from_images(images).unwrap()).unwrap())
        })
}

fn point(v: usize, r: usize, p: u64) -> impl Strategy<Value = OmegaMatrix> {
    prop::collection::vec(prop::collection::vec(0..p as i64, r - 1), v).prop_filter_map("not in Omega", move |rows| {
        let rows: Vec<Vec<i64>> = rows
            .into_iter()
            .map(|mut row| {
                row.push(-row.iter().sum::<i64>());
                row
            })
            .collect();
        OmegaMatrix::from_rows(p, &rows).ok()
    })
}

proptest! {
    #[test]
    fn action_is_a_left_action(a in element(2, 4, 7), b in element(2, 4, 7), x in point(2, 4, 7)) {
        prop_assert_eq!(act(&a.compose(&b), &x).unwrap(), act(&a, &act(&b, &x).unwrap()).unwrap());
        prop_assert_eq!(act(&a.inverse(), &act(&a, &x).unwrap()).unwrap(), x);
    }

    #[test]
    fn stabilizers_conjugate_along_orbits(c in element(2, 4, 5), x in point(2, 4, 5)) {
        let moved = act(&c, &x).unwrap();
        prop_assert_eq!(point_stabilizer(&moved), point_stabilizer(&x).conjugate_by(&c));
    }

    #[test]
    fn stabilizers_fix_their_point(x in point(3, 5, 3)) {
        let stab = point_stabilizer(&x);
        for g in generators(&stab) {
            prop_assert_eq!(act(&g, &x).unwrap(), x.clone());
        }
    }
}
