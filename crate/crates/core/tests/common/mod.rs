//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use mcg_abelian::linalg::FpMatrix;
use mcg_abelian::perm::Perm;
use mcg_abelian::ramified::SubgroupRecord;

/// A square root of `-1` in `F_p`, if any.
pub fn sqrt_minus_one(p: u64) -> Option<i64> {
    (1..p).find(|&x| (x * x + 1) % p == 0).map(|x| x as i64)
}

/// A primitive cube root of unity in `F_p`, if any.
pub fn cube_root_of_unity(p: u64) -> Option<i64> {
    (2..p).find(|&x| (x * x * x) % p == 1).map(|x| x as i64)
}

fn m(p: u64, rows: &[[i64; 2]; 2]) -> FpMatrix {
    FpMatrix::from_rows(p, &[rows[0].to_vec(), rows[1].to_vec()])
}

fn perm(text: &str) -> Perm {
    Perm::parse_cycles(4, text).unwrap()
}

fn rec(p: u64, gens: &[(&str, FpMatrix)]) -> SubgroupRecord {
    let gens: Vec<(Perm, FpMatrix)> = gens.iter().map(|(a, q)| (perm(a), q.clone())).collect();
    SubgroupRecord::from_generators(4, 2, p, &gens).unwrap()
}

/// One row of the fixed-point table for rank 2 and four branch points.
pub struct FixedRow {
    pub label: &'static str,
    /// `None` where the row's field condition fails at this prime.
    pub record: Option<SubgroupRecord>,
    pub order: usize,
    pub published_fixed: fn(u128) -> u128,
}

/// The thirteen rows, built from explicit `(H', q)` generator images.
pub fn fixed_rows(p: u64) -> Vec<FixedRow> {
    let id = m(p, &[[1, 0], [0, 1]]);
    let neg = m(p, &[[-1, 0], [0, -1]]);
    let d1m = m(p, &[[1, 0], [0, -1]]);
    let dm1 = m(p, &[[-1, 0], [0, 1]]);
    let rot = m(p, &[[0, -1], [1, 0]]);
    let i = sqrt_minus_one(p);
    let w = cube_root_of_unity(p);
    let split_c4 = p % 4 == 1;
    let row = |label, record, order, f| FixedRow {
        label,
        record,
        order,
        published_fixed: f,
    };
    vec![
        row("1", Some(SubgroupRecord::trivial(2, 4, p)), 1, |p| {
            p * (p - 1) * (p * p - 1) * (p * p + p - 3)
        }),
        row("2", Some(rec(p, &[("(1 2)", id.clone())])), 2, |p| {
            p * (p - 1) * (p * p - 1)
        }),
        row("3", Some(rec(p, &[("(1 2)", d1m.clone())])), 2, |p| {
            (p - 1) * (p * p - 1)
        }),
        row("4", Some(rec(p, &[("(1 2)(3 4)", d1m.clone())])), 2, |p| {
            (p - 1) * (p * p - 1)
        }),
        row("5", Some(rec(p, &[("(1 2)(3 4)", neg)])), 2, |p| {
            p * (p - 1) * (p * p - 1)
        }),
        row(
            "6",
            w.map(|w| rec(p, &[("(1 2 3)", m(p, &[[1, 0], [0, w]]))])),
            3,
            |p| (p - 1) * (p - 1),
        ),
        row("7", Some(rec(p, &[("(1 2)", d1m.clone()), ("(3 4)", id)])), 4, |p| {
            (p - 1) * (p - 1)
        }),
        row(
            "8",
            Some(rec(p, &[("(1 2)", dm1.clone()), ("(3 4)", d1m.clone())])),
            4,
            |p| (p - 1) * (p - 1),
        ),
        row(
            "9",
            Some(rec(p, &[("(1 2)(3 4)", dm1), ("(1 3)(2 4)", d1m.clone())])),
            4,
            |p| (p - 1) * (p - 1),
        ),
        row(
            "10",
            i.map(|i| rec(p, &[("(1 2 3 4)", m(p, &[[i, 0], [0, -1]]))])),
            4,
            |p| (p - 1) * (p - 1),
        ),
        row(
            "11",
            (!split_c4).then(|| rec(p, &[("(1 2 3 4)", rot.clone())])),
            4,
            |p| p * p - 1,
        ),
        row("11a", split_c4.then(|| rec(p, &[("(1 2 3 4)", rot.clone())])), 4, |p| {
            (p - 1) * (p - 1)
        }),
        row("12", Some(rec(p, &[("(1 2 3 4)", rot), ("(1 3)", d1m)])), 8, |p| p - 1),
    ]
}

/// The twelve classes at a prime `1 mod 12`, in the expected list order.
pub fn class_inventory(p: u64) -> Vec<SubgroupRecord> {
    fixed_rows(p)
        .into_iter()
        .filter(|r| r.label != "11")
        .map(|r| r.record.expect("every row exists at this prime"))
        .collect()
}

/// The containment matrix expected at a prime `1 mod 12`.
pub const D_EXPECTED: [[u64; 12]; 12] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 2, 0, 0, 0, 2],
    [0, 0, 0, 1, 0, 0, 1, 0, 2, 1, 0, 2],
    [0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 1, 1],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
];
