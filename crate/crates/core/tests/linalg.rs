use std::collections::BTreeSet;

use proptest::prelude::*;

use mcg_abelian::linalg::{enumerate_gl, gl_generators, gl_order, subspace_count, FpMatrix};

fn matrix(n: usize, p: u64) -> impl Strategy<Value = FpMatrix> {
    prop::collection::vec(0..p, n * n).prop_map(move |d| FpMatrix::from_residues(n, n, p, d))
}

fn rect(rows: usize, cols: usize, p: u64) -> impl Strategy<Value = FpMatrix> {
    prop::collection::vec(0..p, rows * cols).prop_map(move |d| FpMatrix::from_residues(rows, cols, p, d))
}

#[test]
fn gl_order_matches_enumeration() {
    for (v, p) in [(1, 2), (1, 7), (2, 2), (2, 3), (2, 5), (3, 2), (3, 3)] {
        let n = enumerate_gl(v, p, 1 << 24).unwrap().count() as u128;
        assert_eq!(gl_order(v, p), n, "GL({v},{p})");
    }
}

#[test]
fn gl_enumeration_respects_ceiling() {
    assert!(enumerate_gl(3, 5, 1000).is_err());
}

#[test]
fn subspace_count_matches_distinct_row_spaces() {
    // every l x v matrix of rank l, reduced to echelon form
    for (v, p) in [(2, 3u64), (3, 2), (3, 3), (4, 2)] {
        for l in 0..=v {
            let mut seen = BTreeSet::new();
            let total = p.pow((l * v) as u32);
            for mut idx in 0..total {
                let mut data = vec![0; l * v];
                for x in data.iter_mut() {
                    *x = idx % p;
                    idx /= p;
                }
                let m = FpMatrix::from_residues(l, v, p, data);
                if m.rank() == l {
                    seen.insert(m.rref().0);
                }
            }
            let want = if l == 0 { 1 } else { seen.len() as u128 };
            assert_eq!(subspace_count(v, l, p), want, "v={v} l={l} p={p}");
        }
    }
}

#[test]
fn gl_generators_generate_the_whole_group() {
    for (v, p) in [(2, 3), (2, 5), (3, 2)] {
        let gens = gl_generators(v, p);
        let mut seen = BTreeSet::from([FpMatrix::identity(v, p)]);
        let mut frontier = vec![FpMatrix::identity(v, p)];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        assert_eq!(seen.len() as u128, gl_order(v, p));
    }
}

proptest! {
    #[test]
    fn inverse_is_two_sided(m in matrix(3, 7)) {
        match m.inverse() {
            Some(inv) => {
                prop_assert_eq!(m.mul(&inv), FpMatrix::identity(3, 7));
                prop_assert_eq!(inv.mul(&m), FpMatrix::identity(3, 7));
                prop_assert!(m.determinant() != 0);
            }
            None => prop_assert_eq!(m.determinant(), 0),
        }
    }

    #[test]
    fn rank_is_transpose_invariant(m in rect(3, 5, 5)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn kernel_has_complementary_dimension(m in rect(3, 5, 3)) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(kernel.len() + m.rank(), 5);
        for x in &kernel {
            prop_assert!(m.mul_vec(x).iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn determinant_is_multiplicative(a in matrix(3, 11), b in matrix(3, 11)) {
        prop_assert_eq!(a.mul(&b).determinant(), a.determinant() * b.determinant() % 11);
    }

    #[test]
    fn order_annihilates(m in matrix(2, 5)) {
        prop_assume!(m.is_invertible());
        let k = m.order();
        prop_assert_eq!(m.pow(k), FpMatrix::identity(2, 5));
        for d in 1..k {
            if k % d == 0 {
                prop_assert_ne!(m.pow(d), FpMatrix::identity(2, 5));
            }
        }
    }
}
