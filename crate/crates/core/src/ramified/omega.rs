//! The point set `Omega(v, r, p)` and its cardinality.

use rayon::prelude::*;

use super::OmegaMatrix;
use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::linalg::{rank_in_place, subspace_count, FpMatrix};

/// Default ceiling on `p^(v(r-1))`, the number of candidate matrices scanned.
pub const OMEGA_CEILING: u128 = 1 << 26;

/// `|{X : X_i != 0, sum X_i = 0}|` over `F_p^v`, by inclusion-exclusion:
/// `((p^v - 1)^r - (-1)^r) / p^v + (-1)^r`.
pub fn omega_bar_count(v: usize, r: usize, p: u64) -> u128 {
    let q = (p as i128).checked_pow(v as u32).expect("p^v overflows 128 bits");
    let sign: i128 = if r.is_multiple_of(2) { 1 } else { -1 };
    let top = (q - 1).checked_pow(r as u32).expect("(p^v - 1)^r overflows 128 bits");
    let value = (top - sign) / q + sign;
    u128::try_from(value).expect("count is nonnegative")
}

/// `|Omega(v, r, p)|`: subtract the tuples spanning each proper subspace.
pub fn omega_count(v: usize, r: usize, p: u64) -> u128 {
    if v == 0 {
        return 0;
    }
    let mut omega = vec![0u128; v + 1];
    for k in 1..=v {
        let spanning_less: u128 = (1..k).map(|l| subspace_count(k, l, p) * omega[l]).sum();
        omega[k] = omega_bar_count(k, r, p) - spanning_less;
    }
    omega[v]
}

/// Row-major `v x r` matrix whose first `r - 1` columns are the base-`p`
/// digits of `index` (column-major, least significant first) and whose last
/// column is minus their sum.
pub(crate) fn decode_into(mut index: u64, v: usize, r: usize, p: u64, out: &mut [u64]) {
    for j in 0..r - 1 {
        for i in 0..v {
            out[i * r + j] = index % p;
            index /= p;
        }
    }
    for i in 0..v {
        let s: u64 = (0..r - 1).map(|j| out[i * r + j]).sum::<u64>() % p;
        out[i * r + r - 1] = (p - s) % p;
    }
}

pub(crate) fn encode(x: &[u64], v: usize, r: usize, p: u64) -> u64 {
    let mut index = 0u64;
    for j in (0..r - 1).rev() {
        for i in (0..v).rev() {
            index = index * p + x[i * r + j];
        }
    }
    index
}

/// Whether a row-major `v x r` buffer has no zero column and full row rank.
pub(crate) fn is_valid_point(x: &[u64], v: usize, r: usize, p: u64, scratch: &mut Vec<u64>) -> bool {
    if (0..r).any(|j| (0..v).all(|i| x[i * r + j] == 0)) {
        return false;
    }
    scratch.clear();
    scratch.extend_from_slice(x);
    rank_in_place(scratch, v, r, p) == v
}

pub(crate) fn candidate_count(v: usize, r: usize, p: u64) -> u128 {
    (p as u128).checked_pow((v * (r - 1)) as u32).unwrap_or(u128::MAX)
}

fn check_shape(v: usize, r: usize, p: u64) -> Result<()> {
    if v == 0 || r < 2 {
        return Err(Error::ShapeMismatch(format!(
            "Omega needs v >= 1 and r >= 2, got v = {v}, r = {r}"
        )));
    }
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidGroup(format!("{p} is not prime")));
    }
    Ok(())
}

/// Every point of `Omega(v, r, p)` exactly once, in index order.
pub fn enumerate_omega(v: usize, r: usize, p: u64, ceiling: u128) -> Result<impl Iterator<Item = OmegaMatrix>> {
    check_shape(v, r, p)?;
    let total = candidate_count(v, r, p);
    if total > ceiling {
        return Err(Error::ceiling("Omega enumeration", total, ceiling));
    }
    let mut buf = vec![0u64; v * r];
    let mut scratch = Vec::with_capacity(v * r);
    Ok((0..total as u64).filter_map(move |idx| {
        decode_into(idx, v, r, p, &mut buf);
        is_valid_point(&buf, v, r, p, &mut scratch).then(|| OmegaMatrix(FpMatrix::from_residues(v, r, p, buf.clone())))
    }))
}

/// The points of `Omega` in reduced row echelon form: one per `GL(v, p)` orbit,
/// since `GL` acts freely by row operations.
pub fn rref_points(v: usize, r: usize, p: u64, ceiling: u128) -> Result<Vec<OmegaMatrix>> {
    check_shape(v, r, p)?;
    if v > r {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut scratch = Vec::new();
    for pivots in combinations(r, v) {
        // free slots: row i, non-pivot column right of its pivot
        let free: Vec<(usize, usize)> = (0..v)
            .flat_map(|i| {
                let pivots = &pivots;
                (pivots[i] + 1..r)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let size = (p as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
        if size > ceiling {
            return Err(Error::ceiling("echelon point enumeration", size, ceiling));
        }
        let mut x = vec![0u64; v * r];
        for (i, &c) in pivots.iter().enumerate() {
            x[i * r + c] = 1;
        }
        for mut idx in 0..size as u64 {
            for &(i, c) in &free {
                x[i * r + c] = idx % p;
                idx /= p;
            }
            let sums_zero = (0..v).all(|i| x[i * r..(i + 1) * r].iter().sum::<u64>() % p == 0);
            if sums_zero && is_valid_point(&x, v, r, p, &mut scratch) {
                out.push(OmegaMatrix(FpMatrix::from_residues(v, r, p, x.clone())));
            }
        }
    }
    Ok(out)
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Number of full-rank tuples `(X_1, .., X_s)` of nonzero vectors of `F_p^v`
/// with `sum a_i X_i = 0`, counted by enumeration.
pub fn scaled_sum_count(coeffs: &[i64], v: usize, p: u64, ceiling: u128) -> Result<u128> {
    let s = coeffs.len();
    check_shape(v, s.max(2), p)?;
    let a: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    if a.contains(&0) {
        return Err(Error::InvalidElement(
            "scaled sum coefficients must be nonzero mod p".into(),
        ));
    }
    if s < 2 {
        return Ok(0);
    }
    let total = candidate_count(v, s, p);
    if total > ceiling {
        return Err(Error::ceiling("scaled sum enumeration", total, ceiling));
    }
    let last_inv = inv_mod(a[s - 1], p).expect("nonzero mod prime");
    let count = (0..total as u64)
        .into_par_iter()
        .map_init(
            || (vec![0u64; v * s], Vec::with_capacity(v * s)),
            |(x, scratch), mut idx| {
                for j in 0..s - 1 {
                    for i in 0..v {
                        x[i * s + j] = idx % p;
                        idx /= p;
                    }
                }
                for i in 0..v {
                    let t: u64 = (0..s - 1).map(|j| a[j] * x[i * s + j] % p).sum::<u64>() % p;
                    x[i * s + s - 1] = (p - t) % p * last_inv % p;
                }
                u128::from(is_valid_point(x, v, s, p, scratch))
            },
        )
        .sum();
    Ok(count)
}

/// `[I_v | -1]`, the representative of the single class when `r = v + 1`.
pub fn unique_when_r_is_v_plus_1(v: usize, p: u64) -> OmegaMatrix {
    let r = v + 1;
    let mut x = FpMatrix::zeros(v, r, p);
    for i in 0..v {
        x.set(i, i, 1);
        x.set(i, v, -1);
    }
    OmegaMatrix::new(x).expect("[I | -1] lies in Omega")
}
