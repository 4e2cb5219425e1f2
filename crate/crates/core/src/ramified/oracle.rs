//! Brute-force orbit partition of `Omega` under `GL(v, p) x Sym(r)`.
//!
//! Independent of the stabilizer machinery: points are indexed by their first
//! `r - 1` columns and orbits are closed by breadth-first search under
//! elementary matrices, one scaling, and adjacent transpositions.

use std::collections::VecDeque;

use serde::Serialize;

use super::omega::{candidate_count, decode_into, encode, is_valid_point};
use super::OmegaMatrix;
use crate::error::{Error, Result};
use crate::linalg::{gl_generators, FpMatrix};

/// Default ceiling on `p^(v(r-1))`, the size of the visited bitset.
pub const OMEGA_ORACLE_CEILING: u128 = 1 << 28;

#[derive(Debug, Clone, Serialize)]
pub struct OmegaOrbit {
    /// The orbit member of least index.
    pub representative: OmegaMatrix,
    pub size: u64,
}

/// All orbits, ordered by representative index.
pub fn omega_orbits(v: usize, r: usize, p: u64, ceiling: u128) -> Result<Vec<OmegaOrbit>> {
    if v == 0 || r < 2 || !crate::arith::is_prime(p) {
        return Err(Error::ShapeMismatch(format!("no Omega for v = {v}, r = {r}, p = {p}")));
    }
    let total = candidate_count(v, r, p);
    if total > ceiling || total > u32::MAX as u128 {
        return Err(Error::ceiling(
            "Omega orbit oracle",
            total,
            ceiling.min(u32::MAX as u128),
        ));
    }
    let gens: Vec<FpMatrix> = gl_generators(v, p);
    let mut visited = vec![0u64; (total as usize).div_ceil(64)];
    let seen = |bits: &[u64], i: u64| bits[(i / 64) as usize] >> (i % 64) & 1 == 1;
    let mark = |bits: &mut [u64], i: u64| bits[(i / 64) as usize] |= 1 << (i % 64);

    let mut x = vec![0u64; v * r];
    let mut y = vec![0u64; v * r];
    let mut scratch = Vec::with_capacity(v * r);
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut orbits = Vec::new();
    for start in 0..total as u64 {
        if seen(&visited, start) {
            continue;
        }
        decode_into(start, v, r, p, &mut x);
        if !is_valid_point(&x, v, r, p, &mut scratch) {
            continue;
        }
        let representative = OmegaMatrix(FpMatrix::from_residues(v, r, p, x.clone()));
        mark(&mut visited, start);
        queue.push_back(start as u32);
        let mut size = 0u64;
        while let Some(cur) = queue.pop_front() {
            size += 1;
            decode_into(cur as u64, v, r, p, &mut x);
            let visit = |y: &[u64], visited: &mut Vec<u64>, queue: &mut VecDeque<u32>| {
                let idx = encode(y, v, r, p);
                if !seen(visited, idx) {
                    mark(visited, idx);
                    queue.push_back(idx as u32);
                }
            };
            for g in &gens {
                for i in 0..v {
                    for j in 0..r {
                        y[i * r + j] = (0..v).map(|k| g.get(i, k) * x[k * r + j]).sum::<u64>() % p;
                    }
                }
                visit(&y, &mut visited, &mut queue);
            }
            for j in 0..r - 1 {
                y.copy_from_slice(&x);
                for i in 0..v {
                    y.swap(i * r + j, i * r + j + 1);
                }
                visit(&y, &mut visited, &mut queue);
            }
        }
        orbits.push(OmegaOrbit { representative, size });
    }
    Ok(orbits)
}

/// Number of `GL(v, p) x Sym(r)` orbits on `Omega(v, r, p)`.
pub fn orbit_count_oracle(v: usize, r: usize, p: u64, ceiling: u128) -> Result<u64> {
    Ok(omega_orbits(v, r, p, ceiling)?.len() as u64)
}
