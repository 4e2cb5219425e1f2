//! Orbit counting by Möbius inversion over conjugacy classes of stabilizers.
//!
//! With classes `H_1 = 1, .., H_s` listed compatibly with containment:
//! `d_ij` counts subgroups of `H_j` conjugate to `H_i`, `S_i = |G| / |N(H_i)|`,
//! `T_i = |H_i|`, `L_i = |Omega^{H_i}|`. Then `U = S^-1 D S`, `L° = U^-1 L`,
//! `E° = S L°` and `O° = T D^-1 N^-1 L`, whose sum is the number of orbits.

use num_rational::Ratio;
use serde::Serialize;

use super::omega::{omega_count, rref_points};
use super::stabilizer::{class_index, fixed_set_size, normalizer_size, point_stabilizer, stabilizer_classes};
use super::SubgroupRecord;
use crate::arith::factorial;
use crate::error::{Error, Result};
use crate::linalg::gl_order;

type Q = Ratio<i128>;

#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    /// One-based position in the ordered class list.
    pub index: usize,
    pub generators: Vec<String>,
    pub q: Vec<Vec<Vec<u64>>>,
    pub order: usize,
    pub orbit_partition: Vec<usize>,
    pub normalizer: u128,
    pub fixed: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrataReport {
    pub rank: usize,
    pub branch_count: usize,
    pub prime: u64,
    pub group_order: u128,
    pub omega: u128,
    pub classes: Vec<ClassSummary>,
    pub d: Vec<Vec<u64>>,
    pub u: Vec<Vec<u128>>,
    pub s: Vec<u128>,
    pub n: Vec<u128>,
    pub t: Vec<u128>,
    pub l: Vec<u128>,
    pub l_open: Vec<u128>,
    pub e_open: Vec<u128>,
    pub o_open: Vec<u128>,
    pub total: u128,
    #[serde(skip)]
    pub records: Vec<SubgroupRecord>,
}

fn inconsistency(msg: String) -> Error {
    Error::PipelineInconsistency(msg)
}

fn to_count(x: Q, what: &str, i: usize) -> Result<u128> {
    if !x.is_integer() || *x.numer() < 0 {
        return Err(inconsistency(format!(
            "{what}[{}] = {x} is not a nonnegative integer",
            i + 1
        )));
    }
    Ok(*x.numer() as u128)
}

/// Solves `M z = w` for upper unitriangular `M`.
fn back_substitute(m: &[Vec<Q>], w: &[Q]) -> Vec<Q> {
    let s = w.len();
    let mut z = vec![Q::from_integer(0); s];
    for i in (0..s).rev() {
        let mut acc = w[i];
        for j in i + 1..s {
            acc -= m[i][j] * z[j];
        }
        z[i] = acc;
    }
    z
}

pub fn build_strata_report(classes: &[SubgroupRecord], ceiling: u128) -> Result<StrataReport> {
    let first = classes
        .first()
        .ok_or_else(|| inconsistency("empty class list".into()))?;
    let (v, r, p) = (first.rank(), first.branch_count(), first.modulus());
    if p <= r as u64 {
        return Err(Error::SingularPrime { p, r });
    }
    if first.order() != 1 {
        return Err(inconsistency("the first class must be the trivial subgroup".into()));
    }
    let s_len = classes.len();
    let group_order = gl_order(v, p) * factorial(r);

    let mut d = vec![vec![0u64; s_len]; s_len];
    for (j, h) in classes.iter().enumerate() {
        for k in h.subgroup().all_subgroups() {
            let rec = h.restrict(&k)?;
            let i = class_index(classes, &rec, ceiling)?
                .ok_or_else(|| inconsistency(format!("a subgroup of class {} is missing from the list", j + 1)))?;
            if i > j {
                return Err(inconsistency(format!(
                    "class {} lies inside class {} but is listed after it",
                    i + 1,
                    j + 1
                )));
            }
            d[i][j] += 1;
        }
    }
    if (0..s_len).any(|i| d[i][i] != 1) {
        return Err(inconsistency("D must have a unit diagonal".into()));
    }

    let mut n = Vec::with_capacity(s_len);
    let mut l = Vec::with_capacity(s_len);
    for h in classes {
        n.push(normalizer_size(h, ceiling)?);
        l.push(fixed_set_size(h, ceiling)?);
    }
    let t: Vec<u128> = classes.iter().map(|h| h.order() as u128).collect();
    let mut s = Vec::with_capacity(s_len);
    for (i, &ni) in n.iter().enumerate() {
        if ni == 0 || !group_order.is_multiple_of(ni) {
            return Err(inconsistency(format!("|N(H_{})| = {ni} does not divide |G|", i + 1)));
        }
        s.push(group_order / ni);
    }

    let qi = |x: u128| Q::from_integer(x as i128);
    let dq: Vec<Vec<Q>> = d
        .iter()
        .map(|row| row.iter().map(|&x| qi(x as u128)).collect())
        .collect();
    let uq: Vec<Vec<Q>> = (0..s_len)
        .map(|i| (0..s_len).map(|j| dq[i][j] * qi(s[j]) / qi(s[i])).collect())
        .collect();

    // O° = T D^-1 N^-1 L
    let w: Vec<Q> = (0..s_len).map(|i| qi(l[i]) / qi(n[i])).collect();
    let z = back_substitute(&dq, &w);
    let o_open_q: Vec<Q> = (0..s_len).map(|i| qi(t[i]) * z[i]).collect();
    // L° = U^-1 L, E° = S L°
    let lq: Vec<Q> = l.iter().map(|&x| qi(x)).collect();
    let l_open_q = back_substitute(&uq, &lq);
    let e_open_q: Vec<Q> = (0..s_len).map(|i| qi(s[i]) * l_open_q[i]).collect();

    let mut u = vec![vec![0u128; s_len]; s_len];
    for i in 0..s_len {
        for j in 0..s_len {
            u[i][j] = to_count(uq[i][j], "U", i)?;
        }
    }
    let o_open: Vec<u128> = o_open_q
        .iter()
        .enumerate()
        .map(|(i, &x)| to_count(x, "O°", i))
        .collect::<Result<_>>()?;
    let l_open: Vec<u128> = l_open_q
        .iter()
        .enumerate()
        .map(|(i, &x)| to_count(x, "L°", i))
        .collect::<Result<_>>()?;
    let e_open: Vec<u128> = e_open_q
        .iter()
        .enumerate()
        .map(|(i, &x)| to_count(x, "E°", i))
        .collect::<Result<_>>()?;

    for i in 0..s_len {
        let rebuilt: u128 = (0..s_len).map(|j| u[i][j] * l_open[j]).sum();
        if rebuilt != l[i] {
            return Err(inconsistency(format!("L != U L° in row {}", i + 1)));
        }
        if t[i] * e_open[i] != o_open[i] * group_order {
            return Err(inconsistency(format!("O° and E° disagree in row {}", i + 1)));
        }
    }
    let omega = omega_count(v, r, p);
    if e_open.iter().sum::<u128>() != omega {
        return Err(inconsistency("strata sizes do not partition Omega".into()));
    }

    let summaries = classes
        .iter()
        .enumerate()
        .map(|(i, h)| ClassSummary {
            index: i + 1,
            generators: h.subgroup().generators().iter().map(|a| a.to_string()).collect(),
            q: h.q_generator_tables(),
            order: h.order(),
            orbit_partition: h.subgroup().orbit_partition(),
            normalizer: n[i],
            fixed: l[i],
        })
        .collect();
    Ok(StrataReport {
        rank: v,
        branch_count: r,
        prime: p,
        group_order,
        omega,
        classes: summaries,
        d,
        u,
        s,
        n,
        t,
        l,
        l_open,
        e_open,
        total: o_open.iter().sum(),
        o_open,
        records: classes.to_vec(),
    })
}

/// Number of orbits on `Omega(v, r, p)` by the stabilizer pipeline. Refuses
/// primes `p <= r`, where stabilizer orders may be divisible by `p`.
pub fn pipeline_count(v: usize, r: usize, p: u64, ceiling: u128) -> Result<u128> {
    if p <= r as u64 {
        return Err(Error::SingularPrime { p, r });
    }
    let classes = stabilizer_classes(v, r, p, ceiling)?;
    Ok(build_strata_report(&classes, ceiling)?.total)
}

/// `E°` measured directly: every echelon point stands for `|GL(v, p)|` points
/// whose stabilizers are conjugate to its own.
pub fn scan_strata_sizes(classes: &[SubgroupRecord], ceiling: u128) -> Result<Vec<u128>> {
    let first = classes
        .first()
        .ok_or_else(|| inconsistency("empty class list".into()))?;
    let (v, r, p) = (first.rank(), first.branch_count(), first.modulus());
    let gl = gl_order(v, p);
    let mut sizes = vec![0u128; classes.len()];
    for x in rref_points(v, r, p, ceiling)? {
        let stab = point_stabilizer(&x);
        let i = class_index(classes, &stab, ceiling)?
            .ok_or_else(|| inconsistency(format!("stabilizer of\n{x}is in no listed class")))?;
        sizes[i] += gl;
    }
    Ok(sizes)
}
