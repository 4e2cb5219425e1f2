//! Brute-force orbit partition of all generating vectors of a signature.
//!
//! Tuples `(A_1..A_rho, B_1..B_rho, C_1..C_r)` are encoded as mixed-radix
//! integers with `A_1` most significant, so numeric order is lexicographic
//! order. Orbits are closed under the `k = +-1` moves, every period-preserving
//! transposition of elliptic slots, and a generating set of `Aut(G)`; for a
//! finite set these generate the same orbits as the full groups.

use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{automorphism_generators, AbelianGroup, Signature, AUTOMORPHISM_GROUP_CEILING};
use crate::arith::prime_factors;
use crate::error::{Error, Result};
use crate::linalg::rank_in_place;

use super::GeneratingVector;

/// Default ceiling on `|G|^(2 rho + r)`.
pub const ORACLE_CEILING: u128 = 1 << 26;
/// Largest element count for which a full addition table is built.
const ADD_TABLE_LIMIT: usize = 2048;

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub ceiling: u128,
    /// Keep the orbit label of every tuple so [`OracleResult::orbit_of`] works.
    pub keep_labels: bool,
    /// Scan tuples in the order `k * stride mod total` instead of ascending.
    /// Any stride coprime to the tuple count gives the same partition.
    pub scan_stride: Option<u64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            ceiling: ORACLE_CEILING,
            keep_labels: false,
            scan_stride: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub count: usize,
    /// Lexicographically least member of each orbit, in ascending order.
    pub representatives: Vec<GeneratingVector>,
    pub orbit_sizes: Vec<u64>,
    pub valid_total: u64,
    #[serde(skip)]
    labels: Option<Vec<u32>>,
    #[serde(skip)]
    radix: u64,
}

impl OracleResult {
    /// Orbit index of a valid vector; needs `keep_labels`.
    pub fn orbit_of(&self, gv: &GeneratingVector) -> Option<usize> {
        let labels = self.labels.as_ref()?;
        let g = gv.group();
        let idx = gv
            .slots()
            .iter()
            .fold(0u64, |acc, x| acc * self.radix + g.index_of(x) as u64);
        match labels[idx as usize] {
            u32::MAX => None,
            l => Some(l as usize),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Gen {
    /// `slot[dst] += sign * slot[src]`
    Add {
        dst: usize,
        src: usize,
        negate: bool,
    },
    /// `slot[a] += sign * slot[a2]`, `slot[b2] -= sign * slot[b]`
    Z {
        a: usize,
        a2: usize,
        b: usize,
        b2: usize,
        negate: bool,
    },
    /// `(slot[a], slot[b]) -> (slot[b], -slot[a])`
    R {
        a: usize,
        b: usize,
    },
    Swap {
        x: usize,
        y: usize,
    },
    Aut(usize),
}

struct Tables {
    n: usize,
    add: Option<Vec<u16>>,
    group: AbelianGroup,
    neg: Vec<u32>,
    order: Vec<u64>,
    /// Per prime: each element's coordinates mod p over factors divisible by p.
    residues: Vec<(u64, usize, Vec<u64>)>,
    autos: Vec<Vec<u32>>,
}

impl Tables {
    fn new(g: &AbelianGroup) -> Result<Self> {
        let n = g.order() as usize;
        let elems: Vec<_> = g.elements().collect();
        let add = (n <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0u16; n * n];
            for (i, x) in elems.iter().enumerate() {
                for (j, y) in elems.iter().enumerate() {
                    t[i * n + j] = g.index_of(&g.add(x, y)) as u16;
                }
            }
            t
        });
        let neg = elems.iter().map(|x| g.index_of(&g.neg(x)) as u32).collect();
        let order = elems.iter().map(|x| g.element_order(x)).collect();
        let residues = prime_factors(g.exponent())
            .into_iter()
            .map(|p| {
                let cols: Vec<usize> = (0..g.rank()).filter(|&i| g.factors()[i].is_multiple_of(p)).collect();
                let data = elems
                    .iter()
                    .flat_map(|x| cols.iter().map(move |&i| x.0[i] % p))
                    .collect();
                (p, cols.len(), data)
            })
            .collect();
        let autos = automorphism_generators(g, AUTOMORPHISM_GROUP_CEILING)?
            .iter()
            .map(|a| a.permutation_table(g))
            .collect();
        Ok(Tables {
            n,
            add,
            group: g.clone(),
            neg,
            order,
            residues,
            autos,
        })
    }

    #[inline]
    fn add(&self, x: u32, y: u32) -> u32 {
        match &self.add {
            Some(t) => t[x as usize * self.n + y as usize] as u32,
            None => {
                let g = &self.group;
                g.index_of(&g.add(&g.element_at(x as usize), &g.element_at(y as usize))) as u32
            }
        }
    }
}

struct Layout {
    rho: usize,
    periods: Vec<u64>,
    radix: u64,
    pow: Vec<u64>,
}

impl Layout {
    #[inline]
    fn decode(&self, mut idx: u64, out: &mut [u32]) {
        for s in out.iter_mut().rev() {
            *s = (idx % self.radix) as u32;
            idx /= self.radix;
        }
    }

    #[inline]
    fn encode(&self, slots: &[u32]) -> u64 {
        slots.iter().fold(0, |acc, &s| acc * self.radix + s as u64)
    }
}

fn is_valid(t: &Tables, lay: &Layout, slots: &[u32], buf: &mut Vec<u64>) -> bool {
    let ell = &slots[2 * lay.rho..];
    let mut sum = 0u32;
    for (&c, &m) in ell.iter().zip(&lay.periods) {
        if t.order[c as usize] != m {
            return false;
        }
        sum = t.add(sum, c);
    }
    if sum != 0 {
        return false;
    }
    for (p, width, data) in &t.residues {
        buf.clear();
        for &s in slots {
            buf.extend_from_slice(&data[s as usize * width..(s as usize + 1) * width]);
        }
        if rank_in_place(buf, slots.len(), *width, *p) < *width {
            return false;
        }
    }
    true
}

fn generators(lay: &Layout, n_autos: usize) -> Vec<Gen> {
    let rho = lay.rho;
    let r = lay.periods.len();
    let a = |i: usize| i;
    let b = |i: usize| rho + i;
    let c = |j: usize| 2 * rho + j;
    let mut gens = Vec::new();
    for negate in [false, true] {
        for i in 0..rho {
            gens.push(Gen::Add {
                dst: b(i),
                src: a(i),
                negate,
            });
            gens.push(Gen::Add {
                dst: a(i),
                src: b(i),
                negate,
            });
            if i + 1 < rho {
                gens.push(Gen::Z {
                    a: a(i),
                    a2: a(i + 1),
                    b: b(i),
                    b2: b(i + 1),
                    negate,
                });
            }
            for j in 0..r {
                gens.push(Gen::Add {
                    dst: b(i),
                    src: c(j),
                    negate,
                });
                gens.push(Gen::Add {
                    dst: a(i),
                    src: c(j),
                    negate,
                });
            }
        }
    }
    for i in 0..rho {
        gens.push(Gen::R { a: a(i), b: b(i) });
        if i + 1 < rho {
            gens.push(Gen::Swap { x: a(i), y: a(i + 1) });
        }
    }
    for j in 0..r {
        for j2 in j + 1..r {
            if lay.periods[j] == lay.periods[j2] {
                gens.push(Gen::Swap { x: c(j), y: c(j2) });
            }
        }
    }
    gens.extend((0..n_autos).map(Gen::Aut));
    gens
}

#[inline]
fn neighbor(t: &Tables, lay: &Layout, idx: u64, s: &[u32], gen: Gen, tmp: &mut [u32]) -> u64 {
    let put = |idx: u64, slot: usize, old: u32, new: u32| -> u64 {
        idx - old as u64 * lay.pow[slot] + new as u64 * lay.pow[slot]
    };
    let signed = |x: u32, negate: bool| if negate { t.neg[x as usize] } else { x };
    match gen {
        Gen::Add { dst, src, negate } => {
            let new = t.add(s[dst], signed(s[src], negate));
            put(idx, dst, s[dst], new)
        }
        Gen::Z { a, a2, b, b2, negate } => {
            let na = t.add(s[a], signed(s[a2], negate));
            let nb = t.add(s[b2], signed(s[b], !negate));
            put(put(idx, a, s[a], na), b2, s[b2], nb)
        }
        Gen::R { a, b } => {
            let na = s[b];
            let nb = t.neg[s[a] as usize];
            put(put(idx, a, s[a], na), b, s[b], nb)
        }
        Gen::Swap { x, y } => {
            let rho = lay.rho;
            if x < rho && y < rho {
                // swap hyperbolic pairs x and y together
                let (bx, by) = (x + rho, y + rho);
                let i1 = put(put(idx, x, s[x], s[y]), y, s[y], s[x]);
                put(put(i1, bx, s[bx], s[by]), by, s[by], s[bx])
            } else {
                put(put(idx, x, s[x], s[y]), y, s[y], s[x])
            }
        }
        Gen::Aut(k) => {
            let table = &t.autos[k];
            for (o, &x) in tmp.iter_mut().zip(s) {
                *o = table[x as usize];
            }
            lay.encode(tmp)
        }
    }
}

/// Partitions all valid generating vectors of `(G, sig)` into orbits.
pub fn orbit_classes_oracle(g: &AbelianGroup, sig: &Signature, opts: &OracleOptions) -> Result<OracleResult> {
    let rho = sig.orbit_genus as usize;
    let slots = 2 * rho + sig.branch_count();
    let radix = g.order();
    let total = (radix as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    let ceiling = opts.ceiling.min(u32::MAX as u128);
    if total > ceiling {
        return Err(Error::ceiling("generating-vector oracle", total, ceiling));
    }
    let total = total as u64;
    let tables = Tables::new(g)?;
    let pow: Vec<u64> = (0..slots).map(|k| radix.pow((slots - 1 - k) as u32)).collect();
    let lay = Layout {
        rho,
        periods: sig.periods.clone(),
        radix,
        pow,
    };

    // validity bitset, built in parallel
    let words = total.div_ceil(64) as usize;
    let valid: Vec<u64> = (0..words)
        .into_par_iter()
        .map_init(
            || (vec![0u32; slots], Vec::new()),
            |(s, buf), w| {
                let mut bits = 0u64;
                let start = w as u64 * 64;
                for k in 0..64u64.min(total - start) {
                    lay.decode(start + k, s);
                    if is_valid(&tables, &lay, s, buf) {
                        bits |= 1 << k;
                    }
                }
                bits
            },
        )
        .collect();
    let valid_total: u64 = valid.iter().map(|w| w.count_ones() as u64).sum();
    let test = |bits: &[u64], i: u64| bits[(i >> 6) as usize] >> (i & 63) & 1 == 1;

    let gens = generators(&lay, tables.autos.len());
    let stride = opts.scan_stride.unwrap_or(1);
    if num_integer::gcd(stride, total.max(1)) != 1 {
        return Err(Error::InvalidMove(format!(
            "scan stride {stride} is not coprime to {total}"
        )));
    }
    let mut visited = vec![0u64; words];
    let mut labels = opts.keep_labels.then(|| vec![u32::MAX; total as usize]);
    let mut orbits: Vec<(u64, u64)> = Vec::new(); // (least index, size)
    let mut queue: Vec<u32> = Vec::new();
    let mut s = vec![0u32; slots];
    let mut tmp = vec![0u32; slots];
    for k in 0..total {
        let start = ((k as u128 * stride as u128) % total as u128) as u64;
        if !test(&valid, start) || test(&visited, start) {
            continue;
        }
        let label = orbits.len() as u32;
        visited[(start >> 6) as usize] |= 1 << (start & 63);
        queue.clear();
        queue.push(start as u32);
        let mut head = 0;
        let mut least = start;
        while head < queue.len() {
            let idx = queue[head] as u64;
            head += 1;
            least = least.min(idx);
            if let Some(l) = labels.as_mut() {
                l[idx as usize] = label;
            }
            lay.decode(idx, &mut s);
            for &gen in &gens {
                let nb = neighbor(&tables, &lay, idx, &s, gen, &mut tmp);
                if !test(&visited, nb) {
                    debug_assert!(test(&valid, nb), "move left the valid set");
                    visited[(nb >> 6) as usize] |= 1 << (nb & 63);
                    queue.push(nb as u32);
                }
            }
        }
        orbits.push((least, queue.len() as u64));
    }

    // relabel orbits by ascending representative
    let mut order: Vec<usize> = (0..orbits.len()).collect();
    order.sort_by_key(|&i| orbits[i].0);
    let mut rank = vec![0u32; orbits.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new as u32;
    }
    if let Some(l) = labels.as_mut() {
        for x in l.iter_mut().filter(|x| **x != u32::MAX) {
            *x = rank[*x as usize];
        }
    }
    let representatives = order
        .iter()
        .map(|&i| {
            lay.decode(orbits[i].0, &mut s);
            let elems = s.iter().map(|&x| g.element_at(x as usize)).collect();
            GeneratingVector::from_slots(g, sig, elems)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleResult {
        count: orbits.len(),
        representatives,
        orbit_sizes: order.iter().map(|&i| orbits[i].1).collect(),
        valid_total,
        labels,
        radix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_genus_one() {
        let g = AbelianGroup::elementary(3, 1).unwrap();
        let res = orbit_classes_oracle(&g, &Signature::unramified(1), &OracleOptions::default()).unwrap();
        assert_eq!(res.count, 1);
        assert_eq!(res.valid_total, 8);
    }
}
