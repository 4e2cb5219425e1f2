//! Unramified (fixed-point-free) abelian actions: closed-form counts,
//! canonical representatives, and a certified normal-form reducer.
//!
//! For the reducer, the vector is read as a `t x 2 rho` integer matrix whose
//! row `i` is taken mod `n_i`. Moves act on columns symplectically and
//! automorphisms of `G` act on rows, so the reducer is an elimination that only
//! uses row operations which are automorphisms.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::abelian::{AbAutomorphism, AbElement, AbelianGroup, Signature};
use crate::arith::{divisor_count, inv_mod, is_squarefree};
use crate::error::{Error, Result};
use crate::genvec::{GeneratingVector, Move};

/// Number of admissible `K` in `[ceil(rank/2), min(rho, rank)]`, the number of
/// classes of epimorphisms of a genus-`rho` surface group onto `F_p^rank`.
/// Zero when `rank > 2 rho`; one for the trivial group.
pub fn count_elementary(rho: u64, rank: u64) -> u64 {
    if rank > 2 * rho {
        return 0;
    }
    let lo = rank.div_ceil(2);
    let hi = rho.min(rank);
    hi + 1 - lo
}

/// Same count when `n_2` is prime: one class per admissible `K`.
pub fn count_rank_r_n2_prime(rho: u64, rank: u64) -> u64 {
    count_elementary(rho, rank)
}

/// `d(n_2)` classes for rank-2 groups with squarefree `n_2`.
pub fn count_rank2_squarefree(n2: u64) -> Result<u64> {
    if n2 == 0 || !is_squarefree(n2) {
        return Err(Error::OutOfScope(format!("{n2} is not squarefree")));
    }
    Ok(divisor_count(n2))
}

/// Canonical representative for one admissible `K`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalUnramified {
    pub k: usize,
    pub vector: GeneratingVector,
}

/// `alpha_i -> omega_i` for `i <= K`, `beta_i -> omega_{i+K}` for `i <= w - K`,
/// zero elsewhere, one vector per admissible `K`. Empty when `w > 2 rho`.
pub fn canonical_reps_elementary(p: u64, w: usize, rho: usize) -> Result<Vec<CanonicalUnramified>> {
    let g = AbelianGroup::elementary(p, w)?;
    let sig = Signature::unramified(rho as u64);
    if w > 2 * rho {
        return Ok(Vec::new());
    }
    let lo = w.div_ceil(2);
    let hi = rho.min(w);
    (lo..=hi)
        .map(|k| {
            let a = (0..rho)
                .map(|i| if i < k { g.generator(i) } else { g.zero() })
                .collect();
            let b = (0..rho)
                .map(|i| if i + k < w { g.generator(i + k) } else { g.zero() })
                .collect();
            Ok(CanonicalUnramified {
                k,
                vector: GeneratingVector::new(g.clone(), sig.clone(), a, b, Vec::new())?,
            })
        })
        .collect()
}

/// One step of a reduction word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionStep {
    Move(Move),
    Automorphism(AbAutomorphism),
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionStep::Move(m) => write!(f, "{m}"),
            ReductionStep::Automorphism(a) => {
                let imgs: Vec<String> = a.images().iter().map(|x| x.to_string()).collect();
                write!(f, "aut[{}]", imgs.join(" "))
            }
        }
    }
}

/// A normal form together with the word that produced it.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub input: GeneratingVector,
    pub output: GeneratingVector,
    pub word: Vec<ReductionStep>,
}

impl Reduction {
    /// Replays the word on the input; `Ok(true)` when it lands on the output.
    pub fn certify(&self) -> Result<bool> {
        Ok(replay(&self.input, &self.word)? == self.output)
    }
}

pub fn replay(gv: &GeneratingVector, word: &[ReductionStep]) -> Result<GeneratingVector> {
    word.iter().try_fold(gv.clone(), |cur, step| match step {
        ReductionStep::Move(m) => cur.apply_move(*m),
        ReductionStep::Automorphism(a) => Ok(cur.apply_automorphism(a)),
    })
}

/// Mutable reduction state: the current vector and the word so far.
struct Reducer {
    g: AbelianGroup,
    cur: GeneratingVector,
    word: Vec<ReductionStep>,
}

impl Reducer {
    fn mv(&mut self, m: Move) -> Result<()> {
        let trivial = matches!(m, Move::A { k: 0, .. } | Move::B { k: 0, .. } | Move::Z { k: 0, .. });
        if !trivial {
            self.cur = self.cur.apply_move(m)?;
            self.word.push(ReductionStep::Move(m));
        }
        Ok(())
    }

    fn aut(&mut self, theta: AbAutomorphism) {
        if theta != AbAutomorphism::identity(&self.g) {
            self.cur = self.cur.apply_automorphism(&theta);
            self.word.push(ReductionStep::Automorphism(theta));
        }
    }

    /// Coordinate `row` of `A_i`.
    fn a(&self, i: usize, row: usize) -> u64 {
        self.cur.hyperbolic_a()[i].0[row]
    }

    fn b(&self, i: usize, row: usize) -> u64 {
        self.cur.hyperbolic_b()[i].0[row]
    }

    /// Transposition of hyperbolic pairs `x < y` as adjacent swaps.
    fn swap_pairs(&mut self, x: usize, y: usize) -> Result<()> {
        let (x, y) = (x.min(y), x.max(y));
        if x == y {
            return Ok(());
        }
        for i in x..y {
            self.mv(Move::S { i })?;
        }
        for i in (x..y - 1).rev() {
            self.mv(Move::S { i })?;
        }
        Ok(())
    }

    /// `A_i += c A_j`, `B_j -= c B_i`.
    fn x_op(&mut self, i: usize, j: usize, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        if j == i + 1 {
            return self.mv(Move::Z { i, k: c });
        }
        if i == j + 1 {
            self.mv(Move::S { i: j })?;
            self.mv(Move::Z { i: j, k: c })?;
            return self.mv(Move::S { i: j });
        }
        // bring pair i to slot 0 and pair j to slot 1
        self.swap_pairs(0, i)?;
        let pos_j = if j == 0 { i } else { j };
        self.swap_pairs(1, pos_j)?;
        self.mv(Move::Z { i: 0, k: c })?;
        self.swap_pairs(1, pos_j)?;
        self.swap_pairs(0, i)
    }

    /// `A_i += c B_j`, `A_j += c B_i`.
    fn y_op(&mut self, i: usize, j: usize, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        self.mv(Move::R { i: j })?;
        self.x_op(i, j, c)?;
        for _ in 0..3 {
            self.mv(Move::R { i: j })?;
        }
        Ok(())
    }

    /// `B_i += c A_j`, `B_j += c A_i`.
    fn w_op(&mut self, i: usize, j: usize, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        self.mv(Move::R { i })?;
        self.mv(Move::R { i: j })?;
        self.y_op(i, j, -c)?;
        for _ in 0..3 {
            self.mv(Move::R { i })?;
            self.mv(Move::R { i: j })?;
        }
        Ok(())
    }

    /// Automorphism `omega_k -> omega_k + x` (identity on other generators).
    fn shift(&mut self, k: usize, x: &AbElement) -> Result<()> {
        let g = &self.g;
        let mut images: Vec<AbElement> = (0..g.rank()).map(|i| g.generator(i)).collect();
        images[k] = g.add(&images[k], x);
        let theta = AbAutomorphism::new(g, images)?;
        self.aut(theta);
        Ok(())
    }

    /// Automorphism `omega_k -> u omega_k`, so row `k` is multiplied by `u`.
    fn scale_row(&mut self, k: usize, u: u64) -> Result<()> {
        let g = &self.g;
        let mut images: Vec<AbElement> = (0..g.rank()).map(|i| g.generator(i)).collect();
        images[k] = g.scale(u as i64, &images[k]);
        let theta = AbAutomorphism::new(g, images)?;
        self.aut(theta);
        Ok(())
    }

    /// Restores `A_i = omega_i` when `A_i - omega_i` has no `omega_i` part.
    fn restore_a(&mut self, i: usize) -> Result<()> {
        let g = self.g.clone();
        let diff = g.sub(&self.cur.hyperbolic_a()[i], &g.generator(i));
        if diff.0[i] != 0 {
            return Err(Error::PipelineInconsistency(format!(
                "cannot restore A_{} from {}",
                i + 1,
                self.cur.hyperbolic_a()[i]
            )));
        }
        self.shift(i, &g.neg(&diff))
    }

    /// Euclid on row `row` inside pair `j` until `B_j[row] = 0`.
    fn pair_euclid(&mut self, j: usize, row: usize) -> Result<()> {
        loop {
            let (a, b) = (self.a(j, row), self.b(j, row));
            if b == 0 {
                return Ok(());
            }
            if a == 0 {
                return self.mv(Move::R { i: j });
            }
            if b >= a {
                self.mv(Move::A {
                    i: j,
                    k: -((b / a) as i64),
                })?;
            } else {
                self.mv(Move::B {
                    i: j,
                    k: -((a / b) as i64),
                })?;
            }
        }
    }

    /// Euclid between `A_k[row]` and `A_j[row]` until `A_j[row] = 0`.
    fn cross_euclid(&mut self, k: usize, j: usize, row: usize) -> Result<()> {
        loop {
            let (a, b) = (self.a(k, row), self.a(j, row));
            if b == 0 {
                return Ok(());
            }
            if a == 0 {
                return self.swap_pairs(k, j);
            }
            if b >= a {
                self.x_op(j, k, -((b / a) as i64))?;
            } else {
                self.x_op(k, j, -((a / b) as i64))?;
            }
        }
    }
}

/// Lexicographically least `(c_1..c_s)` in `[0, n)^s` with
/// `gcd(base + sum c_i x_i, n) = 1`.
fn unit_combination(base: u64, xs: &[u64], n: u64) -> Option<Vec<u64>> {
    let s = xs.len();
    let mut c = vec![0u64; s];
    loop {
        let v = xs.iter().zip(&c).fold(base % n, |acc, (&x, &ci)| (acc + x * ci) % n);
        if v.gcd(&n) == 1 {
            return Some(c);
        }
        let mut pos = s;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            c[pos] += 1;
            if c[pos] < n {
                break;
            }
            c[pos] = 0;
        }
    }
}

/// Reduces an unramified vector to the normal form checked by [`is_normal_form`].
///
/// With `t = rank(G)`: stage `k <= min(t, rho)` makes `A_k = omega_k` and
/// clears row `k` from all later pairs; if `t > rho`, stage `k > rho` makes
/// `B_p` (with `p = 2 rho - k + 1`) the pivot of row `k`.
pub fn reduce_abelian(gv: &GeneratingVector) -> Result<Reduction> {
    if gv.branch_count() != 0 {
        return Err(Error::OutOfScope("reduce_abelian needs an unramified vector".into()));
    }
    if !gv.is_valid() {
        return Err(Error::InvalidElement(format!("{gv} is not a generating vector")));
    }
    let g = gv.group().clone();
    let t = g.rank();
    let rho = gv.orbit_genus();
    let n = g.factors().to_vec();
    let mut st = Reducer {
        g: g.clone(),
        cur: gv.clone(),
        word: Vec::new(),
    };

    for k in 0..t.min(rho) {
        let nk = n[k];
        for j in k..rho {
            st.pair_euclid(j, k)?;
        }
        for j in k + 1..rho {
            st.cross_euclid(k, j, k)?;
        }
        // make A_k[k] a unit using earlier B's
        let earlier: Vec<u64> = (0..k).map(|i| st.b(i, k)).collect();
        let coeffs = unit_combination(st.a(k, k), &earlier, nk)
            .ok_or_else(|| Error::PipelineInconsistency(format!("row {} is not generated", k + 1)))?;
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                st.y_op(k, i, c as i64)?;
                st.restore_a(i)?;
            }
        }
        for j in 0..k {
            let y = st.a(k, j);
            st.x_op(k, j, -(y as i64))?;
        }
        let u = st.a(k, k);
        st.scale_row(k, inv_mod(u, nk).expect("unit"))?;
        let b = st.b(k, k);
        st.mv(Move::A { i: k, k: -(b as i64) })?;
        st.restore_a(k)?;
        // a unit superdiagonal entry is normalized to 1
        if k > 0 {
            let nsup = st.b(k - 1, k);
            if nsup != 0 && nsup != 1 && nsup.gcd(&nk) == 1 {
                st.scale_row(k, inv_mod(nsup, nk).expect("unit"))?;
                let c = (nk + 1 - st.a(k, k)) % nk;
                st.y_op(k, k - 1, c as i64)?;
                st.restore_a(k - 1)?;
                st.restore_a(k)?;
            }
        }
    }

    for k in rho..t {
        let nk = n[k];
        let p = 2 * rho - k - 1;
        let lower: Vec<u64> = (0..p).map(|i| st.b(i, k)).collect();
        let coeffs = unit_combination(st.b(p, k), &lower, nk)
            .ok_or_else(|| Error::PipelineInconsistency(format!("row {} is not generated", k + 1)))?;
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                st.x_op(i, p, -(c as i64))?;
                st.restore_a(i)?;
            }
        }
        let y = st.b(p, p);
        st.mv(Move::A { i: p, k: -(y as i64) })?;
        for j in 0..p {
            let y = st.b(p, j);
            st.w_op(p, j, -(y as i64))?;
        }
        let u = st.b(p, k);
        st.scale_row(k, inv_mod(u, nk).expect("unit"))?;
        let tail = g.element(
            &(0..t)
                .map(|l| if l > k { -(st.b(p, l) as i64) } else { 0 })
                .collect::<Vec<_>>(),
        )?;
        st.shift(k, &tail)?;
    }

    let out = Reduction {
        input: gv.clone(),
        output: st.cur,
        word: st.word,
    };
    if !is_normal_form(&out.output) {
        return Err(Error::PipelineInconsistency(format!(
            "reduction of {gv} ended at {} which is not in normal form",
            out.output
        )));
    }
    Ok(out)
}

/// Shape of the unramified normal form plus the superdiagonal side condition:
/// `N_{i,i+1}` is either `1` or shares a factor with `n_{i+1}`.
pub fn is_normal_form(gv: &GeneratingVector) -> bool {
    if gv.branch_count() != 0 {
        return false;
    }
    let g = gv.group();
    let t = g.rank();
    let rho = gv.orbit_genus();
    let n = g.factors();
    let a = gv.hyperbolic_a();
    let b = gv.hyperbolic_b();
    if t > 2 * rho {
        return false;
    }
    for i in 0..rho {
        let want = if i < t { g.generator(i) } else { g.zero() };
        if a[i] != want {
            return false;
        }
    }
    let pivots_from = if t > rho { 2 * rho - t } else { rho };
    for i in 0..rho {
        let row = &b[i].0;
        if i < pivots_from {
            // B_i in the span of omega_{i+1}, ..
            if row[..(i + 1).min(t)].iter().any(|&x| x != 0) {
                return false;
            }
        } else {
            let pivot = 2 * rho - i - 1;
            if row[..=i].iter().any(|&x| x != 0) || row[pivot] != 1 {
                return false;
            }
            if row[pivot + 1..].iter().any(|&x| x != 0) {
                return false;
            }
        }
    }
    let checked = if t > rho {
        pivots_from.saturating_sub(1)
    } else {
        t.saturating_sub(1)
    };
    (0..checked).all(|i| {
        let sup = b[i].0[i + 1];
        sup == 1 || sup.gcd(&n[i + 1]) > 1
    })
}

/// Every vector in normal form for `(G, rho)` that generates `G`: an upper
/// bound for the number of classes, tightened by cup separation or the oracle.
pub fn normal_form_candidates(g: &AbelianGroup, rho: usize) -> Result<Vec<GeneratingVector>> {
    let t = g.rank();
    if t > 2 * rho {
        return Ok(Vec::new());
    }
    let sig = Signature::unramified(rho as u64);
    let pivots_from = if t > rho { 2 * rho - t } else { rho };
    // free coordinates of each B_i: (i, row)
    let mut free: Vec<(usize, usize)> = Vec::new();
    for i in 0..rho.min(t) {
        let top = if i < pivots_from { t } else { 2 * rho - i - 1 };
        for row in i + 1..top {
            free.push((i, row));
        }
    }
    let radices: Vec<u64> = free.iter().map(|&(_, row)| g.factors()[row]).collect();
    let total: u128 = radices.iter().map(|&r| r as u128).product();
    if total > crate::genvec::ORACLE_CEILING {
        return Err(Error::ceiling(
            "normal-form candidates",
            total,
            crate::genvec::ORACLE_CEILING,
        ));
    }
    let a: Vec<AbElement> = (0..rho)
        .map(|i| if i < t { g.generator(i) } else { g.zero() })
        .collect();
    let mut out = Vec::new();
    for mut idx in 0..total as u64 {
        let mut b: Vec<Vec<i64>> = vec![vec![0; t]; rho];
        for i in pivots_from..rho.min(t) {
            b[i][2 * rho - i - 1] = 1;
        }
        for (&(i, row), &rad) in free.iter().zip(&radices).rev() {
            b[i][row] = (idx % rad) as i64;
            idx /= rad;
        }
        let b = b.iter().map(|x| g.element(x)).collect::<Result<Vec<_>>>()?;
        let gv = GeneratingVector::new(g.clone(), sig.clone(), a.clone(), b, Vec::new())?;
        if gv.is_valid() && is_normal_form(&gv) {
            out.push(gv);
        }
    }
    Ok(out)
}

/// One entry of the genus-65 catalogue of unramified abelian actions.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogueEntry {
    pub invariant_factors: Vec<u64>,
    pub orbit_genus: u64,
    pub genus: u64,
    /// Class count stated by the source classification.
    pub published_classes: u64,
}

/// Rank-2 and rank-3 groups not covered by the closed-form counts, up to genus 65.
pub fn genus65_catalogue() -> Vec<CatalogueEntry> {
    let entry = |f: &[u64], rho: u64, classes: u64| {
        let order: u64 = f.iter().product();
        CatalogueEntry {
            invariant_factors: f.to_vec(),
            orbit_genus: rho,
            genus: 1 + order * (rho - 1),
            published_classes: classes,
        }
    };
    vec![
        entry(&[4, 4], 2, 3),
        entry(&[8, 4], 2, 3),
        entry(&[12, 4], 2, 3),
        entry(&[4, 4, 2], 2, 3),
    ]
}
