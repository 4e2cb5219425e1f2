//! Abelian generating vectors, the abelianized mapping-class moves, the cup
//! invariant, and a brute-force orbit oracle.

mod oracle;

pub use oracle::{orbit_classes_oracle, OracleOptions, OracleResult, ORACLE_CEILING};

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::abelian::{
    enumerate_automorphisms, tensor_square, AbAutomorphism, AbElement, AbelianGroup, Signature, TensorSquareElement,
};
use crate::error::{Error, Result};

/// `(A_1..A_rho, B_1..B_rho, C_1..C_r)` over an abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GeneratingVector {
    group: AbelianGroup,
    signature: Signature,
    a: Vec<AbElement>,
    b: Vec<AbElement>,
    c: Vec<AbElement>,
}

/// Which of the defining conditions a candidate vector violates.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidityReport {
    /// Elliptic positions `j` (0-based) whose element order differs from `m_j`.
    pub order_mismatches: Vec<usize>,
    pub elliptic_sum_nonzero: bool,
    pub not_surjective: bool,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.order_mismatches.is_empty() && !self.elliptic_sum_nonzero && !self.not_surjective
    }
}

/// Abelianized generators of `Aut(Gamma)`; indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    /// `B_i += k A_i`
    A { i: usize, k: i64 },
    /// `A_i += k B_i`
    B { i: usize, k: i64 },
    /// `A_i += k A_{i+1}` and `B_{i+1} -= k B_i`
    Z { i: usize, k: i64 },
    /// `(A_i, B_i) -> (B_i, -A_i)`
    R { i: usize },
    /// Swap the pairs `i` and `i+1`.
    S { i: usize },
    /// Swap `C_j` and `C_{j+1}`; requires `m_j = m_{j+1}`.
    T { j: usize },
    /// `B_i += k C_j`
    U { i: usize, j: usize, k: i64 },
    /// `A_i += k C_j`
    V { i: usize, j: usize, k: i64 },
}

impl Move {
    /// A word whose product undoes this move.
    pub fn inverse_word(self) -> Vec<Move> {
        match self {
            Move::A { i, k } => vec![Move::A { i, k: -k }],
            Move::B { i, k } => vec![Move::B { i, k: -k }],
            Move::Z { i, k } => vec![Move::Z { i, k: -k }],
            Move::R { i } => vec![Move::R { i }; 3],
            Move::S { i } => vec![Move::S { i }],
            Move::T { j } => vec![Move::T { j }],
            Move::U { i, j, k } => vec![Move::U { i, j, k: -k }],
            Move::V { i, j, k } => vec![Move::V { i, j, k: -k }],
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::A { i, k } => write!(f, "A{}^{k}", i + 1),
            Move::B { i, k } => write!(f, "B{}^{k}", i + 1),
            Move::Z { i, k } => write!(f, "Z{}^{k}", i + 1),
            Move::R { i } => write!(f, "R{}", i + 1),
            Move::S { i } => write!(f, "S{}", i + 1),
            Move::T { j } => write!(f, "T{}", j + 1),
            Move::U { i, j, k } => write!(f, "U{},{}^{k}", i + 1, j + 1),
            Move::V { i, j, k } => write!(f, "V{},{}^{k}", i + 1, j + 1),
        }
    }
}

impl GeneratingVector {
    /// Checks shapes and membership only; see [`GeneratingVector::validate`].
    pub fn new(
        group: AbelianGroup,
        signature: Signature,
        a: Vec<AbElement>,
        b: Vec<AbElement>,
        c: Vec<AbElement>,
    ) -> Result<Self> {
        let rho = signature.orbit_genus as usize;
        if a.len() != rho || b.len() != rho || c.len() != signature.branch_count() {
            return Err(Error::ShapeMismatch(format!(
                "signature {signature} needs {rho} A's, {rho} B's and {} C's; got {}, {}, {}",
                signature.branch_count(),
                a.len(),
                b.len(),
                c.len()
            )));
        }
        if let Some(x) = a.iter().chain(&b).chain(&c).find(|x| !group.contains(x)) {
            return Err(Error::InvalidElement(format!("{x} is not an element of {group}")));
        }
        Ok(GeneratingVector {
            group,
            signature,
            a,
            b,
            c,
        })
    }

    /// Builds from signed coordinate lists, reducing into the group.
    pub fn from_coords(
        group: &AbelianGroup,
        signature: &Signature,
        a: &[&[i64]],
        b: &[&[i64]],
        c: &[&[i64]],
    ) -> Result<Self> {
        let conv = |xs: &[&[i64]]| -> Result<Vec<AbElement>> { xs.iter().map(|x| group.element(x)).collect() };
        Self::new(group.clone(), signature.clone(), conv(a)?, conv(b)?, conv(c)?)
    }

    /// Builds from the flat slot list `A_1..A_rho, B_1..B_rho, C_1..C_r`.
    pub fn from_slots(group: &AbelianGroup, signature: &Signature, slots: Vec<AbElement>) -> Result<Self> {
        let rho = signature.orbit_genus as usize;
        if slots.len() != 2 * rho + signature.branch_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} slots for signature {signature}",
                slots.len()
            )));
        }
        let mut it = slots.into_iter();
        let a = it.by_ref().take(rho).collect();
        let b = it.by_ref().take(rho).collect();
        let c = it.collect();
        Self::new(group.clone(), signature.clone(), a, b, c)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn hyperbolic_a(&self) -> &[AbElement] {
        &self.a
    }

    pub fn hyperbolic_b(&self) -> &[AbElement] {
        &self.b
    }

    pub fn elliptic(&self) -> &[AbElement] {
        &self.c
    }

    pub fn orbit_genus(&self) -> usize {
        self.a.len()
    }

    pub fn branch_count(&self) -> usize {
        self.c.len()
    }

    /// Slots in the fixed order `A_1..A_rho, B_1..B_rho, C_1..C_r`.
    pub fn slots(&self) -> Vec<AbElement> {
        self.a.iter().chain(&self.b).chain(&self.c).cloned().collect()
    }

    pub fn validate(&self) -> ValidityReport {
        let g = &self.group;
        let order_mismatches = self
            .c
            .iter()
            .zip(&self.signature.periods)
            .enumerate()
            .filter(|(_, (x, &m))| g.element_order(x) != m)
            .map(|(j, _)| j)
            .collect();
        let elliptic_sum_nonzero = g.sum(&self.c) != g.zero();
        let slots = self.slots();
        ValidityReport {
            order_mismatches,
            elliptic_sum_nonzero,
            not_surjective: !g.generates(&slots),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    pub fn apply_move(&self, m: Move) -> Result<GeneratingVector> {
        let rho = self.orbit_genus();
        let r = self.branch_count();
        let g = &self.group;
        let bad = |what: String| Err(Error::InvalidMove(what));
        let mut out = self.clone();
        match m {
            Move::A { i, k } if i < rho => out.b[i] = g.add(&self.b[i], &g.scale(k, &self.a[i])),
            Move::B { i, k } if i < rho => out.a[i] = g.add(&self.a[i], &g.scale(k, &self.b[i])),
            Move::Z { i, k } if i + 1 < rho => {
                out.a[i] = g.add(&self.a[i], &g.scale(k, &self.a[i + 1]));
                out.b[i + 1] = g.sub(&self.b[i + 1], &g.scale(k, &self.b[i]));
            }
            Move::R { i } if i < rho => {
                out.a[i] = self.b[i].clone();
                out.b[i] = g.neg(&self.a[i]);
            }
            Move::S { i } if i + 1 < rho => {
                out.a.swap(i, i + 1);
                out.b.swap(i, i + 1);
            }
            Move::T { j } if j + 1 < r => {
                if self.signature.periods[j] != self.signature.periods[j + 1] {
                    return bad(format!(
                        "{m} swaps branch points of periods {} and {}",
                        self.signature.periods[j],
                        self.signature.periods[j + 1]
                    ));
                }
                out.c.swap(j, j + 1);
            }
            Move::U { i, j, k } if i < rho && j < r => {
                out.b[i] = g.add(&self.b[i], &g.scale(k, &self.c[j]));
            }
            Move::V { i, j, k } if i < rho && j < r => {
                out.a[i] = g.add(&self.a[i], &g.scale(k, &self.c[j]));
            }
            _ => return bad(format!("{m} is out of range for rho={rho}, r={r}")),
        }
        Ok(out)
    }

    pub fn apply_word(&self, word: &[Move]) -> Result<GeneratingVector> {
        word.iter().try_fold(self.clone(), |gv, &m| gv.apply_move(m))
    }

    /// Post-composition with an automorphism of `G`.
    pub fn apply_automorphism(&self, theta: &AbAutomorphism) -> GeneratingVector {
        let g = &self.group;
        let map = |xs: &[AbElement]| xs.iter().map(|x| theta.apply(g, x)).collect();
        GeneratingVector {
            group: g.clone(),
            signature: self.signature.clone(),
            a: map(&self.a),
            b: map(&self.b),
            c: map(&self.c),
        }
    }

    /// Replaces every slot by an arbitrary element, keeping group and signature.
    pub fn with_slots(&self, slots: Vec<AbElement>) -> Result<GeneratingVector> {
        Self::from_slots(&self.group, &self.signature, slots)
    }

    /// Permutes the elliptic slots; allowed whenever periods are preserved.
    pub fn permute_elliptic(&self, order: &[usize]) -> Result<GeneratingVector> {
        let periods = &self.signature.periods;
        let mut seen = vec![false; self.c.len()];
        if order.len() != self.c.len()
            || order
                .iter()
                .any(|&j| j >= seen.len() || std::mem::replace(&mut seen[j], true))
        {
            return Err(Error::InvalidMove(format!("{order:?} is not a permutation")));
        }
        if order.iter().enumerate().any(|(pos, &j)| periods[pos] != periods[j]) {
            return Err(Error::InvalidMove("elliptic permutation changes periods".into()));
        }
        let mut out = self.clone();
        out.c = order.iter().map(|&j| self.c[j].clone()).collect();
        Ok(out)
    }
}

impl fmt::Display for GeneratingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |xs: &[AbElement]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        write!(
            f,
            "{} {}: A=[{}] B=[{}] C=[{}]",
            self.group,
            self.signature,
            show(&self.a),
            show(&self.b),
            show(&self.c)
        )
    }
}

/// `sum_i (A_i (x) B_i - B_i (x) A_i)`.
pub fn cup_invariant(gv: &GeneratingVector) -> TensorSquareElement {
    let g = &gv.group;
    gv.a.iter()
        .zip(&gv.b)
        .fold(TensorSquareElement::zero(g), |acc, (x, y)| {
            acc.add(&tensor_square(g, x, y)).sub(&tensor_square(g, y, x))
        })
}

/// The subgroup `G (x) G^e + G^e (x) G` of the tensor square, where `G^e` is
/// spanned by the elliptic images. Sorted.
pub fn elliptic_tensor_subgroup(gv: &GeneratingVector) -> Vec<TensorSquareElement> {
    let g = &gv.group;
    let mut gens = Vec::new();
    for i in 0..g.rank() {
        let w = g.generator(i);
        for c in &gv.c {
            gens.push(tensor_square(g, &w, c));
            gens.push(tensor_square(g, c, &w));
        }
    }
    let zero = TensorSquareElement::zero(g);
    let mut seen = BTreeSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for s in &gens {
            let y = x.add(s);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// The cup invariant reduced modulo the elliptic tensor subgroup, given by
/// the least element of its coset. Equals the plain cup when `r = 0`.
///
/// The elliptic moves shift the plain cup by `k (A_i (x) C_j - C_j (x) A_i)`,
/// which lies in that subgroup, so only the reduced class is move-invariant.
pub fn reduced_cup(gv: &GeneratingVector) -> TensorSquareElement {
    let cup = cup_invariant(gv);
    if gv.c.is_empty() {
        return cup;
    }
    elliptic_tensor_subgroup(gv)
        .iter()
        .map(|e| cup.add(e))
        .min()
        .expect("subgroup contains zero")
}

/// Whether some automorphism `theta` carries the cup class of `gv1` onto that
/// of `gv2` under `theta (x) theta`. A `false` answer proves the vectors lie in
/// different orbits.
pub fn cup_equivalent_mod_aut(gv1: &GeneratingVector, gv2: &GeneratingVector, ceiling: u128) -> Result<bool> {
    if gv1.group != gv2.group {
        return Err(Error::InvalidGroup("vectors over different groups".into()));
    }
    let g = &gv1.group;
    let cup1 = cup_invariant(gv1);
    let cup2 = cup_invariant(gv2);
    let autos = enumerate_automorphisms(g, ceiling)?;
    if gv1.c.is_empty() && gv2.c.is_empty() {
        return Ok(autos.iter().any(|t| cup1.apply_automorphism(g, t) == cup2));
    }
    let sub2: BTreeSet<TensorSquareElement> = elliptic_tensor_subgroup(gv2).into_iter().collect();
    Ok(autos
        .iter()
        .any(|t| sub2.contains(&cup1.apply_automorphism(g, t).sub(&cup2))))
}
