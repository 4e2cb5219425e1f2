//! Permutations of small degree, subgroup closure, and conjugacy classes of
//! subgroups of the symmetric group.
//!
//! Products compose left to right: `(a * b)(i) = b(a(i))`. With this
//! convention the permutation matrix with rows `E_{a(1)}, .., E_{a(r)}` is a
//! homomorphism, `pi(a * b) = pi(a) pi(b)`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::factorial;
use crate::error::{Error, Result};
use crate::linalg::FpMatrix;

/// Largest degree accepted by closure and normalizer computations.
pub const MAX_DEGREE: usize = 6;
/// Largest degree for which all subgroup classes are enumerated.
pub const MAX_CLASS_DEGREE: usize = 5;

/// A permutation of `{0, .., r-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::InvalidElement(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from disjoint cycles written with 1-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &pt) in cycle.iter().enumerate() {
                if pt == 0 || pt > degree || touched[pt - 1] {
                    return Err(Error::InvalidElement(format!(
                        "bad cycle {cycle:?} for degree {degree}"
                    )));
                }
                touched[pt - 1] = true;
                images[pt - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        Ok(Perm { images })
    }

    /// Parses cycle notation such as `(1 2)(3 4)`; `()` is the identity.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for chunk in text.split('(').skip(1) {
            let body = chunk
                .split(')')
                .next()
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?;
            let pts = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if !pts.is_empty() {
                cycles.push(pts);
            }
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Self::from_cycles(degree, &refs)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// Left-to-right product: apply `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degrees differ");
        Perm {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Perm { images: inv }
    }

    /// `alpha * self * alpha^-1`, which maps `i` to `alpha^-1(self(alpha(i)))`.
    pub fn conjugate_by(&self, alpha: &Perm) -> Perm {
        alpha.then(self).then(&alpha.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn order(&self) -> usize {
        let mut acc = self.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.then(self);
            k += 1;
        }
        k
    }

    /// Non-trivial cycles with 0-based points, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Permutation matrix with rows `E_{alpha(1)}, .., E_{alpha(r)}`.
    pub fn matrix(&self, p: u64) -> FpMatrix {
        perm_matrix(self, p)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Permutation matrix whose entry `(i, alpha(i))` is one.
pub fn perm_matrix(alpha: &Perm, p: u64) -> FpMatrix {
    let r = alpha.degree();
    let mut m = FpMatrix::zeros(r, r, p);
    for i in 0..r {
        m.set(i, alpha.apply(i), 1);
    }
    m
}

/// All permutations of the given degree in lexicographic order of images.
pub fn all_perms(degree: usize) -> Vec<Perm> {
    let mut out = Vec::with_capacity(factorial(degree) as usize);
    let mut cur: Vec<usize> = (0..degree).collect();
    loop {
        out.push(Perm { images: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..degree).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..degree).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// A subgroup of `Sym(r)` stored by its sorted element list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermSubgroup {
    degree: usize,
    elements: Vec<Perm>,
    generators: Vec<Perm>,
}

/// Smallest subgroup of `Sym(degree)` containing `gens`.
pub fn closure(degree: usize, gens: &[Perm]) -> Result<PermSubgroup> {
    if degree > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree,
            max: MAX_DEGREE,
        });
    }
    if gens.iter().any(|g| g.degree() != degree) {
        return Err(Error::MixedDegrees);
    }
    let mut set: BTreeSet<Perm> = BTreeSet::new();
    let id = Perm::identity(degree);
    set.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.then(g);
            if set.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(PermSubgroup {
        degree,
        elements: set.into_iter().collect(),
        generators: gens.iter().filter(|g| !g.is_identity()).cloned().collect(),
    })
}

impl PermSubgroup {
    pub fn trivial(degree: usize) -> Self {
        PermSubgroup {
            degree,
            elements: vec![Perm::identity(degree)],
            generators: Vec::new(),
        }
    }

    pub fn symmetric(degree: usize) -> Self {
        Self::from_elements(degree, all_perms(degree))
    }

    /// Wraps a set of permutations known to be closed, choosing generators greedily.
    pub fn from_elements(degree: usize, mut elements: Vec<Perm>) -> Self {
        elements.sort();
        elements.dedup();
        let mut generators: Vec<Perm> = Vec::new();
        let mut span: BTreeSet<Perm> = BTreeSet::from([Perm::identity(degree)]);
        for e in &elements {
            if !span.contains(e) {
                generators.push(e.clone());
                span = closure(degree, &generators)
                    .expect("degree checked by caller")
                    .elements
                    .into_iter()
                    .collect();
            }
        }
        debug_assert_eq!(span.len(), elements.len(), "element set is not closed");
        PermSubgroup {
            degree,
            elements,
            generators,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn contains(&self, x: &Perm) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &PermSubgroup) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }

    /// `alpha H alpha^-1`.
    pub fn conjugate_by(&self, alpha: &Perm) -> PermSubgroup {
        let mut elements: Vec<Perm> = self.elements.iter().map(|h| h.conjugate_by(alpha)).collect();
        elements.sort();
        PermSubgroup {
            degree: self.degree,
            elements,
            generators: self.generators.iter().map(|h| h.conjugate_by(alpha)).collect(),
        }
    }

    /// Orbits of `{0, .., r-1}` under the subgroup, each sorted, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit: Vec<usize> = self.elements.iter().map(|g| g.apply(start)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &x in &orbit {
                seen[x] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// Orbit sizes in descending order, e.g. `[2, 1, 1]` for a transposition in degree 4.
    pub fn orbit_partition(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.orbits().iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// Some `alpha` with `alpha self alpha^-1 = other`, if one exists.
    pub fn conjugator_to(&self, other: &PermSubgroup) -> Option<Perm> {
        if self.degree != other.degree || self.order() != other.order() {
            return None;
        }
        all_perms(self.degree)
            .into_iter()
            .find(|a| self.generators.iter().all(|g| other.contains(&g.conjugate_by(a))))
    }

    pub fn is_conjugate_to(&self, other: &PermSubgroup) -> bool {
        self.conjugator_to(other).is_some()
    }

    /// Every subgroup of this group, each listed once.
    pub fn all_subgroups(&self) -> Vec<PermSubgroup> {
        let mut found: BTreeSet<Vec<Perm>> = BTreeSet::new();
        let mut cyclic: Vec<Vec<Perm>> = Vec::new();
        for x in &self.elements {
            let c = closure(self.degree, std::slice::from_ref(x)).expect("degree bounded");
            if found.insert(c.elements.clone()) {
                cyclic.push(c.elements);
            }
        }
        let mut frontier: Vec<Vec<Perm>> = found.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for h in &frontier {
                for c in &cyclic {
                    if c.iter().all(|x| h.binary_search(x).is_ok()) {
                        continue;
                    }
                    let mut gens: Vec<Perm> = h.clone();
                    gens.extend(c.iter().cloned());
                    let j = closure(self.degree, &gens).expect("degree bounded");
                    if found.insert(j.elements.clone()) {
                        next.push(j.elements);
                    }
                }
            }
            frontier = next;
        }
        found
            .into_iter()
            .map(|els| PermSubgroup::from_elements(self.degree, els))
            .collect()
    }
}

impl fmt::Display for PermSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(Perm::to_string).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

/// `N(H) = {alpha in Sym(r) : alpha H alpha^-1 = H}`.
pub fn normalizer_in_sym(h: &PermSubgroup) -> PermSubgroup {
    let els: Vec<Perm> = all_perms(h.degree)
        .into_iter()
        .filter(|a| h.generators.iter().all(|g| h.contains(&g.conjugate_by(a))))
        .collect();
    PermSubgroup::from_elements(h.degree, els)
}

/// One conjugacy class of subgroups of `Sym(r)`.
#[derive(Debug, Clone)]
pub struct SubgroupClass {
    pub representative: PermSubgroup,
    /// Number of subgroups conjugate to the representative.
    pub class_size: usize,
    pub orbit_partition: Vec<usize>,
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct SubgroupClassTable {
    pub degree: usize,
    pub classes: Vec<SubgroupClass>,
}

impl SubgroupClassTable {
    /// Index of the class containing `h`.
    pub fn class_of(&self, h: &PermSubgroup) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.order == h.order() && c.representative.is_conjugate_to(h))
    }

    pub fn total_subgroups(&self) -> usize {
        self.classes.iter().map(|c| c.class_size).sum()
    }
}

/// Conjugacy classes of subgroups of `Sym(r)`, sorted by order and then by the
/// lexicographically least element list among the conjugates. Any order sort
/// is compatible with containment up to conjugacy.
pub fn subgroup_classes(degree: usize) -> Result<SubgroupClassTable> {
    if degree > MAX_CLASS_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree,
            max: MAX_CLASS_DEGREE,
        });
    }
    let perms = all_perms(degree);
    let n = perms.len();
    let index: HashMap<&Perm, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mul: Vec<Vec<usize>> = perms
        .iter()
        .map(|a| perms.iter().map(|b| index[&a.then(b)]).collect())
        .collect();
    // conj[a][x] = index of a x a^-1
    let conj: Vec<Vec<usize>> = perms
        .iter()
        .map(|a| perms.iter().map(|x| index[&x.conjugate_by(a)]).collect())
        .collect();

    let close = |seed: u128| -> u128 {
        let mut set = seed | 1;
        loop {
            let mut grown = set;
            for i in (0..n).filter(|&i| set >> i & 1 == 1) {
                for j in (0..n).filter(|&j| set >> j & 1 == 1) {
                    grown |= 1u128 << mul[i][j];
                }
            }
            if grown == set {
                return set;
            }
            set = grown;
        }
    };

    let mut all: BTreeSet<u128> = BTreeSet::new();
    let cyclic: Vec<u128> = (0..n).map(|i| close(1u128 << i)).collect();
    let mut frontier: Vec<u128> = Vec::new();
    for &c in &cyclic {
        if all.insert(c) {
            frontier.push(c);
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &h in &frontier {
            for &c in &cyclic {
                if c & !h == 0 {
                    continue;
                }
                let j = close(h | c);
                if all.insert(j) {
                    next.push(j);
                }
            }
        }
        frontier = next;
    }

    let conjugate_set = |h: u128, a: usize| -> u128 {
        (0..n)
            .filter(|&i| h >> i & 1 == 1)
            .fold(0u128, |acc, i| acc | 1u128 << conj[a][i])
    };
    let element_list = |h: u128| -> Vec<usize> { (0..n).filter(|&i| h >> i & 1 == 1).collect() };

    let mut seen: BTreeSet<u128> = BTreeSet::new();
    let mut classes = Vec::new();
    for &h in &all {
        if seen.contains(&h) {
            continue;
        }
        let conjugates: BTreeSet<u128> = (0..n).map(|a| conjugate_set(h, a)).collect();
        seen.extend(conjugates.iter().copied());
        let rep = conjugates
            .iter()
            .map(|&c| element_list(c))
            .min()
            .expect("class is nonempty");
        let rep = PermSubgroup::from_elements(degree, rep.iter().map(|&i| perms[i].clone()).collect());
        classes.push(SubgroupClass {
            class_size: conjugates.len(),
            orbit_partition: rep.orbit_partition(),
            order: rep.order(),
            representative: rep,
        });
    }
    classes.sort_by(|a, b| {
        a.order
            .cmp(&b.order)
            .then_with(|| a.representative.elements.cmp(&b.representative.elements))
    });
    Ok(SubgroupClassTable { degree, classes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_round_trip() {
        let a = Perm::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(a.to_string(), "(1 2)(3 4)");
        assert_eq!(Perm::parse_cycles(4, "(1 2)(3 4)").unwrap(), a);
        assert_eq!(Perm::parse_cycles(3, "()").unwrap(), Perm::identity(3));
    }

    #[test]
    fn lex_order_of_all_perms() {
        let ps = all_perms(4);
        assert_eq!(ps.len(), 24);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }
}
