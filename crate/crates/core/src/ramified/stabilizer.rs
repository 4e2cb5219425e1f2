//! Point stabilizers in `GL(v, p) x Sym(r)` and their conjugacy classes.
//!
//! A subgroup fixing a point projects injectively to `Sym(r)`, so it is a pair
//! `(H', q)` with `q : H' -> GL(v, p)` a homomorphism. Membership of `X` in the
//! fixed set is the linear condition `q(a) X = X pi_a`, which keeps every
//! question here inside `F_p`-linear algebra: fixed sets, dominance, orbit
//! conditions and equivalence `q ~ q^a` are all decided on solution spaces.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::omega::{is_valid_point, rref_points};
use super::space::{small_rank, LinearSpace};
use super::{ActionElement, OmegaMatrix};
use crate::error::{Error, Result};
use crate::linalg::{enumerate_gl, gl_order, FpMatrix};
use crate::perm::{all_perms, normalizer_in_sym, subgroup_classes, Perm, PermSubgroup};

/// A subgroup `{(q(a), a) : a in H'}` of `GL(v, p) x Sym(r)`.
#[derive(Debug, Clone)]
pub struct SubgroupRecord {
    subgroup: PermSubgroup,
    q: BTreeMap<Perm, FpMatrix>,
    v: usize,
    p: u64,
}

impl PartialEq for SubgroupRecord {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for SubgroupRecord {}

/// Conjugation invariants: order and the multiset of
/// (cycle type of `a`, trace of `q(a)`, dimension fixed by `q(a)`).
type Fingerprint = (usize, Vec<(Vec<usize>, u64, usize)>);

impl SubgroupRecord {
    /// Builds the table of `q` from generator images, failing when the
    /// assignment does not extend to a homomorphism.
    pub fn from_generators(r: usize, v: usize, p: u64, gens: &[(Perm, FpMatrix)]) -> Result<Self> {
        for (a, m) in gens {
            if a.degree() != r || m.rows() != v || m.cols() != v || m.modulus() != p || !m.is_invertible() {
                return Err(Error::InvalidElement(format!("bad generator image for {a}")));
            }
        }
        let mut q: BTreeMap<Perm, FpMatrix> = BTreeMap::new();
        q.insert(Perm::identity(r), FpMatrix::identity(v, p));
        let mut queue = VecDeque::from([Perm::identity(r)]);
        while let Some(e) = queue.pop_front() {
            let qe = q[&e].clone();
            for (a, m) in gens {
                let next = e.then(a);
                let image = qe.mul(m);
                match q.get(&next) {
                    Some(existing) if *existing != image => {
                        return Err(Error::InvalidElement(
                            "generator images do not define a homomorphism".into(),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        q.insert(next.clone(), image);
                        queue.push_back(next);
                    }
                }
            }
        }
        let elements: Vec<Perm> = q.keys().cloned().collect();
        let subgroup = PermSubgroup::from_elements(r, elements);
        Ok(SubgroupRecord { subgroup, q, v, p })
    }

    pub fn trivial(v: usize, r: usize, p: u64) -> Self {
        SubgroupRecord {
            subgroup: PermSubgroup::trivial(r),
            q: BTreeMap::from([(Perm::identity(r), FpMatrix::identity(v, p))]),
            v,
            p,
        }
    }

    fn from_table(r: usize, v: usize, p: u64, q: BTreeMap<Perm, FpMatrix>) -> Self {
        let subgroup = PermSubgroup::from_elements(r, q.keys().cloned().collect());
        SubgroupRecord { subgroup, q, v, p }
    }

    /// The projection `H'` to `Sym(r)`.
    pub fn subgroup(&self) -> &PermSubgroup {
        &self.subgroup
    }

    pub fn q(&self, a: &Perm) -> Option<&FpMatrix> {
        self.q.get(a)
    }

    pub fn table(&self) -> &BTreeMap<Perm, FpMatrix> {
        &self.q
    }

    pub fn order(&self) -> usize {
        self.q.len()
    }

    pub fn rank(&self) -> usize {
        self.v
    }

    pub fn branch_count(&self) -> usize {
        self.subgroup.degree()
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn generator_pairs(&self) -> Vec<(Perm, FpMatrix)> {
        self.subgroup
            .generators()
            .iter()
            .map(|a| (a.clone(), self.q[a].clone()))
            .collect()
    }

    pub fn contains(&self, g: &ActionElement) -> bool {
        self.q.get(g.perm()) == Some(g.matrix())
    }

    /// The subgroup lying over `k <= H'`.
    pub fn restrict(&self, k: &PermSubgroup) -> Result<SubgroupRecord> {
        let mut q = BTreeMap::new();
        for a in k.elements() {
            let m = self
                .q
                .get(a)
                .ok_or_else(|| Error::InvalidElement(format!("{a} is not in H'")))?;
            q.insert(a.clone(), m.clone());
        }
        Ok(SubgroupRecord {
            subgroup: k.clone(),
            q,
            v: self.v,
            p: self.p,
        })
    }

    /// `c H c^-1` for `c = (g, a)`.
    pub fn conjugate_by(&self, c: &ActionElement) -> SubgroupRecord {
        let g_inv = c.matrix().inverse().expect("invertible");
        let q = self
            .q
            .iter()
            .map(|(b, m)| (b.conjugate_by(c.perm()), c.matrix().mul(m).mul(&g_inv)))
            .collect();
        SubgroupRecord::from_table(self.branch_count(), self.v, self.p, q)
    }

    /// `sum over h of dim Fix(q(h))`; larger for representations closer to trivial.
    pub fn fixed_dimension_sum(&self) -> usize {
        let id = FpMatrix::identity(self.v, self.p);
        self.q.values().map(|m| self.v - m.add(&id.neg()).rank()).sum()
    }

    fn fingerprint(&self) -> Fingerprint {
        let id = FpMatrix::identity(self.v, self.p);
        let mut items: Vec<(Vec<usize>, u64, usize)> = self
            .q
            .iter()
            .map(|(a, m)| {
                let mut cycle_type: Vec<usize> = a.cycles().iter().map(Vec::len).collect();
                cycle_type.sort_unstable();
                let trace = (0..self.v).map(|i| m.get(i, i)).sum::<u64>() % self.p;
                (cycle_type, trace, self.v - m.add(&id.neg()).rank())
            })
            .collect();
        items.sort();
        (self.order(), items)
    }

    /// Some `c` with `c self c^-1 = other`.
    pub fn conjugator_to(&self, other: &SubgroupRecord, ceiling: u128) -> Result<Option<ActionElement>> {
        if self.v != other.v || self.p != other.p || self.branch_count() != other.branch_count() {
            return Ok(None);
        }
        if self.fingerprint() != other.fingerprint() {
            return Ok(None);
        }
        self.conjugator_unchecked(other, ceiling)
    }

    fn conjugator_unchecked(&self, other: &SubgroupRecord, ceiling: u128) -> Result<Option<ActionElement>> {
        for alpha in all_perms(self.branch_count()) {
            let image = self.subgroup.conjugate_by(&alpha);
            if image.elements() != other.subgroup.elements() {
                continue;
            }
            let pairs: Vec<(&FpMatrix, &FpMatrix)> = self
                .subgroup
                .generators()
                .iter()
                .map(|b| (&self.q[b], &other.q[&b.conjugate_by(&alpha)]))
                .collect();
            if let Some(g) = invertible_intertwiner(self.v, self.p, &pairs, ceiling)? {
                return Ok(Some(ActionElement::new(g, alpha).expect("invertible")));
            }
        }
        Ok(None)
    }

    pub fn is_conjugate_to(&self, other: &SubgroupRecord, ceiling: u128) -> Result<bool> {
        Ok(self.conjugator_to(other, ceiling)?.is_some())
    }

    /// Generator images of `q` as integer matrices, for reports.
    pub fn q_generator_tables(&self) -> Vec<Vec<Vec<u64>>> {
        self.subgroup.generators().iter().map(|a| self.q[a].to_rows()).collect()
    }
}

impl Serialize for SubgroupRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View {
            generators: Vec<String>,
            q: Vec<Vec<Vec<u64>>>,
            order: usize,
        }
        View {
            generators: self.subgroup.generators().iter().map(Perm::to_string).collect(),
            q: self.q_generator_tables(),
            order: self.order(),
        }
        .serialize(s)
    }
}

/// Space of `g` with `g A = B g` for every pair `(A, B)`.
fn intertwiner_space(v: usize, p: u64, pairs: &[(&FpMatrix, &FpMatrix)]) -> LinearSpace {
    let var = |i: usize, k: usize| i * v + k;
    let mut eqs = Vec::new();
    for (a, b) in pairs {
        for i in 0..v {
            for j in 0..v {
                let mut row = vec![0u64; v * v];
                for k in 0..v {
                    row[var(i, k)] = (row[var(i, k)] + a.get(k, j)) % p;
                    row[var(k, j)] = (row[var(k, j)] + p - b.get(i, k)) % p;
                }
                eqs.push(row);
            }
        }
    }
    LinearSpace::solutions(p, v * v, &eqs)
}

fn invertible_intertwiner(
    v: usize,
    p: u64,
    pairs: &[(&FpMatrix, &FpMatrix)],
    ceiling: u128,
) -> Result<Option<FpMatrix>> {
    let space = intertwiner_space(v, p, pairs);
    if space.dim() == 0 {
        return Ok(None);
    }
    let hit = space.find(ceiling, |g| small_rank(g, v, v, p) == v)?;
    Ok(hit.map(|g| FpMatrix::from_residues(v, v, p, g)))
}

/// Space of `X` (`v x r`, row-major) with `q(a) X = X pi_a` for the generators,
/// optionally with zero column sums and support inside `support`.
fn fixed_space(rec: &SubgroupRecord, sum_zero: bool, support: Option<&[usize]>) -> LinearSpace {
    let (v, r, p) = (rec.v, rec.branch_count(), rec.p);
    let var = |i: usize, j: usize| i * r + j;
    let mut eqs = Vec::new();
    for (a, m) in rec.generator_pairs() {
        let a_inv = a.inverse();
        for i in 0..v {
            for j in 0..r {
                // (q X)_{ij} - X_{i, a^-1(j)}
                let mut row = vec![0u64; v * r];
                for k in 0..v {
                    row[var(k, j)] = (row[var(k, j)] + m.get(i, k)) % p;
                }
                let c = var(i, a_inv.apply(j));
                row[c] = (row[c] + p - 1) % p;
                eqs.push(row);
            }
        }
    }
    if sum_zero {
        for i in 0..v {
            let mut row = vec![0u64; v * r];
            for j in 0..r {
                row[var(i, j)] = 1;
            }
            eqs.push(row);
        }
    }
    if let Some(support) = support {
        for i in 0..v {
            for j in (0..r).filter(|j| !support.contains(j)) {
                let mut row = vec![0u64; v * r];
                row[var(i, j)] = 1;
                eqs.push(row);
            }
        }
    }
    LinearSpace::solutions(p, v * r, &eqs)
}

/// The full stabilizer of `x`. For each `a`, the only candidate `g` is read off
/// the pivot columns of `x`, because `x` has rank `v`.
pub fn point_stabilizer(x: &OmegaMatrix) -> SubgroupRecord {
    let m = x.matrix();
    let (v, r, p) = (m.rows(), m.cols(), m.modulus());
    let (_, pivots) = m.rref();
    let xp_inv = m.select_columns(&pivots).inverse().expect("pivot block is invertible");
    let mut q = BTreeMap::new();
    for a in all_perms(r) {
        let y = m.mul(&a.matrix(p));
        let g = y.select_columns(&pivots).mul(&xp_inv);
        if g.mul(m) == y {
            q.insert(a, g);
        }
    }
    SubgroupRecord::from_table(r, v, p, q)
}

/// `|Omega^H|`: members of the fixed solution space with full rank and no zero column.
pub fn fixed_set_size(rec: &SubgroupRecord, ceiling: u128) -> Result<u128> {
    let (v, r, p) = (rec.v, rec.branch_count(), rec.p);
    // the trivial subgroup fixes all of Omega
    if rec.order() == 1 {
        return Ok(super::omega::omega_count(v, r, p));
    }
    let space = fixed_space(rec, true, None);
    space.count(ceiling, |x| {
        let mut scratch = Vec::with_capacity(v * r);
        is_valid_point(x, v, r, p, &mut scratch)
    })
}

/// `|N(H)| = |Z| |N''|`, with `Z` the centralizer of `q(H')` in `GL(v, p)` and
/// `N''` the elements `a` of `N(H')` for which `q` and `q^a` are equivalent.
pub fn normalizer_size(rec: &SubgroupRecord, ceiling: u128) -> Result<u128> {
    let (v, p) = (rec.v, rec.p);
    let gens = rec.generator_pairs();
    let mut n2 = 0u128;
    for alpha in normalizer_in_sym(&rec.subgroup).elements() {
        let pairs: Vec<(&FpMatrix, &FpMatrix)> =
            gens.iter().map(|(b, m)| (m, &rec.q[&b.conjugate_by(alpha)])).collect();
        if invertible_intertwiner(v, p, &pairs, ceiling)?.is_some() {
            n2 += 1;
        }
    }
    let pairs: Vec<(&FpMatrix, &FpMatrix)> = gens.iter().map(|(_, m)| (m, m)).collect();
    let commutant = intertwiner_space(v, p, &pairs);
    let z = if commutant.dim() == v * v {
        gl_order(v, p)
    } else {
        commutant.count(ceiling, |g| small_rank(g, v, v, p) == v)?
    };
    Ok(z * n2)
}

/// Whether `H` fixes a point, decided directly and, when the group order is
/// prime to `p`, also through the two representation conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixedPointReport {
    /// Direct search of the fixed solution space.
    pub fixed_point_exists: bool,
    /// `p` does not divide `|H'|` (and not `p = 2, v = 1`).
    pub criterion_applies: bool,
    /// Some zero-sum intertwiner has full row rank.
    pub dominated: bool,
    /// Every orbit of `H'` carries a nonzero intertwiner into `q`.
    pub orbits_share_irreducible: bool,
}

impl FixedPointReport {
    /// The representation criterion, when it applies.
    pub fn criterion(&self) -> Option<bool> {
        self.criterion_applies
            .then_some(self.dominated && self.orbits_share_irreducible)
    }
}

pub fn has_fixed_point(rec: &SubgroupRecord, ceiling: u128) -> Result<FixedPointReport> {
    let (v, r, p) = (rec.v, rec.branch_count(), rec.p);
    let space = fixed_space(rec, true, None);
    let fixed_point_exists = space
        .find(ceiling, |x| {
            let mut scratch = Vec::with_capacity(v * r);
            is_valid_point(x, v, r, p, &mut scratch)
        })?
        .is_some();
    let dominated = space.find(ceiling, |x| small_rank(x, v, r, p) == v)?.is_some();
    let orbits_share_irreducible = rec
        .subgroup
        .orbits()
        .iter()
        .all(|orbit| fixed_space(rec, false, Some(orbit)).dim() > 0);
    let criterion_applies = !(rec.order() as u64).is_multiple_of(p) && !(p == 2 && v == 1);
    Ok(FixedPointReport {
        fixed_point_exists,
        criterion_applies,
        dominated,
        orbits_share_irreducible,
    })
}

/// Every homomorphism `h -> GL(v, p)`, found by assigning generator images of
/// compatible order and keeping consistent assignments.
pub fn representations(h: &PermSubgroup, v: usize, p: u64, ceiling: u128) -> Result<Vec<SubgroupRecord>> {
    let r = h.degree();
    let gl: Vec<FpMatrix> = enumerate_gl(v, p, ceiling)?.collect();
    let candidates: Vec<Vec<&FpMatrix>> = h
        .generators()
        .iter()
        .map(|a| {
            let ord = a.order() as u64;
            gl.iter().filter(|m| ord.is_multiple_of(m.order())).collect()
        })
        .collect();
    let combos: u128 = candidates.iter().map(|c| c.len() as u128).product();
    if combos > ceiling {
        return Err(Error::ceiling("representation assignments", combos, ceiling));
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; candidates.len()];
    loop {
        let gens: Vec<(Perm, FpMatrix)> = h
            .generators()
            .iter()
            .zip(&digits)
            .zip(&candidates)
            .map(|((a, &d), c)| (a.clone(), c[d].clone()))
            .collect();
        if let Ok(rec) = SubgroupRecord::from_generators(r, v, p, &gens) {
            out.push(rec);
        }
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(out);
            }
            digits[k] += 1;
            if digits[k] < candidates[k].len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Representatives of conjugacy classes, deduplicated on insertion.
struct ClassSet {
    reps: Vec<SubgroupRecord>,
    by_fingerprint: HashMap<Fingerprint, Vec<usize>>,
    ceiling: u128,
}

impl ClassSet {
    fn new(ceiling: u128) -> Self {
        ClassSet {
            reps: Vec::new(),
            by_fingerprint: HashMap::new(),
            ceiling,
        }
    }

    fn find(&self, rec: &SubgroupRecord) -> Result<Option<usize>> {
        let Some(bucket) = self.by_fingerprint.get(&rec.fingerprint()) else {
            return Ok(None);
        };
        for &i in bucket {
            if rec.conjugator_unchecked(&self.reps[i], self.ceiling)?.is_some() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn insert(&mut self, rec: SubgroupRecord) -> Result<bool> {
        if self.find(&rec)?.is_some() {
            return Ok(false);
        }
        self.by_fingerprint
            .entry(rec.fingerprint())
            .or_default()
            .push(self.reps.len());
        self.reps.push(rec);
        Ok(true)
    }

    /// Orders by `|H'|`, the class of `H'` in `Sym(r)`, decreasing fixed
    /// dimension sum, then discovery. Sorting by order first makes the list
    /// compatible with containment up to conjugacy.
    fn into_sorted(self, r: usize) -> Result<Vec<SubgroupRecord>> {
        let table = subgroup_classes(r)?;
        let mut keyed: Vec<_> = self
            .reps
            .into_iter()
            .enumerate()
            .map(|(i, rec)| {
                let class = table.class_of(rec.subgroup()).expect("every subgroup has a class");
                ((rec.order(), class, Reverse(rec.fixed_dimension_sum()), i), rec)
            })
            .collect();
        keyed.sort_by_key(|a| a.0);
        Ok(keyed.into_iter().map(|(_, rec)| rec).collect())
    }
}

/// Index of the class in `classes` conjugate to `rec`.
pub(crate) fn class_index(classes: &[SubgroupRecord], rec: &SubgroupRecord, ceiling: u128) -> Result<Option<usize>> {
    let fp = rec.fingerprint();
    for (i, c) in classes.iter().enumerate() {
        if c.fingerprint() == fp && rec.conjugator_unchecked(c, ceiling)?.is_some() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Conjugacy classes of subgroups fixing at least one point, found by scanning
/// one point per `GL` orbit and collecting every subgroup of each stabilizer.
pub fn stabilizer_classes(v: usize, r: usize, p: u64, ceiling: u128) -> Result<Vec<SubgroupRecord>> {
    let mut seen_stabilizers: HashSet<BTreeMap<Perm, FpMatrix>> = HashSet::new();
    let mut seen_subgroups: HashSet<BTreeMap<Perm, FpMatrix>> = HashSet::new();
    let mut classes = ClassSet::new(ceiling);
    for x in rref_points(v, r, p, ceiling)? {
        let stab = point_stabilizer(&x);
        if !seen_stabilizers.insert(stab.q.clone()) {
            continue;
        }
        for k in stab.subgroup.all_subgroups() {
            let rec = stab.restrict(&k)?;
            if seen_subgroups.insert(rec.q.clone()) {
                classes.insert(rec)?;
            }
        }
    }
    classes.into_sorted(r)
}

/// The same classes built from the other side: every homomorphism from every
/// subgroup class of `Sym(r)` that fixes a point.
pub fn constructive_classes(v: usize, r: usize, p: u64, ceiling: u128) -> Result<Vec<SubgroupRecord>> {
    let table = subgroup_classes(r)?;
    let mut classes = ClassSet::new(ceiling);
    for class in &table.classes {
        let mut local = ClassSet::new(ceiling);
        for rec in representations(&class.representative, v, p, ceiling)? {
            local.insert(rec)?;
        }
        for rec in local.reps {
            if has_fixed_point(&rec, ceiling)?.fixed_point_exists {
                classes.insert(rec)?;
            }
        }
    }
    classes.into_sorted(r)
}
