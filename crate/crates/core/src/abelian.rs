//! Finite abelian groups in invariant-factor form, their automorphisms and
//! tensor squares, and signature bookkeeping via Riemann-Hurwitz.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{additive_order, is_prime, prime_factors, primitive_root};
use crate::error::{Error, Result};
use crate::linalg::rank_in_place;

/// Default ceiling on `|G|` for automorphism enumeration.
pub const AUTOMORPHISM_GROUP_CEILING: u128 = 10_000;
/// Ceiling on the number of candidate generator-image tuples scanned.
pub const AUTOMORPHISM_CANDIDATE_CEILING: u128 = 10_000_000;

/// `G = Z/n_1 + .. + Z/n_t` with `n_{i+1} | n_i` and every `n_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

/// Residue vector; coordinate `i` lies in `[0, n_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbElement(pub Vec<u64>);

impl AbElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.iter().any(|&n| n < 2) {
            return Err(Error::InvalidGroup(format!(
                "invariant factors must be at least 2, got {factors:?}"
            )));
        }
        if factors.windows(2).any(|w| w[0] % w[1] != 0) {
            return Err(Error::InvalidGroup(format!(
                "invariant factors {factors:?} do not form a divisibility chain"
            )));
        }
        Ok(AbelianGroup { factors })
    }

    /// `F_p^w`.
    pub fn elementary(p: u64, w: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("{p} is not prime")));
        }
        Self::new(vec![p; w])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.first().copied().unwrap_or(1)
    }

    /// The prime `p` when `G` is a nontrivial elementary abelian `p`-group.
    pub fn elementary_prime(&self) -> Option<u64> {
        let p = *self.factors.first()?;
        (is_prime(p) && self.factors.iter().all(|&n| n == p)).then_some(p)
    }

    pub fn zero(&self) -> AbElement {
        AbElement(vec![0; self.rank()])
    }

    /// Standard generator `omega_i` (0-based).
    pub fn generator(&self, i: usize) -> AbElement {
        let mut x = self.zero();
        x.0[i] = 1;
        x
    }

    /// Reduces signed coordinates into the group.
    pub fn element(&self, coords: &[i64]) -> Result<AbElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "{coords:?} has {} coordinates, group rank is {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(AbElement(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    pub fn contains(&self, x: &AbElement) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.factors).all(|(&c, &n)| c < n)
    }

    pub fn add(&self, x: &AbElement, y: &AbElement) -> AbElement {
        AbElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.factors)
                .map(|((a, b), n)| (a + b) % n)
                .collect(),
        )
    }

    pub fn sub(&self, x: &AbElement, y: &AbElement) -> AbElement {
        self.add(x, &self.neg(y))
    }

    pub fn neg(&self, x: &AbElement) -> AbElement {
        AbElement(x.0.iter().zip(&self.factors).map(|(a, n)| (n - a) % n).collect())
    }

    /// `k x` for a signed multiplier `k`.
    pub fn scale(&self, k: i64, x: &AbElement) -> AbElement {
        AbElement(
            x.0.iter()
                .zip(&self.factors)
                .map(|(&a, &n)| {
                    let k = k.rem_euclid(n as i64) as u128;
                    ((k * a as u128) % n as u128) as u64
                })
                .collect(),
        )
    }

    pub fn sum<'a>(&self, xs: impl IntoIterator<Item = &'a AbElement>) -> AbElement {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    pub fn element_order(&self, x: &AbElement) -> u64 {
        x.0.iter()
            .zip(&self.factors)
            .fold(1, |acc, (&a, &n)| acc.lcm(&additive_order(a, n)))
    }

    /// Mixed-radix index with the first coordinate most significant.
    pub fn index_of(&self, x: &AbElement) -> usize {
        x.0.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&a, &n)| acc * n as usize + a as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> AbElement {
        let mut coords = vec![0; self.rank()];
        for (c, &n) in coords.iter_mut().zip(&self.factors).rev() {
            *c = (idx % n as usize) as u64;
            idx /= n as usize;
        }
        AbElement(coords)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = AbElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// Whether `xs` generate `G`: for each prime `p | n_1`, their images span `G / pG`.
    pub fn generates<'a>(&self, xs: impl IntoIterator<Item = &'a AbElement> + Clone) -> bool {
        for p in prime_factors(self.exponent()) {
            let cols: Vec<usize> = (0..self.rank())
                .filter(|&i| self.factors[i].is_multiple_of(p))
                .collect();
            let mut rows: Vec<u64> = Vec::new();
            let mut count = 0;
            for x in xs.clone() {
                rows.extend(cols.iter().map(|&i| x.0[i] % p));
                count += 1;
            }
            if rank_in_place(&mut rows, count, cols.len(), p) < cols.len() {
                return false;
            }
        }
        true
    }

    /// Subgroup generated by `xs`, as a sorted list of element indices.
    pub fn span_indices(&self, xs: &[AbElement]) -> Vec<usize> {
        let mut seen = HashSet::from([self.index_of(&self.zero())]);
        let mut queue = VecDeque::from([self.zero()]);
        while let Some(y) = queue.pop_front() {
            for x in xs {
                let z = self.add(&y, x);
                if seen.insert(self.index_of(&z)) {
                    queue.push_back(z);
                }
            }
        }
        let mut out: Vec<usize> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("C{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for AbelianGroup {
    type Err = Error;

    /// Parses comma-separated invariant factors such as `4,4,2`.
    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("invariant factor {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        AbelianGroup::new(factors)
    }
}

/// An automorphism given by the images of the standard generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbAutomorphism {
    images: Vec<AbElement>,
}

impl AbAutomorphism {
    /// Validates that the images define an automorphism of `g`.
    pub fn new(g: &AbelianGroup, images: Vec<AbElement>) -> Result<Self> {
        if images.len() != g.rank() || !images.iter().all(|x| g.contains(x)) {
            return Err(Error::InvalidElement("generator images do not lie in the group".into()));
        }
        for (x, &n) in images.iter().zip(g.factors()) {
            if n % g.element_order(x) != 0 {
                return Err(Error::InvalidElement(format!("image {x} has order not dividing {n}")));
            }
        }
        if !g.generates(&images) {
            return Err(Error::InvalidElement(
                "generator images do not generate the group".into(),
            ));
        }
        Ok(AbAutomorphism { images })
    }

    pub fn identity(g: &AbelianGroup) -> Self {
        AbAutomorphism {
            images: (0..g.rank()).map(|i| g.generator(i)).collect(),
        }
    }

    pub fn images(&self) -> &[AbElement] {
        &self.images
    }

    pub fn apply(&self, g: &AbelianGroup, x: &AbElement) -> AbElement {
        x.0.iter()
            .zip(&self.images)
            .fold(g.zero(), |acc, (&c, img)| g.add(&acc, &g.scale(c as i64, img)))
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, g: &AbelianGroup, other: &AbAutomorphism) -> AbAutomorphism {
        AbAutomorphism {
            images: other.images.iter().map(|y| self.apply(g, y)).collect(),
        }
    }

    /// The induced permutation of element indices.
    pub fn permutation_table(&self, g: &AbelianGroup) -> Vec<u32> {
        g.elements().map(|x| g.index_of(&self.apply(g, &x)) as u32).collect()
    }
}

/// Every automorphism of `g`, each exactly once.
pub fn enumerate_automorphisms(g: &AbelianGroup, ceiling: u128) -> Result<Vec<AbAutomorphism>> {
    if g.order() as u128 > ceiling {
        return Err(Error::ceiling(
            "automorphism enumeration (|G|)",
            g.order() as u128,
            ceiling,
        ));
    }
    let candidates: Vec<Vec<AbElement>> = g
        .factors()
        .iter()
        .map(|&n| g.elements().filter(|x| n % g.element_order(x) == 0).collect())
        .collect();
    let total: u128 = candidates.iter().map(|c| c.len() as u128).product();
    if total > AUTOMORPHISM_CANDIDATE_CEILING {
        return Err(Error::ceiling(
            "automorphism enumeration (candidate tuples)",
            total,
            AUTOMORPHISM_CANDIDATE_CEILING,
        ));
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; g.rank()];
    'outer: loop {
        let images: Vec<AbElement> = choice.iter().zip(&candidates).map(|(&k, c)| c[k].clone()).collect();
        if g.generates(&images) {
            out.push(AbAutomorphism { images });
        }
        for i in (0..choice.len()).rev() {
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }
    Ok(out)
}

/// A generating set of `Aut(G)`.
///
/// Elementary abelian groups use elementary transvections plus one scaling by a
/// primitive root. Other groups fall back to full enumeration and a greedy pick.
pub fn automorphism_generators(g: &AbelianGroup, ceiling: u128) -> Result<Vec<AbAutomorphism>> {
    if let Some(p) = g.elementary_prime() {
        let w = g.rank();
        let mut gens = Vec::new();
        for i in 0..w {
            for j in 0..w {
                if i != j {
                    // omega_j -> omega_j + omega_i
                    let mut images: Vec<AbElement> = (0..w).map(|k| g.generator(k)).collect();
                    images[j] = g.add(&images[j], &g.generator(i));
                    gens.push(AbAutomorphism { images });
                }
            }
        }
        let root = primitive_root(p);
        if root != 1 {
            let mut images: Vec<AbElement> = (0..w).map(|k| g.generator(k)).collect();
            images[0] = g.scale(root as i64, &images[0]);
            gens.push(AbAutomorphism { images });
        }
        return Ok(gens);
    }
    let all = enumerate_automorphisms(g, ceiling)?;
    let mut span: BTreeSet<AbAutomorphism> = BTreeSet::from([AbAutomorphism::identity(g)]);
    let mut gens: Vec<AbAutomorphism> = Vec::new();
    for a in all {
        if span.contains(&a) {
            continue;
        }
        gens.push(a);
        let mut queue: VecDeque<AbAutomorphism> = span.iter().cloned().collect();
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = x.compose(g, s);
                if span.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(gens)
}

/// Signature `(rho; m_1, .., m_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub orbit_genus: u64,
    pub periods: Vec<u64>,
}

impl Signature {
    pub fn new(orbit_genus: u64, periods: Vec<u64>) -> Result<Self> {
        if periods.iter().any(|&m| m < 2) {
            return Err(Error::Parse(format!("periods must be at least 2, got {periods:?}")));
        }
        Ok(Signature { orbit_genus, periods })
    }

    pub fn unramified(orbit_genus: u64) -> Self {
        Signature {
            orbit_genus,
            periods: Vec::new(),
        }
    }

    pub fn branch_count(&self) -> usize {
        self.periods.len()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.periods.is_empty() {
            return write!(f, "({};-)", self.orbit_genus);
        }
        let parts: Vec<String> = self.periods.iter().map(u64::to_string).collect();
        write!(f, "({};{})", self.orbit_genus, parts.join(","))
    }
}

impl FromStr for Signature {
    type Err = Error;

    /// Parses `rho;m1,m2,..` with `-` (or nothing) for an empty period list.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (genus, periods) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("signature {s:?} lacks ';'")))?;
        let orbit_genus = genus
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("orbit genus {genus:?}: {e}")))?;
        let periods = periods.trim();
        let periods = if periods.is_empty() || periods == "-" {
            Vec::new()
        } else {
            periods
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Parse(format!("period {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Signature::new(orbit_genus, periods)
    }
}

/// Outcome of solving Riemann-Hurwitz for the surface genus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genus {
    Feasible(u64),
    /// The solution is negative or not an integer.
    Infeasible(Ratio<i64>),
}

impl Genus {
    pub fn value(self) -> Option<u64> {
        match self {
            Genus::Feasible(g) => Some(g),
            Genus::Infeasible(_) => None,
        }
    }
}

/// Solves `(2 sigma - 2)/|G| = 2 rho - 2 + sum (1 - 1/m_j)` for `sigma`.
pub fn genus_from_signature(group_order: u64, sig: &Signature) -> Genus {
    let n = group_order as i64;
    let mut rhs = Ratio::from_integer(2 * sig.orbit_genus as i64 - 2);
    for &m in &sig.periods {
        rhs += Ratio::new(m as i64 - 1, m as i64);
    }
    let sigma = Ratio::from_integer(1) + rhs * Ratio::new(n, 2);
    if sigma.is_integer() && *sigma.numer() >= 0 {
        Genus::Feasible(sigma.to_integer() as u64)
    } else {
        Genus::Infeasible(sigma)
    }
}

/// Element of `G (x) G`, coordinate `(i, j)` taken mod `gcd(n_i, n_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TensorSquareElement {
    rank: usize,
    moduli: Vec<u64>,
    coords: Vec<u64>,
}

impl TensorSquareElement {
    pub fn zero(g: &AbelianGroup) -> Self {
        let t = g.rank();
        let f = g.factors();
        let moduli = (0..t * t).map(|k| f[k / t].gcd(&f[k % t])).collect();
        TensorSquareElement {
            rank: t,
            moduli,
            coords: vec![0; t * t],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.coords[i * self.rank + j]
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(&self.moduli)
            .map(|((a, b), m)| (a + b) % m)
            .collect();
        TensorSquareElement { coords, ..self.clone() }
    }

    pub fn scale(&self, k: i64) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &m)| ((k.rem_euclid(m as i64) as u64) * a) % m)
            .collect();
        TensorSquareElement { coords, ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Image under `theta (x) theta`.
    pub fn apply_automorphism(&self, g: &AbelianGroup, theta: &AbAutomorphism) -> Self {
        let t = self.rank;
        let mut out = TensorSquareElement::zero(g);
        for i in 0..t {
            for j in 0..t {
                let c = self.get(i, j);
                if c != 0 {
                    let term = tensor_square(g, &theta.images[i], &theta.images[j]);
                    out = out.add(&term.scale(c as i64));
                }
            }
        }
        out
    }
}

impl fmt::Display for TensorSquareElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for i in 0..self.rank {
            for j in 0..self.rank {
                let c = self.get(i, j);
                if c != 0 {
                    terms.push(format!("{c}*w{}(x)w{}", i + 1, j + 1));
                }
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// The elementary tensor `x (x) y`.
pub fn tensor_square(g: &AbelianGroup, x: &AbElement, y: &AbElement) -> TensorSquareElement {
    let mut out = TensorSquareElement::zero(g);
    let t = g.rank();
    for i in 0..t {
        for j in 0..t {
            let m = out.moduli[i * t + j];
            out.coords[i * t + j] = ((x.0[i] % m) * (y.0[j] % m)) % m;
        }
    }
    out
}
