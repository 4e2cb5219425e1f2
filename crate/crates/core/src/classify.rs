//! Elementary abelian actions split into an unramified part and a purely
//! ramified part; class counts are sums of products of the two.

use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{genus_from_signature, AbAutomorphism, AbelianGroup, Genus, Signature};
use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::genvec::{cup_equivalent_mod_aut, orbit_classes_oracle, GeneratingVector, Move, OracleOptions};
use crate::linalg::FpMatrix;
use crate::ramified::{orbit_count_oracle, table51};
use crate::unramified::{count_elementary, normal_form_candidates, reduce_abelian, CatalogueEntry};

/// Block form of an elementary abelian generating vector: after `word` and the
/// basis change `basis_change`, every `A_i, B_i` lies in `F_p^u (+) 0` and
/// every `C_j` in `0 (+) F_p^v`.
#[derive(Debug, Clone, Serialize)]
pub struct SplitForm {
    pub u: usize,
    pub v: usize,
    /// `u x 2 rho`, columns `A_1..A_rho, B_1..B_rho`; rank `u`.
    pub y_ab: FpMatrix,
    /// `v x r`; rank `v`.
    pub y_c: FpMatrix,
    /// Moves applied to the input before the basis change.
    pub word: Vec<Move>,
    /// Invertible `w x w`, applied to every slot after `word`.
    pub basis_change: FpMatrix,
}

impl SplitForm {
    /// The block-diagonal generating vector over `F_p^(u+v)`.
    pub fn reassemble(&self, signature: &Signature) -> Result<GeneratingVector> {
        let p = self.basis_change.modulus();
        let (u, v) = (self.u, self.v);
        let g = AbelianGroup::elementary(p, u + v)?;
        let lift = |top: Option<Vec<u64>>, bottom: Option<Vec<u64>>| {
            let mut x = top.unwrap_or_else(|| vec![0; u]);
            x.extend(bottom.unwrap_or_else(|| vec![0; v]));
            g.element(&x.iter().map(|&c| c as i64).collect::<Vec<_>>())
        };
        let slots = (0..self.y_ab.cols())
            .map(|k| lift(Some(self.y_ab.column(k)), None))
            .chain((0..self.y_c.cols()).map(|j| lift(None, Some(self.y_c.column(j)))))
            .collect::<Result<Vec<_>>>()?;
        GeneratingVector::from_slots(&g, signature, slots)
    }

    /// Replays the word and the basis change on `gv` and compares with the
    /// reassembled block form; also rechecks the block ranks.
    pub fn certify(&self, gv: &GeneratingVector) -> Result<bool> {
        let g = gv.group();
        let images = (0..self.basis_change.cols())
            .map(|k| {
                g.element(
                    &self
                        .basis_change
                        .column(k)
                        .iter()
                        .map(|&c| c as i64)
                        .collect::<Vec<_>>(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let theta = AbAutomorphism::new(g, images)?;
        let moved = gv.apply_word(&self.word)?.apply_automorphism(&theta);
        let block = self.reassemble(gv.signature())?;
        Ok(moved.slots() == block.slots()
            && self.y_ab.rank() == self.u
            && self.y_c.rank() == self.v
            && block.is_valid())
    }
}

fn column_of(x: &crate::abelian::AbElement) -> Vec<u64> {
    x.coords().to_vec()
}

/// Strips the elliptic components of every `A_i, B_i` with `V`/`U` moves and
/// changes basis so the hyperbolic span is the first `u` coordinates.
pub fn split(gv: &GeneratingVector) -> Result<SplitForm> {
    let g = gv.group();
    let p = g
        .elementary_prime()
        .ok_or_else(|| Error::InvalidGroup(format!("{g} is not elementary abelian")))?;
    let w = g.rank();
    let sig = gv.signature();
    if sig.periods.iter().any(|&m| m != p) {
        return Err(Error::InvalidGroup(format!(
            "signature {sig} is not of the form (rho; {p}^r)"
        )));
    }
    if sig.branch_count() == 1 {
        return Err(Error::InfeasibleSignature(format!(
            "{sig}: a single branch point cannot occur"
        )));
    }
    if !gv.is_valid() {
        return Err(Error::InvalidElement("not a valid generating vector".into()));
    }
    let rho = gv.orbit_genus();
    let hyper: Vec<Vec<u64>> = gv
        .hyperbolic_a()
        .iter()
        .chain(gv.hyperbolic_b())
        .map(column_of)
        .collect();
    let ell: Vec<Vec<u64>> = gv.elliptic().iter().map(column_of).collect();

    // a basis of G^e from the C's, extended greedily by A's and B's
    let mut elliptic_basis: Vec<usize> = Vec::new();
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    let grows = |chosen: &[Vec<u64>], x: &[u64]| {
        let mut cols = chosen.to_vec();
        cols.push(x.to_vec());
        FpMatrix::from_columns(p, w, &cols).rank() > chosen.len()
    };
    for (j, c) in ell.iter().enumerate() {
        if grows(&chosen, c) {
            chosen.push(c.clone());
            elliptic_basis.push(j);
        }
    }
    let v = chosen.len();
    let mut hyper_basis: Vec<Vec<u64>> = Vec::new();
    for x in &hyper {
        if chosen.len() == w {
            break;
        }
        if grows(&chosen, x) {
            chosen.push(x.clone());
            hyper_basis.push(x.clone());
        }
    }
    if chosen.len() != w {
        return Err(Error::InvalidElement("the vector does not generate the group".into()));
    }
    let u = hyper_basis.len();
    let mut columns = hyper_basis;
    columns.extend(elliptic_basis.iter().map(|&j| ell[j].clone()));
    let n = FpMatrix::from_columns(p, w, &columns)
        .inverse()
        .ok_or_else(|| Error::PipelineInconsistency("splitting basis is singular".into()))?;

    let mut word = Vec::new();
    for (slot, x) in hyper.iter().enumerate() {
        let coords = n.mul_vec(x);
        for (t, &j) in elliptic_basis.iter().enumerate() {
            let k = coords[u + t];
            if k == 0 {
                continue;
            }
            let k = -(k as i64);
            word.push(if slot < rho {
                Move::V { i: slot, j, k }
            } else {
                Move::U { i: slot - rho, j, k }
            });
        }
    }
    let moved = gv.apply_word(&word)?;
    let mut y_ab = FpMatrix::zeros(u, 2 * rho, p);
    for (k, x) in moved.hyperbolic_a().iter().chain(moved.hyperbolic_b()).enumerate() {
        let y = n.mul_vec(x.coords());
        if y[u..].iter().any(|&c| c != 0) {
            return Err(Error::PipelineInconsistency("an elliptic component survived".into()));
        }
        for i in 0..u {
            y_ab.set(i, k, y[i] as i64);
        }
    }
    let mut y_c = FpMatrix::zeros(v, ell.len(), p);
    for (j, c) in ell.iter().enumerate() {
        let y = n.mul_vec(c);
        debug_assert!(y[..u].iter().all(|&x| x == 0));
        for i in 0..v {
            y_c.set(i, j, y[u + i] as i64);
        }
    }
    if y_ab.rank() != u || y_c.rank() != v {
        return Err(Error::PipelineInconsistency("split blocks lost rank".into()));
    }
    Ok(SplitForm {
        u,
        v,
        y_ab,
        y_c,
        word,
        basis_change: n,
    })
}

/// Where a factor of a summand comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// The unramified elementary count.
    Unramified,
    /// The closed forms for three and four branch points.
    ClosedForm,
    /// The brute-force orbit count on `Omega`.
    Oracle,
    /// Zero or one by the shape alone.
    Trivial,
    /// Not computed: the oracle refused and the partner factor is zero.
    Unavailable,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summand {
    pub u: usize,
    pub v: usize,
    pub h: u64,
    pub e: Option<u64>,
    pub h_provenance: Provenance,
    pub e_provenance: Provenance,
    pub product: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionCount {
    pub prime: u64,
    pub rank: usize,
    pub signature: String,
    pub genus: Option<u64>,
    /// `h_u` for `u = 0..=w`.
    #[serde(rename = "h-vector")]
    pub h: Vec<u64>,
    /// `e_v` for `v = 0..=w`.
    #[serde(rename = "e-vector")]
    pub e: Vec<Option<u64>>,
    pub summands: Vec<Summand>,
    pub count: u128,
    pub note: Option<String>,
}

impl ActionCount {
    /// One provenance label per nonzero summand, e.g. `h1e1:unramified*closed-form`.
    pub fn provenance(&self) -> Vec<String> {
        self.summands
            .iter()
            .filter(|s| s.product > 0)
            .map(|s| {
                let tag = |x: Provenance| serde_json::to_value(x).ok().and_then(|v| v.as_str().map(String::from));
                format!(
                    "h{}e{}:{}*{}",
                    s.u,
                    s.v,
                    tag(s.h_provenance).unwrap_or_default(),
                    tag(s.e_provenance).unwrap_or_default()
                )
            })
            .collect()
    }
}

/// Number of purely ramified classes of `F_p^v` with `r` branch points.
pub fn elliptic_count(v: usize, r: usize, p: u64, ceiling: u128) -> Result<(u64, Provenance)> {
    if r == 0 {
        return Ok((u64::from(v == 0), Provenance::Trivial));
    }
    if v == 0 || v >= r {
        return Ok((0, Provenance::Trivial));
    }
    match table51(r, v, p) {
        Ok(n) => Ok((n, Provenance::ClosedForm)),
        Err(Error::OutOfScope(_)) => Ok((orbit_count_oracle(v, r, p, ceiling)?, Provenance::Oracle)),
        Err(e) => Err(e),
    }
}

fn check_shape(p: u64, w: usize, sig: &Signature) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidGroup(format!("{p} is not prime")));
    }
    if w == 0 {
        return Err(Error::InvalidGroup("the trivial group has no actions to count".into()));
    }
    if sig.periods.iter().any(|&m| m != p) {
        return Err(Error::InvalidGroup(format!(
            "signature {sig} is not of the form (rho; {p}^r)"
        )));
    }
    Ok(())
}

/// `sum_u h_u e_(w-u)`: classes of actions of `F_p^w` with signature `(rho; p^r)`.
pub fn count_actions(p: u64, w: usize, sig: &Signature, ceiling: u128) -> Result<ActionCount> {
    check_shape(p, w, sig)?;
    let rho = sig.orbit_genus;
    let r = sig.branch_count();
    let order = p
        .checked_pow(w as u32)
        .ok_or_else(|| Error::ceiling("group order", u128::MAX, u64::MAX as u128))?;
    let genus = genus_from_signature(order, sig);
    let mut out = ActionCount {
        prime: p,
        rank: w,
        signature: sig.to_string(),
        genus: genus.value(),
        h: Vec::new(),
        e: Vec::new(),
        summands: Vec::new(),
        count: 0,
        note: None,
    };
    if let Genus::Infeasible(x) = genus {
        out.note = Some(format!("Riemann-Hurwitz gives genus {x}, so no action exists"));
        return Ok(out);
    }
    if r == 1 {
        out.note = Some("a single branch point cannot occur".into());
        return Ok(out);
    }
    out.h = (0..=w).map(|u| count_elementary(rho, u as u64)).collect();
    let mut e_prov = Vec::with_capacity(w + 1);
    for v in 0..=w {
        match elliptic_count(v, r, p, ceiling) {
            Ok((n, src)) => {
                out.e.push(Some(n));
                e_prov.push(src);
            }
            Err(err @ Error::CeilingExceeded { .. }) => {
                if out.h[w - v] != 0 {
                    return Err(err);
                }
                out.e.push(None);
                e_prov.push(Provenance::Unavailable);
            }
            Err(err) => return Err(err),
        }
    }
    for u in 0..=w {
        let v = w - u;
        let h = out.h[u];
        let product = u128::from(h) * u128::from(out.e[v].unwrap_or(0));
        out.summands.push(Summand {
            u,
            v,
            h,
            e: out.e[v],
            h_provenance: if u == 0 {
                Provenance::Trivial
            } else {
                Provenance::Unramified
            },
            e_provenance: e_prov[v],
            product,
        });
        out.count += product;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub prime: u64,
    pub rank: usize,
    pub genus: u64,
    pub entries: Vec<ActionCount>,
    pub total: u128,
}

/// Signatures `(rho; p^r)` for which `F_p^w` acts on genus `genus` by
/// Riemann-Hurwitz, in increasing `rho`. `rho` fixes `r`, and `rho` is bounded
/// because the unramified part alone already grows with `|G|`.
pub fn census_signatures(p: u64, w: usize, genus: u64) -> Result<Vec<Signature>> {
    if !is_prime(p) || w == 0 {
        return Err(Error::InvalidGroup(format!(
            "F_{p}^{w} is not a nontrivial elementary group"
        )));
    }
    let n = i128::from(p).pow(w as u32);
    let step = i128::from(p).pow(w as u32 - 1) * (i128::from(p) - 1);
    let sigma = i128::from(genus);
    let mut out = Vec::new();
    for rho in 0u64.. {
        let base = 1 + n * (rho as i128 - 1);
        if base > sigma {
            break;
        }
        // 2 (sigma - base) = r p^(w-1) (p - 1)
        let twice = 2 * (sigma - base);
        if twice % step == 0 {
            let r = (twice / step) as usize;
            out.push(Signature::new(rho, vec![p; r])?);
        }
    }
    Ok(out)
}

/// Every Riemann-Hurwitz signature of `F_p^w` on genus `genus`, with counts.
pub fn genus_census(p: u64, w: usize, genus: u64, ceiling: u128) -> Result<CensusReport> {
    let sigs = census_signatures(p, w, genus)?;
    let entries = sigs
        .par_iter()
        .map(|sig| count_actions(p, w, sig, ceiling))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = entries.iter().find(|e| e.genus.is_some_and(|x| x != genus)) {
        return Err(Error::PipelineInconsistency(format!(
            "{} has genus {:?}, not {genus}",
            bad.signature, bad.genus
        )));
    }
    Ok(CensusReport {
        prime: p,
        rank: w,
        genus,
        total: entries.iter().map(|e| e.count).sum(),
        entries,
    })
}

/// Unramified class count for an arbitrary abelian group: the closed form for
/// elementary groups, the orbit oracle otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct UnramifiedCount {
    pub invariant_factors: Vec<u64>,
    pub orbit_genus: u64,
    pub genus: u64,
    pub count: u64,
    pub provenance: Provenance,
}

pub fn unramified_count(g: &AbelianGroup, rho: u64, ceiling: u128) -> Result<UnramifiedCount> {
    let sig = Signature::unramified(rho);
    let genus = genus_from_signature(g.order(), &sig)
        .value()
        .ok_or_else(|| Error::InfeasibleSignature(format!("{sig} for {g}")))?;
    let (count, provenance) = match g.elementary_prime() {
        Some(_) => (count_elementary(rho, g.rank() as u64), Provenance::Unramified),
        None => {
            let opts = OracleOptions {
                ceiling,
                ..OracleOptions::default()
            };
            (orbit_classes_oracle(g, &sig, &opts)?.count as u64, Provenance::Oracle)
        }
    };
    Ok(UnramifiedCount {
        invariant_factors: g.factors().to_vec(),
        orbit_genus: rho,
        genus,
        count,
        provenance,
    })
}

/// Splits `candidates` into classes of `cup_equivalent_mod_aut`; returns one
/// representative per class in first-seen order.
pub fn cup_classes(candidates: &[GeneratingVector], ceiling: u128) -> Result<Vec<GeneratingVector>> {
    let mut reps: Vec<GeneratingVector> = Vec::new();
    for c in candidates {
        let mut known = false;
        for k in &reps {
            if cup_equivalent_mod_aut(c, k, ceiling)? {
                known = true;
                break;
            }
        }
        if !known {
            reps.push(c.clone());
        }
    }
    Ok(reps)
}

/// Distinct outputs of the unramified reducer over every valid vector of
/// `(G, (rho; -))`; each reduction is certified by replay.
pub fn reducer_image(g: &AbelianGroup, rho: u64, ceiling: u128) -> Result<Vec<GeneratingVector>> {
    let sig = Signature::unramified(rho);
    let slots = 2 * rho as usize;
    let n = g.order();
    let total = (n as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if total > ceiling {
        return Err(Error::ceiling("reducer sweep", total, ceiling));
    }
    let image = (0..total as u64)
        .into_par_iter()
        .try_fold(std::collections::HashSet::new, |mut acc, mut idx| {
            let mut xs = Vec::with_capacity(slots);
            for _ in 0..slots {
                xs.push(g.element_at((idx % n) as usize));
                idx /= n;
            }
            let gv = GeneratingVector::from_slots(g, &sig, xs)?;
            if gv.is_valid() {
                let red = reduce_abelian(&gv)?;
                if !red.certify()? {
                    return Err(Error::PipelineInconsistency(format!(
                        "reduction of {gv} does not replay"
                    )));
                }
                acc.insert(red.output);
            }
            Ok(acc)
        })
        .try_reduce(std::collections::HashSet::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })?;
    let mut out: Vec<GeneratingVector> = image.into_iter().collect();
    out.sort_by_key(|gv| gv.slots());
    Ok(out)
}

/// A catalogue row checked three ways: normal-form candidates, their cup
/// classes (a lower bound), and the orbit oracle when it fits the ceiling.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogueCheck {
    pub invariant_factors: Vec<u64>,
    pub orbit_genus: u64,
    pub genus: u64,
    pub published: u64,
    pub candidates: usize,
    pub cup_classes: usize,
    pub oracle: Option<usize>,
}

impl CatalogueCheck {
    /// The best available class count: the oracle when run, else the cup
    /// lower bound when it meets the candidate upper bound.
    pub fn classes(&self) -> Option<usize> {
        self.oracle
            .or((self.cup_classes == self.candidates).then_some(self.cup_classes))
    }

    pub fn matches_published(&self) -> bool {
        self.classes() == Some(self.published as usize)
    }
}

pub fn check_catalogue_entry(entry: &CatalogueEntry, ceiling: u128) -> Result<CatalogueCheck> {
    let g = AbelianGroup::new(entry.invariant_factors.clone())?;
    let candidates = normal_form_candidates(&g, entry.orbit_genus as usize)?;
    let cup = cup_classes(&candidates, ceiling)?;
    let opts = OracleOptions {
        ceiling,
        ..OracleOptions::default()
    };
    let oracle = match orbit_classes_oracle(&g, &Signature::unramified(entry.orbit_genus), &opts) {
        Ok(res) => Some(res.count),
        Err(Error::CeilingExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(CatalogueCheck {
        invariant_factors: entry.invariant_factors.clone(),
        orbit_genus: entry.orbit_genus,
        genus: entry.genus,
        published: entry.published_classes,
        candidates: candidates.len(),
        cup_classes: cup.len(),
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_signatures_satisfy_riemann_hurwitz() {
        let sigs = census_signatures(5, 2, 26).unwrap();
        let text: Vec<String> = sigs.iter().map(Signature::to_string).collect();
        assert_eq!(text, ["(0;5,5,5,5,5)", "(2;-)"]);
        for s in &sigs {
            assert_eq!(genus_from_signature(25, s), Genus::Feasible(26));
        }
    }

    #[test]
    fn single_branch_point_counts_zero() {
        let sig: Signature = "1;5".parse().unwrap();
        let c = count_actions(5, 1, &sig, 1 << 20).unwrap();
        assert_eq!(c.count, 0);
        assert!(c.note.is_some());
    }
}
