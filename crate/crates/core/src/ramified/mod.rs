//! Totally ramified elementary abelian actions.
//!
//! A generating vector of `F_p^v` with quotient genus zero and `r` branch
//! points is a `v x r` matrix `X` of rank `v` whose columns are nonzero and sum
//! to zero. `GL(v, p) x Sym(r)` acts by `(g, a) . X = g X pi_a^T`, and the
//! equivalence classes of actions are the orbits of this action. This module
//! counts them three ways: a breadth-first orbit oracle, a Möbius inversion
//! over the poset of point stabilizers, and published closed forms.

mod omega;
mod oracle;
mod space;
mod stabilizer;
mod strata;
mod table;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::FpMatrix;
use crate::perm::Perm;

pub use omega::{
    enumerate_omega, omega_bar_count, omega_count, rref_points, scaled_sum_count, unique_when_r_is_v_plus_1,
    OMEGA_CEILING,
};
pub use oracle::{omega_orbits, orbit_count_oracle, OmegaOrbit, OMEGA_ORACLE_CEILING};
pub use space::{SPACE_CEILING, SPACE_EXHAUSTIVE_LIMIT};
pub use stabilizer::{
    constructive_classes, fixed_set_size, has_fixed_point, normalizer_size, point_stabilizer, representations,
    stabilizer_classes, FixedPointReport, SubgroupRecord,
};
pub use strata::{build_strata_report, pipeline_count, scan_strata_sizes, ClassSummary, StrataReport};
pub use table::{beta_n, table51, TABLE51_PAIRS};

/// A point of `Omega`: rank `v`, nonzero columns summing to zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OmegaMatrix(FpMatrix);

impl OmegaMatrix {
    pub fn new(x: FpMatrix) -> Result<Self> {
        let (v, r) = (x.rows(), x.cols());
        if v == 0 || r < 2 {
            return Err(Error::ShapeMismatch(format!("{v}x{r} matrix cannot lie in Omega")));
        }
        if (0..r).any(|j| x.column(j).iter().all(|&e| e == 0)) {
            return Err(Error::InvalidElement("Omega matrix has a zero column".into()));
        }
        let p = x.modulus();
        if (0..v).any(|i| x.row(i).iter().fold(0, |s, &e| (s + e) % p) != 0) {
            return Err(Error::InvalidElement("Omega matrix columns do not sum to zero".into()));
        }
        if x.rank() != v {
            return Err(Error::InvalidElement("Omega matrix is not of full row rank".into()));
        }
        Ok(OmegaMatrix(x))
    }

    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(FpMatrix::from_rows(p, rows))
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.rows()
    }

    pub fn branch_count(&self) -> usize {
        self.0.cols()
    }

    pub fn modulus(&self) -> u64 {
        self.0.modulus()
    }

    pub fn into_matrix(self) -> FpMatrix {
        self.0
    }
}

impl fmt::Display for OmegaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An element `(g, a)` of `GL(v, p) x Sym(r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionElement {
    g: FpMatrix,
    alpha: Perm,
}

impl ActionElement {
    pub fn new(g: FpMatrix, alpha: Perm) -> Result<Self> {
        if g.rows() != g.cols() || !g.is_invertible() {
            return Err(Error::InvalidElement("action matrix must be invertible".into()));
        }
        Ok(ActionElement { g, alpha })
    }

    pub fn identity(v: usize, r: usize, p: u64) -> Self {
        ActionElement {
            g: FpMatrix::identity(v, p),
            alpha: Perm::identity(r),
        }
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.g
    }

    pub fn perm(&self) -> &Perm {
        &self.alpha
    }

    /// Group product `self * other`, acting as `other` first.
    pub fn compose(&self, other: &ActionElement) -> ActionElement {
        ActionElement {
            g: self.g.mul(&other.g),
            alpha: self.alpha.then(&other.alpha),
        }
    }

    pub fn inverse(&self) -> ActionElement {
        ActionElement {
            g: self.g.inverse().expect("invertible by construction"),
            alpha: self.alpha.inverse(),
        }
    }
}

/// `(g, a) . X = g X pi_a^T`: column `i` of the result is `g X_{a(i)}`.
pub fn act(a: &ActionElement, x: &OmegaMatrix) -> Result<OmegaMatrix> {
    let m = x.matrix();
    if a.g.rows() != m.rows() || a.alpha.degree() != m.cols() || a.g.modulus() != m.modulus() {
        return Err(Error::ShapeMismatch(format!(
            "element on ({}, {}) cannot act on a {}x{} matrix",
            a.g.rows(),
            a.alpha.degree(),
            m.rows(),
            m.cols()
        )));
    }
    let permuted = m.mul(&a.alpha.matrix(m.modulus()).transpose());
    Ok(OmegaMatrix(a.g.mul(&permuted)))
}
