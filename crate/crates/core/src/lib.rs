//! Classification of finite abelian subgroups of mapping class groups.
//!
//! A finite abelian group `G` acting on a closed surface is encoded by a
//! generating vector over a signature `(rho; m_1, .., m_r)`. Conjugacy classes
//! of such actions correspond to orbits of generating vectors under
//! `Aut(G) x Aut(Gamma)`. This crate enumerates those orbits by brute force,
//! evaluates the closed-form counts for elementary abelian groups, and runs the
//! equisymmetric orbit-counting pipeline for totally ramified actions.

// coordinate loops index several parallel arrays at once
#![allow(clippy::needless_range_loop)]

pub mod abelian;
pub mod arith;
pub mod classify;
pub mod cli;
pub mod error;
pub mod genvec;
pub mod linalg;
pub mod perm;
pub mod ramified;
pub mod unramified;

pub use error::{Error, Result};
