//! Enumeration and search over small `F_p`-linear solution spaces.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::FpMatrix;

/// Spaces with at most this many members are always searched exhaustively.
pub const SPACE_EXHAUSTIVE_LIMIT: u128 = 1 << 20;
/// Default ceiling on the number of members walked by a full enumeration.
pub const SPACE_CEILING: u128 = 1 << 30;

const SAMPLE_COUNT: usize = 512;
const SAMPLE_SEED: u64 = 0x05ee_d0f5_ba5e;

/// The span of `basis` inside `F_p^n`.
#[derive(Debug, Clone)]
pub(crate) struct LinearSpace {
    p: u64,
    ambient: usize,
    basis: Vec<Vec<u64>>,
}

impl LinearSpace {
    /// Null space of the rows in `equations` (each of length `ambient`).
    pub(crate) fn solutions(p: u64, ambient: usize, equations: &[Vec<u64>]) -> Self {
        let basis = if equations.is_empty() {
            (0..ambient)
                .map(|i| (0..ambient).map(|j| u64::from(i == j)).collect())
                .collect()
        } else {
            let data: Vec<u64> = equations.iter().flatten().copied().collect();
            FpMatrix::from_residues(equations.len(), ambient, p, data).kernel_basis()
        };
        LinearSpace { p, ambient, basis }
    }

    pub(crate) fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `p^dim`, saturating.
    pub(crate) fn size(&self) -> u128 {
        (self.p as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX)
    }

    fn combine(&self, coeffs: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.ambient];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                *o = (*o + c * x) % self.p;
            }
        }
        out
    }

    /// Calls `f` on members `start .. start + len` in mixed-radix order,
    /// stopping early when `f` returns `true`.
    fn walk(&self, start: u128, len: u128, mut f: impl FnMut(&[u64]) -> bool) -> bool {
        let d = self.dim();
        let p = self.p;
        let mut digits = vec![0u64; d];
        let mut rest = start;
        for digit in digits.iter_mut() {
            *digit = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        let mut x = self.combine(&digits);
        for _ in 0..len {
            if f(&x) {
                return true;
            }
            // odometer step: each touched digit adds its basis vector once
            for k in 0..d {
                for (o, b) in x.iter_mut().zip(&self.basis[k]) {
                    *o = (*o + b) % p;
                }
                digits[k] += 1;
                if digits[k] < p {
                    break;
                }
                digits[k] = 0;
            }
        }
        false
    }

    fn chunks(&self) -> Vec<(u128, u128)> {
        let size = self.size();
        let pieces = size.clamp(1, 4096);
        let step = size.div_ceil(pieces);
        (0..pieces)
            .map(|i| (i * step, step.min(size.saturating_sub(i * step))))
            .filter(|&(_, len)| len > 0)
            .collect()
    }

    /// Number of members satisfying `pred`.
    pub(crate) fn count<F>(&self, ceiling: u128, pred: F) -> Result<u128>
    where
        F: Fn(&[u64]) -> bool + Sync,
    {
        let size = self.size();
        if size > ceiling {
            return Err(Error::ceiling("solution space enumeration", size, ceiling));
        }
        Ok(self
            .chunks()
            .into_par_iter()
            .map(|(start, len)| {
                let mut n = 0u128;
                self.walk(start, len, |x| {
                    n += u128::from(pred(x));
                    false
                });
                n
            })
            .sum())
    }

    /// Some member satisfying `pred`. Small spaces are scanned in order; large
    /// ones are first sampled deterministically and then scanned in full, so a
    /// `None` answer is always exhaustive.
    pub(crate) fn find<F>(&self, ceiling: u128, pred: F) -> Result<Option<Vec<u64>>>
    where
        F: Fn(&[u64]) -> bool + Sync,
    {
        let size = self.size();
        if size <= SPACE_EXHAUSTIVE_LIMIT {
            let mut hit = None;
            self.walk(0, size, |x| {
                if pred(x) {
                    hit = Some(x.to_vec());
                    true
                } else {
                    false
                }
            });
            return Ok(hit);
        }
        let mut rng = StdRng::seed_from_u64(SAMPLE_SEED);
        for _ in 0..SAMPLE_COUNT {
            let coeffs: Vec<u64> = (0..self.dim()).map(|_| rng.random_range(0..self.p)).collect();
            let x = self.combine(&coeffs);
            if pred(&x) {
                return Ok(Some(x));
            }
        }
        if size > ceiling {
            return Err(Error::ceiling("solution space search", size, ceiling));
        }
        Ok(self.chunks().into_par_iter().find_map_first(|(start, len)| {
            let mut hit = None;
            self.walk(start, len, |x| {
                if pred(x) {
                    hit = Some(x.to_vec());
                    true
                } else {
                    false
                }
            });
            hit
        }))
    }
}

/// Rank of a small row-major matrix given as a slice.
pub(crate) fn small_rank(x: &[u64], rows: usize, cols: usize, p: u64) -> usize {
    let mut buf = x.to_vec();
    crate::linalg::rank_in_place(&mut buf, rows, cols, p)
}
