//! Published closed forms for three and four branch points.

use crate::arith::{euler_phi, is_prime};
use crate::error::{Error, Result};

/// The `(r, v)` pairs covered by [`table51`].
pub const TABLE51_PAIRS: [(usize, usize); 5] = [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3)];

/// Number of primitive `n`-th roots of unity in `F_p`.
pub fn beta_n(n: u64, p: u64) -> u64 {
    if n > 0 && (p - 1).is_multiple_of(n) {
        euler_phi(n)
    } else {
        0
    }
}

fn exact_div(num: u64, den: u64) -> u64 {
    debug_assert_eq!(num % den, 0, "closed form is not integral");
    num / den
}

/// Closed-form class count for `r` branch points and `p`-rank `v`.
pub fn table51(r: usize, v: usize, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidGroup(format!("{p} is not prime")));
    }
    let b3 = beta_n(3, p);
    let b4 = beta_n(4, p);
    let value = match (r, v) {
        (3, 1) => match p {
            2 => 0,
            3 => 1,
            _ if b3 == 0 => exact_div(p + 1, 6),
            _ => exact_div(p + 5, 6),
        },
        (3, 2) | (4, 3) => 1,
        (4, 1) => match p {
            2 | 3 => 1,
            _ if b4 == 0 => exact_div(p * p + 6 * p + 5, 24),
            _ => exact_div(p * p + 6 * p + 17, 24),
        },
        (4, 2) => match (p, b3, b4) {
            (2, _, _) => return Err(Error::OutOfScope("no closed form for r = 4, v = 2 at p = 2".into())),
            (3, _, _) => 2,
            (_, 0, 0) => exact_div(p * p + 10 * p + 9, 24),
            (_, _, 0) => exact_div(p * p + 10 * p + 25, 24),
            (_, 0, _) => exact_div(p * p + 10 * p + 21, 24),
            _ => exact_div(p * p + 10 * p + 37, 24),
        },
        _ => {
            return Err(Error::OutOfScope(format!(
                "no closed form for r = {r} branch points and rank {v}"
            )))
        }
    };
    Ok(value)
}
