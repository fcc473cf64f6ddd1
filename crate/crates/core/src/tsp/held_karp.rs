//! Bitmask dynamic programming over a distance matrix.

use crate::error::{Error, Result};
use crate::TOL;

pub const HELD_KARP_CAP: usize = 24;

/// Where a matrix path ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixEnd {
    Fixed(usize),
    Free,
    /// Back to the start.
    Closed,
}

/// Shortest path from `start` through every index of `req`, ending per `end`.
/// Among optimal orders returns the lexicographically smallest sequence of
/// positions in `req`.
pub fn held_karp_matrix(d: &[Vec<f64>], start: usize, req: &[usize], end: MatrixEnd) -> Result<(f64, Vec<usize>)> {
    let k = req.len();
    if k > HELD_KARP_CAP {
        return Err(Error::SizeCap { what: "held_karp required set", got: k, cap: HELD_KARP_CAP });
    }
    let end_cost = |v: usize| -> f64 {
        match end {
            MatrixEnd::Fixed(e) => d[v][e],
            MatrixEnd::Free => 0.0,
            MatrixEnd::Closed => d[v][start],
        }
    };
    if k == 0 {
        return Ok((end_cost(start), Vec::new()));
    }
    let full = (1usize << k) - 1;
    // h[mask * k + v]: cheapest way to finish from req[v] visiting `mask` (v ∉ mask).
    let mut h = vec![f64::INFINITY; (full + 1) * k];
    for v in 0..k {
        h[v] = end_cost(req[v]);
    }
    for mask in 1..=full {
        for v in 0..k {
            if mask & (1 << v) != 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut m = mask;
            while m != 0 {
                let u = m.trailing_zeros() as usize;
                m &= m - 1;
                let c = d[req[v]][req[u]] + h[(mask ^ (1 << u)) * k + u];
                if c < best {
                    best = c;
                }
            }
            h[mask * k + v] = best;
        }
    }
    let mut best = f64::INFINITY;
    for v in 0..k {
        best = best.min(d[start][req[v]] + h[(full ^ (1 << v)) * k + v]);
    }
    // Forward reconstruction choosing the smallest feasible next position.
    let mut order = Vec::with_capacity(k);
    let mut remaining = full;
    let mut cur = start;
    let mut budget = best;
    while remaining != 0 {
        let mut m = remaining;
        let mut chosen = None;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            let c = d[cur][req[u]] + h[(remaining ^ (1 << u)) * k + u];
            if c <= budget + TOL {
                chosen = Some((u, c));
                break;
            }
        }
        let (u, c) = chosen.expect("reconstruction follows an optimal entry");
        budget = c - d[cur][req[u]];
        order.push(u);
        remaining ^= 1 << u;
        cur = req[u];
    }
    Ok((best, order))
}
