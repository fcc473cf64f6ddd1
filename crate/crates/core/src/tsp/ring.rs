//! Classical TSP on a circle: either sweep the whole circle or leave one gap
//! between consecutive key points and zig-zag over the remaining arc.

use crate::TOL;

/// End condition for segment and ring paths, in the path's own coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PosEnd {
    Fixed(f64),
    Free,
    Closed,
}

/// Optimal walk on the segment [lo, hi] from `s` that reaches both
/// extremes and ends per `end`. Returns (length, waypoints).
pub fn segment_walk(s: f64, end: PosEnd, lo: f64, hi: f64) -> (f64, Vec<f64>) {
    let w = hi - lo;
    match end {
        PosEnd::Closed => {
            // the nearer extreme first
            if s - lo <= hi - s {
                (2.0 * w, vec![s, lo, hi, s])
            } else {
                (2.0 * w, vec![s, hi, lo, s])
            }
        }
        PosEnd::Free => {
            if s - lo <= hi - s + TOL {
                (s - lo + w, vec![s, lo, hi])
            } else {
                (hi - s + w, vec![s, hi, lo])
            }
        }
        PosEnd::Fixed(e) => {
            let left_first = (s - lo) + w + (hi - e);
            let right_first = (hi - s) + w + (e - lo);
            if left_first <= right_first + TOL {
                (left_first, vec![s, lo, hi, e])
            } else {
                (right_first, vec![s, hi, lo, e])
            }
        }
    }
}

fn ring_dist(c: f64, a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(c);
    d.min(c - d)
}

/// Optimal walk on a circle of length `c` from `s` covering `pts`. Returns
/// the length and a waypoint list whose legs are all shorter than c/2.
pub fn ring_walk(c: f64, s: f64, pts: &[f64], end: PosEnd) -> (f64, Vec<f64>) {
    let mut keys: Vec<f64> = pts.iter().copied().chain(std::iter::once(s)).collect();
    if let PosEnd::Fixed(e) = end {
        keys.push(e);
    }
    for k in keys.iter_mut() {
        *k = k.rem_euclid(c);
        if *k >= c - TOL {
            *k = 0.0;
        }
    }
    keys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    keys.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    let m = keys.len();
    let mut best = (f64::INFINITY, Vec::new());
    if pts.is_empty() {
        return match end {
            PosEnd::Fixed(e) => (ring_dist(c, s, e), split(c, &[s, shortest_target(c, s, e)])),
            _ => (0.0, vec![s]),
        };
    }
    for i in 0..m {
        let base = keys[(i + 1) % m];
        let gap = if m == 1 { c } else { (keys[(i + 1) % m] - keys[i]).rem_euclid(c) };
        let w = c - gap;
        let u = |x: f64| {
            let v = (x - base).rem_euclid(c);
            if v > w + TOL {
                // rounding at the wrap; the point is the base itself
                0.0
            } else {
                v.min(w)
            }
        };
        let us = u(s);
        let ue = match end {
            PosEnd::Fixed(e) => PosEnd::Fixed(u(e)),
            other => other,
        };
        let (len, way) = segment_walk(us, ue, 0.0, w);
        if len < best.0 - TOL {
            best = (len, way.iter().map(|&x| base + x).collect());
        }
    }
    // Full sweep around the circle, then on to the end.
    let full = match end {
        PosEnd::Fixed(e) => c + ring_dist(c, s, e),
        _ => c,
    };
    if full < best.0 - TOL {
        let mut way = vec![s, s + c];
        if let PosEnd::Fixed(e) = end {
            way.push(shortest_target(c, s + c, e));
        }
        best = (full, way);
    }
    let (len, way) = best;
    (len, split(c, &way))
}

/// The representative of `e` (mod c) nearest to `from` on the real line.
fn shortest_target(c: f64, from: f64, e: f64) -> f64 {
    let cw = (e - from).rem_euclid(c);
    if cw <= c - cw + TOL {
        from + cw
    } else {
        from - (c - cw)
    }
}

/// Cuts an unrolled waypoint list into legs of length at most c/3 and wraps
/// positions into [0, c).
fn split(c: f64, way: &[f64]) -> Vec<f64> {
    let mut out = vec![wrap(c, way[0])];
    for pair in way.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let pieces = ((b - a).abs() / (c / 3.0)).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            out.push(wrap(c, a + (b - a) * k as f64 / pieces as f64));
        }
    }
    out
}

fn wrap(c: f64, x: f64) -> f64 {
    let r = x.rem_euclid(c);
    if r >= c - TOL {
        0.0
    } else {
        r
    }
}
