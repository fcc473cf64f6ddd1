//! Offline optima with release times, and the classical serving-path length F.

use super::{classical_path, End, OptResult};
use crate::error::{Error, Result};
use crate::sim::{Instance, Variant};
use crate::TOL;

pub const BRUTEFORCE_CAP: usize = 10;
pub const RELEASE_DP_CAP: usize = 20;

/// Completion time of the eager server that visits requests in `order`,
/// waiting at each location until its release (plus the return if closed).
pub fn eval_serving_order(inst: &Instance, order: &[usize]) -> f64 {
    let sp = &inst.space;
    let mut t = 0.0_f64;
    let mut pos = &inst.origin;
    for &i in order {
        let r = &inst.requests[i];
        t += sp.dist(pos, &r.location);
        t = t.max(r.release);
        pos = &r.location;
    }
    if inst.variant == Variant::Closed {
        t += sp.dist(pos, &inst.origin);
    }
    t
}

fn matrix(inst: &Instance) -> Vec<Vec<f64>> {
    let mut pts = vec![inst.origin.clone()];
    pts.extend(inst.locations());
    pts.iter().map(|a| pts.iter().map(|b| inst.space.dist(a, b)).collect()).collect()
}

/// Exhaustive search over serving orders with bound pruning; the first
/// optimal order met in lexicographic order is returned.
pub fn opt_bruteforce(inst: &Instance) -> Result<OptResult> {
    let n = inst.n();
    if n > BRUTEFORCE_CAP {
        return Err(Error::SizeCap { what: "opt_bruteforce requests", got: n, cap: BRUTEFORCE_CAP });
    }
    let d = matrix(inst);
    let rel: Vec<f64> = inst.releases();
    let closed = inst.variant == Variant::Closed;
    struct Search<'a> {
        d: &'a [Vec<f64>],
        rel: &'a [f64],
        closed: bool,
        best: f64,
        best_order: Vec<usize>,
        cur: Vec<usize>,
        used: Vec<bool>,
    }
    impl Search<'_> {
        fn go(&mut self, at: usize, t: f64) {
            let n = self.rel.len();
            if self.cur.len() == n {
                let fin = if self.closed { t + self.d[at][0] } else { t };
                if fin < self.best - TOL {
                    self.best = fin;
                    self.best_order = self.cur.clone();
                }
                return;
            }
            // Lower bound: every remaining request must still be reached
            // (and, if closed, the origin after it).
            let mut lb = t;
            for j in 0..n {
                if !self.used[j] {
                    let back = if self.closed { self.d[j + 1][0] } else { 0.0 };
                    lb = lb.max(t + self.d[at][j + 1] + back).max(self.rel[j] + back);
                }
            }
            if lb >= self.best - TOL {
                return;
            }
            for j in 0..n {
                if self.used[j] {
                    continue;
                }
                self.used[j] = true;
                self.cur.push(j);
                let nt = (t + self.d[at][j + 1]).max(self.rel[j]);
                self.go(j + 1, nt);
                self.cur.pop();
                self.used[j] = false;
            }
        }
    }
    let mut s = Search {
        d: &d,
        rel: &rel,
        closed,
        best: f64::INFINITY,
        best_order: Vec::new(),
        cur: Vec::new(),
        used: vec![false; n],
    };
    s.go(0, 0.0);
    if n == 0 {
        s.best = 0.0;
    }
    let mut walk = vec![inst.origin.clone()];
    walk.extend(s.best_order.iter().map(|&i| inst.requests[i].location.clone()));
    if closed {
        walk.push(inst.origin.clone());
    }
    Ok(OptResult { length: s.best, order: s.best_order, walk })
}

/// Exact optimum by dynamic programming over (served set, last request):
/// the earliest time a set can be served ending at a given request.
pub fn opt_release_dp(inst: &Instance) -> Result<f64> {
    let n = inst.n();
    if n > RELEASE_DP_CAP {
        return Err(Error::SizeCap { what: "opt_release_dp requests", got: n, cap: RELEASE_DP_CAP });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let d = matrix(inst);
    let rel = inst.releases();
    let full = (1usize << n) - 1;
    let mut f = vec![f64::INFINITY; (full + 1) * n];
    for v in 0..n {
        f[(1 << v) * n + v] = d[0][v + 1].max(rel[v]);
    }
    for mask in 1..=full {
        for v in 0..n {
            let cur = f[mask * n + v];
            if mask & (1 << v) == 0 || cur.is_infinite() {
                continue;
            }
            for u in 0..n {
                if mask & (1 << u) != 0 {
                    continue;
                }
                let nm = mask | (1 << u);
                let t = (cur + d[v + 1][u + 1]).max(rel[u]);
                if t < f[nm * n + u] {
                    f[nm * n + u] = t;
                }
            }
        }
    }
    let closed = inst.variant == Variant::Closed;
    Ok((0..n)
        .map(|v| f[full * n + v] + if closed { d[v + 1][0] } else { 0.0 })
        .fold(f64::INFINITY, f64::min))
}

/// F: classical shortest path (or tour, if closed) from the origin through
/// every true request location.
pub fn shortest_serving_path_length(inst: &Instance) -> Result<f64> {
    let end = match inst.variant {
        Variant::Closed => End::Closed,
        Variant::Open => End::Free,
    };
    Ok(classical_path(&inst.space, &inst.origin, &inst.locations(), &end)?.length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{MetricSpace, Point};

    fn closed_two_request_line() -> Instance {
        Instance::new(
            MetricSpace::Line,
            vec![(Point::Line(1.0), 1.0), (Point::Line(0.0), 2.0)],
            vec![Point::Line(0.0), Point::Line(-1.0)],
            Variant::Closed,
        )
        .unwrap()
    }

    #[test]
    fn serving_orders_of_the_closed_line_fixture() {
        let inst = closed_two_request_line();
        assert!((eval_serving_order(&inst, &[1, 0]) - 4.0).abs() < 1e-12);
        assert!((eval_serving_order(&inst, &[0, 1]) - 2.0).abs() < 1e-12);
        assert!((opt_bruteforce(&inst).unwrap().length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn open_line_optimum() {
        let inst = Instance::perfect(MetricSpace::Line, vec![(Point::Line(1.5), 1.5)], Variant::Open).unwrap();
        assert!((opt_bruteforce(&inst).unwrap().length - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_request_closed() {
        for (d, t) in [(1.0, 0.5), (1.0, 3.0), (2.0, 2.0)] {
            let inst = Instance::perfect(MetricSpace::Line, vec![(Point::Line(d), t)], Variant::Closed).unwrap();
            let want = f64::max(t, d) + d;
            assert!((opt_bruteforce(&inst).unwrap().length - want).abs() < 1e-12);
            assert!((opt_release_dp(&inst).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn serving_path_lengths_on_the_line() {
        let reqs = vec![(Point::Line(-1.0), 0.0), (Point::Line(1.0), 0.0)];
        let c = Instance::perfect(MetricSpace::Line, reqs.clone(), Variant::Closed).unwrap();
        let o = Instance::perfect(MetricSpace::Line, reqs, Variant::Open).unwrap();
        assert!((shortest_serving_path_length(&c).unwrap() - 4.0).abs() < 1e-12);
        assert!((shortest_serving_path_length(&o).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::perfect(MetricSpace::Line, vec![], Variant::Closed).unwrap();
        assert_eq!(opt_bruteforce(&inst).unwrap().length, 0.0);
        assert_eq!(opt_release_dp(&inst).unwrap(), 0.0);
    }
}
