//! Route statistics of serving orders: length, released fraction and the
//! prediction error.

use super::{Instance, Variant};
use crate::error::Result;
use crate::space::{MetricSpace, Point};
use crate::tsp::shortest_serving_path_length;

/// ℓ of the route origin → points[perm[0]] → … (→ origin if closed).
pub fn route_length(space: &MetricSpace, origin: &Point, points: &[Point], perm: &[usize], variant: Variant) -> f64 {
    let mut cur = origin;
    let mut len = 0.0;
    for &i in perm {
        len += space.dist(cur, &points[i]);
        cur = &points[i];
    }
    if variant == Variant::Closed {
        len += space.dist(cur, origin);
    }
    len
}

/// α at time `t`: share of the route up to (and including the leg into) the
/// first unreleased request. 1 when everything is released or the route has
/// length zero.
pub fn released_fraction(
    space: &MetricSpace,
    origin: &Point,
    points: &[Point],
    releases: &[f64],
    perm: &[usize],
    variant: Variant,
    t: f64,
) -> f64 {
    let total = route_length(space, origin, points, perm, variant);
    if total <= 0.0 {
        return 1.0;
    }
    let mut cur = origin;
    let mut prefix = 0.0;
    for &i in perm {
        prefix += space.dist(cur, &points[i]);
        if releases[i] > t {
            return prefix / total;
        }
        cur = &points[i];
    }
    1.0
}

pub fn beta(alpha: f64) -> f64 {
    alpha.min(0.5)
}

/// η: total displacement of predictions over the classical serving length F
/// of the true locations; 0 when F = 0.
pub fn prediction_error(inst: &Instance) -> Result<f64> {
    let f = shortest_serving_path_length(inst)?;
    if f <= 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = inst
        .requests
        .iter()
        .zip(&inst.predictions)
        .map(|(r, p)| inst.space.dist(&r.location, p))
        .sum();
    Ok(sum / f)
}

/// Route statistics over a fixed point set, backed by a distance matrix with
/// the origin at index 0.
#[derive(Clone, Debug)]
pub struct RouteTable {
    pub d: Vec<Vec<f64>>,
    pub variant: Variant,
}

impl RouteTable {
    pub fn new(space: &MetricSpace, origin: &Point, points: &[Point], variant: Variant) -> Self {
        let mut all = vec![origin.clone()];
        all.extend(points.iter().cloned());
        let d = all.iter().map(|a| all.iter().map(|b| space.dist(a, b)).collect()).collect();
        RouteTable { d, variant }
    }

    pub fn length(&self, perm: &[usize]) -> f64 {
        let mut cur = 0;
        let mut len = 0.0;
        for &i in perm {
            len += self.d[cur][i + 1];
            cur = i + 1;
        }
        if self.variant == Variant::Closed {
            len += self.d[cur][0];
        }
        len
    }

    /// (ℓ, α) given the released flags.
    pub fn stats(&self, perm: &[usize], released: &[bool]) -> (f64, f64) {
        let total = self.length(perm);
        if total <= 0.0 {
            return (total, 1.0);
        }
        let mut cur = 0;
        let mut prefix = 0.0;
        for &i in perm {
            prefix += self.d[cur][i + 1];
            if !released[i] {
                return (total, prefix / total);
            }
            cur = i + 1;
        }
        (total, 1.0)
    }
}
