//! Finite metrics given by a distance matrix. A moving server sits on an edge
//! of the complete graph over the sites; distances to such points use the
//! induced graph metric.

use crate::TOL;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralMetric {
    pub sites: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

/// A point of a general metric: a site, or `traveled` along the edge a→b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Loc {
    Site(usize),
    Edge(usize, usize, f64),
}

impl GeneralMetric {
    pub fn new(matrix: Vec<Vec<f64>>) -> Self {
        let sites = (0..matrix.len()).map(|i| format!("s{i}")).collect();
        GeneralMetric { sites, matrix }
    }

    /// The shortest-path metric of a weighted graph given as a matrix with
    /// `f64::INFINITY` for missing edges.
    pub fn from_graph(sites: Vec<String>, mut d: Vec<Vec<f64>>) -> Self {
        let m = d.len();
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        GeneralMetric { sites, matrix: d }
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    pub fn d(&self, a: usize, b: usize) -> f64 {
        self.matrix[a][b]
    }

    pub fn violations(&self) -> Vec<String> {
        let n = self.matrix.len();
        let mut out = Vec::new();
        if n == 0 {
            out.push("general metric needs at least the origin site".into());
        }
        if !self.sites.is_empty() && self.sites.len() != n {
            out.push(format!("{} site names for a {n}x{n} matrix", self.sites.len()));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                out.push(format!("row {i} has {} entries, expected {n}", row.len()));
                return out;
            }
        }
        for i in 0..n {
            if self.matrix[i][i].abs() > TOL {
                out.push(format!("d({i},{i}) = {} is not zero", self.matrix[i][i]));
            }
            for j in 0..n {
                let v = self.matrix[i][j];
                if !v.is_finite() || v < 0.0 {
                    out.push(format!("d({i},{j}) = {v} is not a finite nonnegative length"));
                }
                if j > i && (v - self.matrix[j][i]).abs() > TOL {
                    out.push(format!("d({i},{j}) = {v} differs from d({j},{i}) = {}", self.matrix[j][i]));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let direct = self.matrix[i][k];
                    let via = self.matrix[i][j] + self.matrix[j][k];
                    if i < k && direct > via + TOL {
                        out.push(format!("triangle violated: d({i},{k}) = {direct} > d({i},{j}) + d({j},{k}) = {via}"));
                    }
                }
            }
        }
        out
    }

    /// Exit options of a location: (site, cost to reach it).
    fn exits(&self, z: Loc) -> [(usize, f64); 2] {
        match z {
            Loc::Site(a) => [(a, 0.0), (a, 0.0)],
            Loc::Edge(a, b, t) => [(a, t), (b, self.d(a, b) - t)],
        }
    }

    fn same_edge(z: Loc, w: Loc, d_ab: impl Fn(usize, usize) -> f64) -> Option<f64> {
        match (z, w) {
            (Loc::Edge(a, b, t), Loc::Edge(c, e, u)) => {
                if a == c && b == e {
                    Some((t - u).abs())
                } else if a == e && b == c {
                    Some((t - (d_ab(a, b) - u)).abs())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub(crate) fn distance(&self, z: Loc, w: Loc) -> f64 {
        if let Some(d) = Self::same_edge(z, w, |a, b| self.d(a, b)) {
            return d;
        }
        let mut best = f64::INFINITY;
        for (x, cx) in self.exits(z) {
            for (y, cy) in self.exits(w) {
                best = best.min(cx + self.d(x, y) + cy);
            }
        }
        best
    }

    /// Point `s` along the canonical geodesic z → w.
    pub(crate) fn move_along(&self, z: Loc, w: Loc, s: f64) -> Loc {
        if let Some(_) = Self::same_edge(z, w, |a, b| self.d(a, b)) {
            let (Loc::Edge(a, b, t), Loc::Edge(c, _, u)) = (z, w) else { unreachable!() };
            let target = if a == c { u } else { self.d(a, b) - u };
            let pos = if target >= t { t + s } else { t - s };
            return self.normalize(Loc::Edge(a, b, pos));
        }
        let mut best = (f64::INFINITY, 0usize, 0.0, 0usize, 0.0);
        for (x, cx) in self.exits(z) {
            for (y, cy) in self.exits(w) {
                let tot = cx + self.d(x, y) + cy;
                if tot < best.0 - TOL {
                    best = (tot, x, cx, y, cy);
                }
            }
        }
        let (_, x, cx, y, _) = best;
        if s <= cx {
            // still on the starting edge, heading for x
            return match z {
                Loc::Site(_) => z,
                Loc::Edge(a, b, t) => {
                    let pos = if x == a { t - s } else { t + s };
                    self.normalize(Loc::Edge(a, b, pos))
                }
            };
        }
        let s = s - cx;
        let mid = self.d(x, y);
        if s <= mid {
            return self.normalize(Loc::Edge(x, y, s));
        }
        let s = s - mid;
        match w {
            Loc::Site(_) => w,
            Loc::Edge(c, e, _) => {
                let pos = if y == c { s } else { self.d(c, e) - s };
                self.normalize(Loc::Edge(c, e, pos))
            }
        }
    }

    pub(crate) fn normalize(&self, z: Loc) -> Loc {
        match z {
            Loc::Site(_) => z,
            Loc::Edge(a, b, t) => {
                let l = self.d(a, b);
                if t <= TOL || a == b {
                    Loc::Site(a)
                } else if t >= l - TOL {
                    Loc::Site(b)
                } else {
                    z
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> GeneralMetric {
        GeneralMetric::new(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]])
    }

    #[test]
    fn unit_triangle_is_valid() {
        assert!(triangle().violations().is_empty());
    }

    #[test]
    fn triangle_violation_reported() {
        let m = GeneralMetric::new(vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]);
        let v = m.violations();
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].contains("triangle"));
    }

    #[test]
    fn interior_points_use_nearer_endpoint() {
        let m = triangle();
        let z = Loc::Edge(0, 1, 0.25);
        assert!((m.distance(z, Loc::Site(2)) - 1.25).abs() < 1e-12);
        assert!((m.distance(z, Loc::Edge(1, 0, 0.25)) - 0.5).abs() < 1e-12);
        let w = m.move_along(z, Loc::Site(2), 0.5);
        assert_eq!(w, Loc::Edge(0, 2, 0.25));
    }
}
