//! Metric spaces: the line, the plane, trees, rings, flowers and finite
//! metrics. Each supplies distances and canonical unit-speed motion.

pub mod flower;
pub mod general;
mod json;
pub mod tree;

pub use flower::{snip_flower, Flower, Part, Snipped};
pub use general::GeneralMetric;
pub use json::SpaceDesc;
pub use tree::{line_span, trim_tree, SpanTree, WeightedTree};

use crate::error::{Error, Result};
use crate::TOL;
use general::Loc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Line,
    Euclid2D,
    Tree,
    Ring,
    Flower,
    General,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Line => "line",
            SpaceKind::Euclid2D => "euclid2d",
            SpaceKind::Tree => "tree",
            SpaceKind::Ring => "ring",
            SpaceKind::Flower => "flower",
            SpaceKind::General => "general",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpace {
    Line,
    Euclid2D,
    Tree(WeightedTree),
    Ring { circumference: f64 },
    Flower(Flower),
    General(GeneralMetric),
}

/// A location in some metric space. Tree points name the edge by its child
/// node (edge 0 is the root itself) and measure the offset from the parent.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Line(f64),
    Plane(f64, f64),
    Tree { edge: usize, offset: f64 },
    Ring(f64),
    Flower { part: Part, offset: f64 },
    Site(usize),
    Between { from: usize, to: usize, traveled: f64 },
}

/// Position after moving `s` from `a` toward `b` on a circle of length `c`,
/// along the shorter arc (clockwise = increasing on ties).
pub(crate) fn ring_step(c: f64, a: f64, b: f64, s: f64) -> f64 {
    let cw = (b - a).rem_euclid(c);
    let pos = if cw <= c - cw + TOL { a + s } else { a - s };
    let r = pos.rem_euclid(c);
    if r >= c - TOL {
        0.0
    } else {
        r
    }
}

pub(crate) fn ring_dist(c: f64, a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(c);
    d.min(c - d)
}

impl MetricSpace {
    pub fn ring(circumference: f64) -> Self {
        MetricSpace::Ring { circumference }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            MetricSpace::Line => SpaceKind::Line,
            MetricSpace::Euclid2D => SpaceKind::Euclid2D,
            MetricSpace::Tree(_) => SpaceKind::Tree,
            MetricSpace::Ring { .. } => SpaceKind::Ring,
            MetricSpace::Flower(_) => SpaceKind::Flower,
            MetricSpace::General(_) => SpaceKind::General,
        }
    }

    pub fn origin(&self) -> Point {
        match self {
            MetricSpace::Line => Point::Line(0.0),
            MetricSpace::Euclid2D => Point::Plane(0.0, 0.0),
            MetricSpace::Tree(_) => Point::Tree { edge: 0, offset: 0.0 },
            MetricSpace::Ring { .. } => Point::Ring(0.0),
            MetricSpace::Flower(_) => Flower::origin(),
            MetricSpace::General(_) => Point::Site(0),
        }
    }

    /// Empty iff the space invariants hold.
    pub fn validate(&self) -> Vec<String> {
        match self {
            MetricSpace::Line | MetricSpace::Euclid2D => Vec::new(),
            MetricSpace::Tree(t) => t.violations(),
            MetricSpace::Ring { circumference } => {
                if circumference.is_finite() && *circumference > 0.0 {
                    Vec::new()
                } else {
                    vec![format!("ring circumference {circumference} must be positive")]
                }
            }
            MetricSpace::Flower(f) => f.violations(),
            MetricSpace::General(g) => g.violations(),
        }
    }

    fn bad(&self, p: &Point) -> Error {
        Error::WrongPoint(format!("{p:?}"), self.kind().name())
    }

    /// Checks membership and returns the canonical form of `p`.
    pub fn normalize(&self, p: &Point) -> Result<Point> {
        let finite = |x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::OutOfSpace(format!("non-finite coordinate in {p:?}")))
            }
        };
        match (self, p) {
            (MetricSpace::Line, Point::Line(x)) => finite(*x).map(|_| p.clone()),
            (MetricSpace::Euclid2D, Point::Plane(x, y)) => {
                finite(*x)?;
                finite(*y).map(|_| p.clone())
            }
            (MetricSpace::Tree(t), Point::Tree { edge, offset }) => {
                finite(*offset)?;
                let (e, o) = t.normalize(*edge, *offset)?;
                Ok(Point::Tree { edge: e, offset: o })
            }
            (MetricSpace::Ring { circumference: c }, Point::Ring(x)) => {
                finite(*x)?;
                if *x < -TOL || *x > c + TOL {
                    return Err(Error::OutOfSpace(format!("ring position {x} outside [0, {c})")));
                }
                let r = x.rem_euclid(*c);
                Ok(Point::Ring(if r >= c - TOL { 0.0 } else { r }))
            }
            (MetricSpace::Flower(f), Point::Flower { part, offset }) => {
                finite(*offset)?;
                let cap = match part {
                    Part::Stem => f.stem,
                    Part::Petal(i) => *f.petals.get(*i).ok_or_else(|| {
                        Error::OutOfSpace(format!("petal {i} does not exist"))
                    })?,
                };
                if *offset < -TOL || *offset > cap + TOL {
                    return Err(Error::OutOfSpace(format!("offset {offset} outside [0, {cap}]")));
                }
                let (part, offset) = f.normalize(*part, offset.clamp(0.0, cap));
                Ok(Point::Flower { part, offset })
            }
            (MetricSpace::General(g), Point::Site(i)) => {
                if *i < g.size() {
                    Ok(p.clone())
                } else {
                    Err(Error::OutOfSpace(format!("site {i} does not exist")))
                }
            }
            (MetricSpace::General(g), Point::Between { from, to, traveled }) => {
                if *from >= g.size() || *to >= g.size() {
                    return Err(Error::OutOfSpace(format!("edge ({from},{to}) does not exist")));
                }
                let l = g.d(*from, *to);
                if *traveled < -TOL || *traveled > l + TOL {
                    return Err(Error::OutOfSpace(format!("traveled {traveled} outside [0, {l}]")));
                }
                Ok(from_loc(g.normalize(Loc::Edge(*from, *to, traveled.clamp(0.0, l)))))
            }
            _ => Err(self.bad(p)),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.normalize(p).is_ok()
    }

    /// Checked distance.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        let a = self.normalize(a)?;
        let b = self.normalize(b)?;
        Ok(self.dist(&a, &b))
    }

    /// Distance between points already known to belong to the space.
    pub fn dist(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (MetricSpace::Line, Point::Line(x), Point::Line(y)) => (x - y).abs(),
            (MetricSpace::Euclid2D, Point::Plane(x1, y1), Point::Plane(x2, y2)) => {
                (x1 - x2).hypot(y1 - y2)
            }
            (MetricSpace::Tree(t), Point::Tree { edge: e1, offset: o1 }, Point::Tree { edge: e2, offset: o2 }) => {
                t.distance((*e1, *o1), (*e2, *o2))
            }
            (MetricSpace::Ring { circumference }, Point::Ring(x), Point::Ring(y)) => {
                ring_dist(*circumference, *x, *y)
            }
            (MetricSpace::Flower(f), Point::Flower { part: p1, offset: o1 }, Point::Flower { part: p2, offset: o2 }) => {
                f.distance((*p1, *o1), (*p2, *o2))
            }
            (MetricSpace::General(g), a, b) => match (to_loc(a), to_loc(b)) {
                (Some(x), Some(y)) => g.distance(x, y),
                _ => panic!("{}", self.bad(if to_loc(a).is_none() { a } else { b })),
            },
            _ => panic!("points {a:?} and {b:?} do not belong to a {} space", self.kind().name()),
        }
    }

    /// The point at distance `traveled` from `from` on the canonical geodesic to `to`.
    pub fn move_along(&self, from: &Point, to: &Point, traveled: f64) -> Result<Point> {
        let from = self.normalize(from)?;
        let to = self.normalize(to)?;
        let d = self.dist(&from, &to);
        if !(traveled >= -TOL && traveled <= d + TOL) {
            return Err(Error::TraveledOutOfRange { traveled, dist: d });
        }
        Ok(self.step(&from, &to, traveled.clamp(0.0, d)))
    }

    /// Unchecked motion used by the simulator.
    pub fn step(&self, from: &Point, to: &Point, s: f64) -> Point {
        let d = self.dist(from, to);
        if s <= TOL {
            return from.clone();
        }
        if s >= d - TOL {
            return to.clone();
        }
        match (self, from, to) {
            (MetricSpace::Line, Point::Line(x), Point::Line(y)) => {
                Point::Line(if y >= x { x + s } else { x - s })
            }
            (MetricSpace::Euclid2D, Point::Plane(x1, y1), Point::Plane(x2, y2)) => {
                let f = s / d;
                Point::Plane(x1 + f * (x2 - x1), y1 + f * (y2 - y1))
            }
            (MetricSpace::Tree(t), Point::Tree { edge: e1, offset: o1 }, Point::Tree { edge: e2, offset: o2 }) => {
                let (edge, offset) = t.move_along((*e1, *o1), (*e2, *o2), s);
                Point::Tree { edge, offset }
            }
            (MetricSpace::Ring { circumference }, Point::Ring(x), Point::Ring(y)) => {
                Point::Ring(ring_step(*circumference, *x, *y, s))
            }
            (MetricSpace::Flower(f), Point::Flower { part: p1, offset: o1 }, Point::Flower { part: p2, offset: o2 }) => {
                let (part, offset) = f.move_along((*p1, *o1), (*p2, *o2), s);
                Point::Flower { part, offset }
            }
            (MetricSpace::General(g), a, b) => {
                let (Some(x), Some(y)) = (to_loc(a), to_loc(b)) else { panic!("{}", self.bad(a)) };
                from_loc(g.move_along(x, y, s))
            }
            _ => panic!("points {from:?} and {to:?} do not belong to a {} space", self.kind().name()),
        }
    }

    /// Whether `z` lies on a geodesic between `a` and `b`.
    pub fn between(&self, a: &Point, z: &Point, b: &Point) -> bool {
        self.dist(a, z) + self.dist(z, b) <= self.dist(a, b) + TOL
    }

    /// Multiplies every length by `c > 0` and maps `points` accordingly.
    pub fn scaled(&self, c: f64) -> MetricSpace {
        match self {
            MetricSpace::Line => MetricSpace::Line,
            MetricSpace::Euclid2D => MetricSpace::Euclid2D,
            MetricSpace::Tree(t) => {
                let edges: Vec<_> = t.edges().into_iter().map(|(p, v, l)| (p, v, l.map(|x| x * c))).collect();
                MetricSpace::Tree(WeightedTree::from_edges(&edges).expect("scaling keeps a tree"))
            }
            MetricSpace::Ring { circumference } => MetricSpace::Ring { circumference: circumference * c },
            MetricSpace::Flower(f) => MetricSpace::Flower(Flower {
                petals: f.petals.iter().map(|p| p * c).collect(),
                stem: f.stem * c,
            }),
            MetricSpace::General(g) => MetricSpace::General(GeneralMetric {
                sites: g.sites.clone(),
                matrix: g.matrix.iter().map(|r| r.iter().map(|x| x * c).collect()).collect(),
            }),
        }
    }

    pub fn scale_point(&self, p: &Point, c: f64) -> Point {
        match p {
            Point::Line(x) => Point::Line(x * c),
            Point::Plane(x, y) => Point::Plane(x * c, y * c),
            Point::Tree { edge, offset } => Point::Tree { edge: *edge, offset: offset * c },
            Point::Ring(x) => Point::Ring(x * c),
            Point::Flower { part, offset } => Point::Flower { part: *part, offset: offset * c },
            Point::Site(i) => Point::Site(*i),
            Point::Between { from, to, traveled } => Point::Between { from: *from, to: *to, traveled: traveled * c },
        }
    }
}

fn to_loc(p: &Point) -> Option<Loc> {
    match p {
        Point::Site(i) => Some(Loc::Site(*i)),
        Point::Between { from, to, traveled } => Some(Loc::Edge(*from, *to, *traveled)),
        _ => None,
    }
}

fn from_loc(l: Loc) -> Point {
    match l {
        Loc::Site(i) => Point::Site(i),
        Loc::Edge(from, to, traveled) => Point::Between { from, to, traveled },
    }
}
