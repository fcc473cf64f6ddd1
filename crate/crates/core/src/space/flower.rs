//! Flowers: rings (petals) and a segment (stem) glued at the origin.

use super::tree::SpanTree;
use super::Point;
use crate::TOL;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    Petal(usize),
    Stem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Flower {
    pub petals: Vec<f64>,
    pub stem: f64,
}

impl Flower {
    pub fn origin() -> Point {
        Point::Flower { part: Part::Stem, offset: 0.0 }
    }

    pub fn is_origin(part: Part, offset: f64, petals: &[f64]) -> bool {
        match part {
            Part::Stem => offset <= TOL,
            Part::Petal(i) => offset <= TOL || offset >= petals[i] - TOL,
        }
    }

    /// Distance to the origin along the shorter way.
    pub fn radius(&self, part: Part, offset: f64) -> f64 {
        match part {
            Part::Stem => offset,
            Part::Petal(i) => offset.min(self.petals[i] - offset),
        }
    }

    pub fn distance(&self, a: (Part, f64), b: (Part, f64)) -> f64 {
        if a.0 == b.0 {
            let d = (a.1 - b.1).abs();
            match a.0 {
                Part::Stem => d,
                Part::Petal(i) => d.min(self.petals[i] - d),
            }
        } else {
            self.radius(a.0, a.1) + self.radius(b.0, b.1)
        }
    }

    pub fn normalize(&self, part: Part, offset: f64) -> (Part, f64) {
        if Flower::is_origin(part, offset, &self.petals) {
            (Part::Stem, 0.0)
        } else {
            (part, offset)
        }
    }

    pub fn move_along(&self, a: (Part, f64), b: (Part, f64), s: f64) -> (Part, f64) {
        if a.0 == b.0 {
            return match a.0 {
                Part::Stem => {
                    let o = if b.1 >= a.1 { a.1 + s } else { a.1 - s };
                    self.normalize(Part::Stem, o)
                }
                Part::Petal(i) => {
                    let p = self.petals[i];
                    let o = super::ring_step(p, a.1, b.1, s);
                    self.normalize(Part::Petal(i), o)
                }
            };
        }
        let ra = self.radius(a.0, a.1);
        if s <= ra {
            match a.0 {
                Part::Stem => self.normalize(Part::Stem, a.1 - s),
                Part::Petal(i) => {
                    let o = super::ring_step(self.petals[i], a.1, 0.0, s);
                    self.normalize(Part::Petal(i), o)
                }
            }
        } else {
            let out = s - ra;
            match b.0 {
                Part::Stem => self.normalize(Part::Stem, out),
                Part::Petal(i) => {
                    let o = super::ring_step(self.petals[i], 0.0, b.1, out);
                    self.normalize(Part::Petal(i), o)
                }
            }
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, &p) in self.petals.iter().enumerate() {
            if p.is_nan() || p <= 0.0 {
                out.push(format!("petal {i} has nonpositive length {p}"));
            }
        }
        if self.stem.is_nan() || self.stem < 0.0 {
            out.push(format!("stem has negative length {}", self.stem));
        }
        out
    }
}

/// A flower whose non-kept petals were cut at their half-points.
#[derive(Clone, Debug)]
pub struct Snipped {
    pub tree: SpanTree,
    pub kept: Vec<usize>,
    /// Per petal, the (clockwise, counter-clockwise) branch tips when snipped.
    pub branches: Vec<Option<(usize, usize)>>,
    pub stem_tip: Option<usize>,
}

impl Snipped {
    /// Branch tip and depth of a point in the tree part; `None` on kept petals.
    pub fn locate(&self, flower: &Flower, part: Part, offset: f64) -> Option<(usize, f64)> {
        if Flower::is_origin(part, offset, &flower.petals) {
            return Some((self.tree.root, 0.0));
        }
        match part {
            Part::Stem => self.stem_tip.map(|t| (t, offset)),
            Part::Petal(i) => {
                let (cw, ccw) = self.branches[i]?;
                let p = flower.petals[i];
                if offset <= p / 2.0 + TOL {
                    Some((cw, offset))
                } else {
                    Some((ccw, p - offset))
                }
            }
        }
    }
}

/// Replaces every petal not in `keep` with two branches of half its length.
pub fn snip_flower(flower: &Flower, keep: &[usize]) -> Snipped {
    let mut tree = SpanTree::single(Flower::origin());
    let mut branches = vec![None; flower.petals.len()];
    for (i, &p) in flower.petals.iter().enumerate() {
        if keep.contains(&i) {
            continue;
        }
        let half = Point::Flower { part: Part::Petal(i), offset: p / 2.0 };
        let cw = tree.add_child(0, p / 2.0, half.clone(), false);
        let ccw = tree.add_child(0, p / 2.0, half, false);
        branches[i] = Some((cw, ccw));
    }
    let stem_tip = (flower.stem > 0.0).then(|| {
        tree.add_child(0, flower.stem, Point::Flower { part: Part::Stem, offset: flower.stem }, false)
    });
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    Snipped { tree, kept, branches, stem_tip }
}
