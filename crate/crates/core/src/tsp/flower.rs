//! Classical TSP on flowers. The origin is a cut vertex, so an optimal walk
//! leaves the start component once, tours every other component as a closed
//! excursion and finishes inside the end component.

use super::ring::{ring_walk, segment_walk, PosEnd};
use crate::space::{Flower, Part};
use crate::TOL;

pub type FPos = (Part, f64);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowerEnd {
    Fixed(FPos),
    Free,
    Closed,
}

fn part_of(f: &Flower, p: FPos) -> Option<Part> {
    (!Flower::is_origin(p.0, p.1, &f.petals)).then_some(p.0)
}

fn component_walk(f: &Flower, part: Part, s: f64, pts: &[f64], end: PosEnd) -> (f64, Vec<FPos>) {
    match part {
        Part::Petal(i) => {
            let (len, way) = ring_walk(f.petals[i], s, pts, end);
            (len, way.into_iter().map(|o| f.normalize(part, o)).collect())
        }
        Part::Stem => {
            let mut lo = s;
            let mut hi = s;
            for &x in pts {
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if let PosEnd::Fixed(e) = end {
                lo = lo.min(e);
                hi = hi.max(e);
            }
            if pts.is_empty() {
                let e = match end {
                    PosEnd::Fixed(e) => e,
                    _ => s,
                };
                let way = if (e - s).abs() <= TOL { vec![s] } else { vec![s, e] };
                return ((e - s).abs(), way.into_iter().map(|o| f.normalize(part, o)).collect());
            }
            let (len, way) = segment_walk(s, end, lo, hi);
            (len, way.into_iter().map(|o| f.normalize(part, o)).collect())
        }
    }
}

fn components(f: &Flower) -> Vec<Part> {
    (0..f.petals.len()).map(Part::Petal).chain(std::iter::once(Part::Stem)).collect()
}

/// Optimal walk with a fixed end (or closed, `e == s`).
fn fixed_walk(f: &Flower, s: FPos, pts: &[FPos], e: FPos) -> (f64, Vec<FPos>) {
    let cs = part_of(f, s);
    let ce = part_of(f, e);
    let offs = |c: Part| -> Vec<f64> {
        pts.iter().filter(|p| part_of(f, **p) == Some(c)).map(|p| p.1).collect()
    };
    let mut total = 0.0;
    let mut excursions: Vec<FPos> = Vec::new();
    for c in components(f) {
        if Some(c) == cs || Some(c) == ce {
            continue;
        }
        let o = offs(c);
        if o.is_empty() {
            continue;
        }
        let (len, way) = component_walk(f, c, 0.0, &o, PosEnd::Closed);
        total += len;
        excursions.extend(way.into_iter().skip(1));
    }
    if cs.is_some() && cs == ce {
        let c = cs.unwrap();
        let mut o = offs(c);
        let need_origin = !excursions.is_empty();
        if need_origin {
            o.push(0.0);
        }
        let (len, way) = component_walk(f, c, s.1, &o, PosEnd::Fixed(e.1));
        total += len;
        if !need_origin {
            return (total, way);
        }
        // Splice the excursions in at the first pass through the origin.
        let o_pos: FPos = (Part::Stem, 0.0);
        let mut out = vec![way[0]];
        let mut spliced = false;
        for pair in way.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if !spliced {
                let da = f.distance(a, o_pos);
                let db = f.distance(o_pos, b);
                if da + db <= f.distance(a, b) + TOL {
                    if da > TOL {
                        out.push(o_pos);
                    }
                    out.extend(excursions.iter().copied());
                    spliced = true;
                }
            }
            out.push(b);
        }
        if !spliced {
            out.extend(excursions.iter().copied());
        }
        return (total, out);
    }
    let mut way = vec![s];
    if let Some(c) = cs {
        let (len, w) = component_walk(f, c, s.1, &offs(c), PosEnd::Fixed(0.0));
        total += len;
        way.extend(w.into_iter().skip(1));
    }
    way.extend(excursions);
    if let Some(c) = ce {
        let (len, w) = component_walk(f, c, 0.0, &offs(c), PosEnd::Fixed(e.1));
        total += len;
        way.extend(w.into_iter().skip(1));
    }
    (total, way)
}

/// Optimal walk from `s` covering `pts`; free ends are chosen among `pts`.
pub fn flower_walk(f: &Flower, s: FPos, pts: &[FPos], end: FlowerEnd) -> (f64, Vec<FPos>) {
    match end {
        FlowerEnd::Fixed(e) => fixed_walk(f, s, pts, e),
        FlowerEnd::Closed => fixed_walk(f, s, pts, s),
        FlowerEnd::Free => {
            if pts.is_empty() {
                return (0.0, vec![s]);
            }
            let mut best = (f64::INFINITY, Vec::new());
            for &e in pts {
                let cand = fixed_walk(f, s, pts, e);
                if cand.0 < best.0 - TOL {
                    best = cand;
                }
            }
            best
        }
    }
}
