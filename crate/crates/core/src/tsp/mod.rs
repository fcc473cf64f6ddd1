//! Exact offline solvers: classical TSP paths (no release times) for every
//! space family, and release-time-aware optima used as the OPT denominator.

pub mod flower;
pub mod held_karp;
pub mod release;
pub mod ring;
pub mod tree;

pub use held_karp::{held_karp_matrix, MatrixEnd, HELD_KARP_CAP};
pub use release::{eval_serving_order, opt_bruteforce, opt_release_dp, shortest_serving_path_length, BRUTEFORCE_CAP, RELEASE_DP_CAP};
pub use tree::{last_visit_nodes, tree_scan, NodeEnd, TreeIndex};

use crate::error::{Error, Result};
use crate::space::{line_span, trim_tree, MetricSpace, Point};
use crate::TOL;
use flower::{flower_walk, FlowerEnd};
use ring::{ring_walk, PosEnd};

/// End condition of a classical path query.
#[derive(Clone, Debug, PartialEq)]
pub enum End {
    Fixed(Point),
    Free,
    Closed,
}

/// An optimal classical path. `order` indexes the query's required points in
/// serving order; `walk` lists waypoints joined by geodesic legs.
#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub length: f64,
    pub order: Vec<usize>,
    pub walk: Vec<Point>,
}

/// Length of the route start → pts[order[0]] → … (→ end).
pub fn route_length(space: &MetricSpace, start: &Point, pts: &[Point], order: &[usize], end: &End) -> f64 {
    let mut cur = start;
    let mut len = 0.0;
    for &i in order {
        len += space.dist(cur, &pts[i]);
        cur = &pts[i];
    }
    len + match end {
        End::Fixed(e) => space.dist(cur, e),
        End::Free => 0.0,
        End::Closed => space.dist(cur, start),
    }
}

/// Orders `pts` by their last visit along `walk` (ties by index). Legs of the
/// walk must be geodesics; a point is on a leg when it is metrically between
/// the leg's ends.
pub fn last_visit_order(space: &MetricSpace, walk: &[Point], pts: &[Point]) -> Vec<usize> {
    let mut last = vec![f64::NEG_INFINITY; pts.len()];
    let mut clock = 0.0;
    if let Some(first) = walk.first() {
        for (i, p) in pts.iter().enumerate() {
            if space.dist(first, p) <= TOL {
                last[i] = 0.0;
            }
        }
    }
    for leg in walk.windows(2) {
        let (a, b) = (&leg[0], &leg[1]);
        let l = space.dist(a, b);
        for (i, p) in pts.iter().enumerate() {
            let da = space.dist(a, p);
            if da + space.dist(p, b) <= l + TOL {
                last[i] = clock + da;
            }
        }
        clock += l;
    }
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&i, &j| last[i].partial_cmp(&last[j]).unwrap().then(i.cmp(&j)));
    idx
}

fn normalize_all(space: &MetricSpace, start: &Point, required: &[Point], end: &End) -> Result<(Point, Vec<Point>, End)> {
    let s = space.normalize(start)?;
    let req = required.iter().map(|p| space.normalize(p)).collect::<Result<Vec<_>>>()?;
    let e = match end {
        End::Fixed(p) => End::Fixed(space.normalize(p)?),
        other => other.clone(),
    };
    Ok((s, req, e))
}

/// Exact bitmask DP over the metric induced on start, required and end.
pub fn held_karp(space: &MetricSpace, start: &Point, required: &[Point], end: &End) -> Result<OptResult> {
    let (s, req, e) = normalize_all(space, start, required, end)?;
    let mut pts = vec![s.clone()];
    pts.extend(req.iter().cloned());
    if let End::Fixed(p) = &e {
        pts.push(p.clone());
    }
    let d: Vec<Vec<f64>> = pts.iter().map(|a| pts.iter().map(|b| space.dist(a, b)).collect()).collect();
    let idx: Vec<usize> = (1..=req.len()).collect();
    let mend = match e {
        End::Fixed(_) => MatrixEnd::Fixed(pts.len() - 1),
        End::Free => MatrixEnd::Free,
        End::Closed => MatrixEnd::Closed,
    };
    let (length, order) = held_karp_matrix(&d, 0, &idx, mend)?;
    let mut walk = vec![s.clone()];
    walk.extend(order.iter().map(|&i| req[i].clone()));
    match e {
        End::Fixed(p) => walk.push(p),
        End::Closed => walk.push(s),
        End::Free => {}
    }
    Ok(OptResult { length, order, walk })
}

/// Tree (or line) solver: twice the span minus the start–end distance.
pub fn tree_tsp(space: &MetricSpace, start: &Point, required: &[Point], end: &End) -> Result<OptResult> {
    let (s, req, e) = normalize_all(space, start, required, end)?;
    let mut pts = vec![s];
    pts.extend(req.iter().cloned());
    if let End::Fixed(p) = &e {
        pts.push(p.clone());
    }
    let (span, nodes) = match space {
        MetricSpace::Line => {
            let xs: Vec<f64> = pts.iter().map(|p| if let Point::Line(x) = p { *x } else { unreachable!() }).collect();
            line_span(&xs)
        }
        MetricSpace::Tree(t) => {
            let tp: Vec<(usize, f64)> = pts
                .iter()
                .map(|p| if let Point::Tree { edge, offset } = p { (*edge, *offset) } else { unreachable!() })
                .collect();
            trim_tree(t, &tp)
        }
        _ => return Err(Error::IncompatibleOracle { oracle: "tree solver", space: space.kind().name() }),
    };
    let index = TreeIndex::new(&span);
    let targets = &nodes[1..=req.len()];
    let nend = match e {
        End::Fixed(_) => NodeEnd::Fixed(*nodes.last().unwrap()),
        End::Free => NodeEnd::Free,
        End::Closed => NodeEnd::Closed,
    };
    let (length, node_walk) = index.walk(nodes[0], targets, nend);
    let order = last_visit_nodes(&node_walk, targets, span.node_count());
    let walk = node_walk.iter().map(|&v| span.label[v].clone()).collect();
    Ok(OptResult { length, order, walk })
}

/// Ring solver: best of the full loop and every one-gap zig-zag.
pub fn ring_tsp(space: &MetricSpace, start: &Point, required: &[Point], end: &End) -> Result<OptResult> {
    let (s, req, e) = normalize_all(space, start, required, end)?;
    let MetricSpace::Ring { circumference: c } = space else {
        return Err(Error::IncompatibleOracle { oracle: "ring solver", space: space.kind().name() });
    };
    let pos = |p: &Point| if let Point::Ring(x) = p { *x } else { unreachable!() };
    let pts: Vec<f64> = req.iter().map(pos).collect();
    let pend = match &e {
        End::Fixed(p) => PosEnd::Fixed(pos(p)),
        End::Free => PosEnd::Free,
        End::Closed => PosEnd::Closed,
    };
    let (length, way) = ring_walk(*c, pos(&s), &pts, pend);
    let walk: Vec<Point> = way.into_iter().map(Point::Ring).collect();
    let order = last_visit_order(space, &walk, &req);
    Ok(OptResult { length, order, walk })
}

/// Flower solver: per-component loop-or-zig-zag decisions joined at the origin.
pub fn flower_tsp(space: &MetricSpace, start: &Point, required: &[Point], end: &End) -> Result<OptResult> {
    let (s, req, e) = normalize_all(space, start, required, end)?;
    let MetricSpace::Flower(f) = space else {
        return Err(Error::IncompatibleOracle { oracle: "flower solver", space: space.kind().name() });
    };
    let fp = |p: &Point| if let Point::Flower { part, offset } = p { (*part, *offset) } else { unreachable!() };
    let pts: Vec<_> = req.iter().map(fp).collect();
    let fend = match &e {
        End::Fixed(p) => FlowerEnd::Fixed(fp(p)),
        End::Free => FlowerEnd::Free,
        End::Closed => FlowerEnd::Closed,
    };
    let (length, way) = flower_walk(f, fp(&s), &pts, fend);
    let walk: Vec<Point> = way.into_iter().map(|(part, offset)| Point::Flower { part, offset }).collect();
    let order = last_visit_order(space, &walk, &req);
    Ok(OptResult { length, order, walk })
}

/// Dispatches to the specialized solver of the space.
pub fn classical_path(space: &MetricSpace, start: &Point, required: &[Point], end: &End) -> Result<OptResult> {
    match space {
        MetricSpace::Line | MetricSpace::Tree(_) => tree_tsp(space, start, required, end),
        MetricSpace::Ring { .. } => ring_tsp(space, start, required, end),
        MetricSpace::Flower(_) => flower_tsp(space, start, required, end),
        MetricSpace::Euclid2D | MetricSpace::General(_) => held_karp(space, start, required, end),
    }
}
