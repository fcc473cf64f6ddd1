//! Turning a dominator choice (A, q) into a serving order.

use super::{ids, Choice, OracleKind};
use crate::error::Result;
use crate::sim::Variant;
use crate::space::{line_span, trim_tree, Flower, MetricSpace, Part, Point, SpanTree};
use crate::tsp::flower::{flower_walk, FPos, FlowerEnd};
use crate::tsp::ring::{ring_walk, PosEnd};
use crate::tsp::{held_karp_matrix, last_visit_nodes, last_visit_order, MatrixEnd, NodeEnd, TreeIndex};

/// The span tree of the origin and the predictions, with per-node request
/// masks.
pub(crate) struct TreeCtx {
    pub span: SpanTree,
    pub index: TreeIndex,
    /// Node of each request.
    pub node_of: Vec<usize>,
    /// Requests sitting exactly at a node.
    pub at: Vec<u64>,
    /// Requests on the root path of a node (the node included).
    pub above: Vec<u64>,
    pub leaves: Vec<usize>,
    /// Root-to-leaf node paths (leaf first) and node depths.
    pub paths: Vec<Vec<usize>>,
    pub depth: Vec<f64>,
    /// Per distinct request node f: the same data for the tree hung from f.
    pub reroots: Vec<Rerooted>,
}

pub(crate) struct Rerooted {
    pub leaves: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
    pub depth: Vec<f64>,
}

impl TreeCtx {
    fn new(span: SpanTree, nodes: Vec<usize>, open: bool) -> Self {
        let root = nodes[0];
        debug_assert_eq!(root, span.root);
        let node_of: Vec<usize> = nodes[1..].to_vec();
        let m = span.node_count();
        let mut at = vec![0u64; m];
        for (i, &v) in node_of.iter().enumerate() {
            at[v] |= 1 << i;
        }
        let above: Vec<u64> = (0..m).map(|v| span.root_path(v).iter().fold(0, |a, &w| a | at[w])).collect();
        let leaves = span.leaves();
        let paths = leaves.iter().map(|&l| span.root_path(l)).collect();
        let depth = span.depths();
        let mut reroots = Vec::new();
        if open {
            let mut fs = node_of.clone();
            fs.sort_unstable();
            fs.dedup();
            for f in fs {
                let t = span.reroot(f);
                let leaves = t.leaves();
                let paths = leaves.iter().map(|&l| t.root_path(l)).collect();
                reroots.push(Rerooted { leaves, paths, depth: t.depths() });
            }
        }
        TreeCtx { index: TreeIndex::new(&span), span, node_of, at, above, leaves, paths, depth, reroots }
    }

    fn line(xs: &[f64], open: bool) -> Self {
        let mut all = vec![0.0];
        all.extend_from_slice(xs);
        let (span, nodes) = line_span(&all);
        TreeCtx::new(span, nodes, open)
    }

    fn order(&self, (a, q): Choice, n: usize, closed: bool) -> Vec<usize> {
        let root = self.span.root;
        let all: Vec<usize> = self.node_of.clone();
        let walk = match q {
            None => {
                let end = if closed { NodeEnd::Closed } else { NodeEnd::Free };
                self.index.walk(root, &all, end).1
            }
            Some(q) => {
                let first: Vec<usize> = ids(a | (1 << q)).map(|i| self.node_of[i]).collect();
                let qn = self.node_of[q];
                let mut w = self.index.walk(root, &first, NodeEnd::Fixed(qn)).1;
                let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
                let rest: Vec<usize> = ids(full & !a & !(1 << q)).map(|i| self.node_of[i]).collect();
                let end = if closed { NodeEnd::Fixed(root) } else { NodeEnd::Free };
                let w2 = self.index.walk(qn, &rest, end).1;
                w.extend(w2.into_iter().skip(1));
                w
            }
        };
        last_visit_nodes(&walk, &all, self.span.node_count())
    }
}

pub(crate) enum Shape {
    General { d: Vec<Vec<f64>> },
    Tree(TreeCtx),
    Ring { c: f64, pos: Vec<f64>, space: MetricSpace, preds: Vec<Point>, line: TreeCtx },
    Flower { f: Flower, fp: Vec<FPos>, space: MetricSpace, preds: Vec<Point> },
}

impl Walker {
    pub fn new(kind: OracleKind, space: &MetricSpace, origin: &Point, preds: &[Point], variant: Variant) -> Result<Walker> {
        let open = variant == Variant::Open;
        let w = match kind {
            OracleKind::General => {
                let mut pts = vec![origin.clone()];
                pts.extend(preds.iter().cloned());
                Shape::General { d: pts.iter().map(|a| pts.iter().map(|b| space.dist(a, b)).collect()).collect() }
            }
            OracleKind::Tree => match space {
                MetricSpace::Line => {
                    let xs: Vec<f64> = preds.iter().map(line_x).collect();
                    Shape::Tree(TreeCtx::line(&xs, open))
                }
                MetricSpace::Tree(t) => {
                    let mut pts = vec![(0usize, 0.0)];
                    pts.extend(preds.iter().map(|p| match p {
                        Point::Tree { edge, offset } => (*edge, *offset),
                        _ => unreachable!("normalized tree point"),
                    }));
                    let (span, nodes) = trim_tree(t, &pts);
                    Shape::Tree(TreeCtx::new(span, nodes, open))
                }
                _ => unreachable!("checked by supports"),
            },
            OracleKind::Ring => {
                let MetricSpace::Ring { circumference: c } = space else { unreachable!() };
                let pos: Vec<f64> = preds.iter().map(ring_x).collect();
                let split: Vec<f64> = pos.iter().map(|&x| if x <= c / 2.0 { x } else { x - c }).collect();
                Shape::Ring { c: *c, pos, space: space.clone(), preds: preds.to_vec(), line: TreeCtx::line(&split, false) }
            }
            OracleKind::Flower => {
                let MetricSpace::Flower(f) = space else { unreachable!() };
                let fp = preds
                    .iter()
                    .map(|p| match p {
                        Point::Flower { part, offset } => (*part, *offset),
                        _ => unreachable!(),
                    })
                    .collect();
                Shape::Flower { f: f.clone(), fp, space: space.clone(), preds: preds.to_vec() }
            }
        };
        Ok(Walker { shape: w, closed: !open })
    }
}

pub(crate) struct Walker {
    pub shape: Shape,
    pub closed: bool,
}

fn line_x(p: &Point) -> f64 {
    match p {
        Point::Line(x) => *x,
        _ => unreachable!("normalized line point"),
    }
}

fn ring_x(p: &Point) -> f64 {
    match p {
        Point::Ring(x) => *x,
        _ => unreachable!("normalized ring point"),
    }
}

impl Walker {
    pub fn order(&self, choice: Choice, n: usize) -> Result<Vec<usize>> {
        let closed = self.closed;
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(match &self.shape {
            Shape::Tree(ctx) => ctx.order(choice, n, closed),
            Shape::General { d } => {
                let (a, q) = choice;
                match q {
                    None => {
                        let all: Vec<usize> = (1..=n).collect();
                        let end = if closed { MatrixEnd::Closed } else { MatrixEnd::Free };
                        held_karp_matrix(d, 0, &all, end)?.1
                    }
                    Some(q) => {
                        let first: Vec<usize> = ids(a).map(|i| i + 1).collect();
                        let (_, o1) = held_karp_matrix(d, 0, &first, MatrixEnd::Fixed(q + 1))?;
                        let rest: Vec<usize> = ids(full & !a & !(1 << q)).map(|i| i + 1).collect();
                        let end = if closed { MatrixEnd::Fixed(0) } else { MatrixEnd::Free };
                        let (_, o2) = held_karp_matrix(d, q + 1, &rest, end)?;
                        let mut out: Vec<usize> = o1.iter().map(|&k| first[k] - 1).collect();
                        out.push(q);
                        out.extend(o2.iter().map(|&k| rest[k] - 1));
                        out
                    }
                }
            }
            Shape::Ring { c, pos, space, preds, .. } => {
                let sel = |m: u64| -> Vec<f64> { ids(m).map(|i| pos[i]).collect() };
                let way = match choice {
                    (_, None) => ring_walk(*c, 0.0, pos, if closed { PosEnd::Closed } else { PosEnd::Free }).1,
                    (a, Some(q)) => {
                        let mut w = ring_walk(*c, 0.0, &sel(a | (1 << q)), PosEnd::Fixed(pos[q])).1;
                        let end = if closed { PosEnd::Fixed(0.0) } else { PosEnd::Free };
                        let w2 = ring_walk(*c, pos[q], &sel(full & !a & !(1 << q)), end).1;
                        w.extend(w2.into_iter().skip(1));
                        w
                    }
                };
                let walk: Vec<Point> = way.into_iter().map(Point::Ring).collect();
                last_visit_order(space, &walk, preds)
            }
            Shape::Flower { f, fp, space, preds } => {
                let o: FPos = (Part::Stem, 0.0);
                let sel = |m: u64| -> Vec<FPos> { ids(m).map(|i| fp[i]).collect() };
                let way = match choice {
                    (_, None) => flower_walk(f, o, fp, if closed { FlowerEnd::Closed } else { FlowerEnd::Free }).1,
                    (a, Some(q)) => {
                        let mut w = flower_walk(f, o, &sel(a | (1 << q)), FlowerEnd::Fixed(fp[q])).1;
                        let end = if closed { FlowerEnd::Fixed(o) } else { FlowerEnd::Free };
                        let w2 = flower_walk(f, fp[q], &sel(full & !a & !(1 << q)), end).1;
                        w.extend(w2.into_iter().skip(1));
                        w
                    }
                };
                let walk: Vec<Point> = way.into_iter().map(|(part, offset)| Point::Flower { part, offset }).collect();
                last_visit_order(space, &walk, preds)
            }
        })
    }
}
