//! The dominator choices (A, q) of each oracle for one release state, with
//! the batch-size bound the choices respect.

use std::collections::BTreeSet;

use super::walks::{Shape, TreeCtx, Walker};
use super::{ids, Choice, OracleKind};
use crate::sim::Variant;
use crate::space::{Flower, Part};
use crate::tsp::flower::FPos;
use crate::TOL;

/// c in the flower batch bound 6^p · n · c (closed) and 6^p · n³ · c (open).
pub const FLOWER_CONSTANT: f64 = 4.0;

pub(crate) fn choices(kind: OracleKind, w: &Walker, released: u64, n: usize, variant: Variant) -> (Vec<Choice>, f64) {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let un = full & !released;
    if un == 0 {
        return (vec![(released, None)], 1.0);
    }
    let open = variant == Variant::Open;
    let mut out: BTreeSet<Choice> = BTreeSet::new();
    let bound = match (&w.shape, kind) {
        (Shape::General { .. }, _) => {
            for q in ids(un) {
                for a in submasks(released) {
                    out.insert((a, Some(q)));
                }
            }
            2f64.powi(released.count_ones() as i32) * un.count_ones() as f64
        }
        (Shape::Tree(ctx), _) => {
            if open {
                tree_open(ctx, released, un, &mut out)
            } else {
                tree_closed(ctx, released, un, &mut out)
            }
        }
        (Shape::Ring { c, pos, line, .. }, _) => {
            if open {
                ring_open(*c, pos, released, un, &mut out)
            } else {
                let u = un.count_ones() as f64;
                for q in ids(un) {
                    let pq = pos[q];
                    let mut lc = 0;
                    let mut rc = 0;
                    for i in ids(released) {
                        if pos[i] <= pq + TOL || pos[i] <= TOL {
                            lc |= 1 << i;
                        }
                        if pos[i] >= pq - TOL || pos[i] <= TOL {
                            rc |= 1 << i;
                        }
                    }
                    out.insert((lc, Some(q)));
                    out.insert((rc, Some(q)));
                    out.insert((released, Some(q)));
                }
                3.0 * u + tree_closed(line, released, un, &mut out)
            }
        }
        (Shape::Flower { f, fp, .. }, _) => flower(f, fp, released, un, open, &mut out),
    };
    (out.into_iter().collect(), bound)
}

/// Every submask of `m`, including 0 and `m`.
pub(crate) fn submasks(m: u64) -> impl Iterator<Item = u64> {
    let mut s = m;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = s;
        if s == 0 {
            done = true;
        } else {
            s = (s - 1) & m;
        }
        Some(cur)
    })
}

/// Deepest unreleased request on each path (ties to the smaller id).
fn deepest(ctx: &TreeCtx, paths: &[Vec<usize>], depth: &[f64], un: u64) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for path in paths {
        let mut best: Option<(f64, usize)> = None;
        for &v in path {
            for i in ids(ctx.at[v] & un) {
                let d = depth[v];
                let better = match best {
                    None => true,
                    Some((bd, bi)) => d > bd + TOL || ((d - bd).abs() <= TOL && i < bi),
                };
                if better {
                    best = Some((d, i));
                }
            }
        }
        if let Some((_, i)) = best {
            out.insert(i);
        }
    }
    out.into_iter().collect()
}

fn leaf_choices(ctx: &TreeCtx, leaves: &[usize], ustar: &[usize], released: u64, out: &mut BTreeSet<Choice>) {
    let with_released: Vec<usize> = leaves.iter().copied().filter(|&l| ctx.at[l] & released != 0).collect();
    let k = with_released.len();
    for &q in ustar {
        let qa = ctx.above[ctx.node_of[q]];
        for s in 0..(1u64 << k) {
            let mut cover = qa;
            for (j, &l) in with_released.iter().enumerate() {
                if s >> j & 1 == 1 {
                    cover |= ctx.above[l];
                }
            }
            out.insert((released & cover, Some(q)));
        }
    }
}

fn tree_closed(ctx: &TreeCtx, released: u64, un: u64, out: &mut BTreeSet<Choice>) -> f64 {
    let ustar = deepest(ctx, &ctx.paths, &ctx.depth, un);
    leaf_choices(ctx, &ctx.leaves, &ustar, released, out);
    ustar.len() as f64 * 2f64.powi(ctx.leaves.len() as i32)
}

fn tree_open(ctx: &TreeCtx, released: u64, un: u64, out: &mut BTreeSet<Choice>) -> f64 {
    let mut most = 0;
    for r in &ctx.reroots {
        let ustar = deepest(ctx, &r.paths, &r.depth, un);
        most = most.max(ustar.len());
        leaf_choices(ctx, &r.leaves, &ustar, released, out);
    }
    let n = ctx.node_of.len() as f64;
    n * most as f64 * 2f64.powi(ctx.leaves.len() as i32 + 1)
}

/// Released requests outside an open gap (g1, g2) of [lo, hi], the gap not
/// containing `keep`.
fn gap_masks(offs: &[(usize, f64)], released: u64, lo: f64, hi: f64, keep: Option<f64>) -> BTreeSet<u64> {
    let mut cuts: Vec<f64> = offs.iter().map(|&(_, o)| o).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    let mut out = BTreeSet::new();
    for (a, &g1) in cuts.iter().enumerate() {
        for &g2 in &cuts[a + 1..] {
            if let Some(x) = keep {
                if x > g1 + TOL && x < g2 - TOL {
                    continue;
                }
            }
            let m = offs
                .iter()
                .filter(|&&(i, o)| released >> i & 1 == 1 && (o <= g1 + TOL || o >= g2 - TOL))
                .fold(0, |m, &(i, _)| m | (1 << i));
            out.insert(m);
        }
    }
    out.insert(offs.iter().filter(|&&(i, _)| released >> i & 1 == 1).fold(0, |m, &(i, _)| m | (1 << i)));
    out
}

fn ring_open(c: f64, pos: &[f64], released: u64, un: u64, out: &mut BTreeSet<Choice>) -> f64 {
    let offs: Vec<(usize, f64)> = pos.iter().copied().enumerate().collect();
    for q in ids(un) {
        for m in gap_masks(&offs, released, 0.0, c, Some(pos[q])) {
            out.insert((m, Some(q)));
        }
        out.insert((released, Some(q)));
    }
    let n = pos.len() as f64;
    un.count_ones() as f64 * ((n + 2.0) * (n + 2.0) + 1.0)
}

/// Number of per-component options at most used per q: the closed bound
/// 6^p · n · c.
pub fn flower_choice_count(petals: usize, n: usize, open: bool) -> f64 {
    let nn = n as f64;
    6f64.powi(petals as i32) * if open { nn * nn * nn } else { nn } * FLOWER_CONSTANT
}

fn flower(f: &Flower, fp: &[FPos], released: u64, un: u64, open: bool, out: &mut BTreeSet<Choice>) -> f64 {
    let n = fp.len();
    let p = f.petals.len();
    // component index: petals 0..p, stem p; None at the origin
    let comp = |i: usize| -> Option<usize> {
        let (part, o) = fp[i];
        if Flower::is_origin(part, o, &f.petals) {
            return None;
        }
        Some(match part {
            Part::Petal(j) => j,
            Part::Stem => p,
        })
    };
    let mut members: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p + 1];
    let mut at_origin = 0u64;
    for i in 0..n {
        match comp(i) {
            Some(c) => members[c].push((i, fp[i].1)),
            None => at_origin |= 1 << i,
        }
    }
    let rel_of = |c: usize, pred: &dyn Fn(f64) -> bool| -> u64 {
        members[c].iter().filter(|&&(i, o)| released >> i & 1 == 1 && pred(o)).fold(0, |m, &(i, _)| m | (1 << i))
    };
    let base = released & at_origin;
    for q in ids(un) {
        let cq = comp(q);
        let oq = fp[q].1;
        if open {
            // The region a route covers before reaching q is connected and
            // holds the origin: on a petal the complement of one arc gap, on
            // the stem a prefix.
            let opts: Vec<BTreeSet<u64>> = (0..=p)
                .map(|c| {
                    let keep = (cq == Some(c)).then_some(oq);
                    if c < p {
                        return gap_masks(&members[c], released, 0.0, f.petals[c], keep);
                    }
                    let mut s = BTreeSet::from([rel_of(c, &|_| true)]);
                    for &(_, cut) in &members[c] {
                        if keep.map_or(true, |x| cut >= x - TOL) {
                            s.insert(rel_of(c, &|o| o <= cut + TOL));
                        }
                    }
                    if keep.is_none() {
                        s.insert(0);
                    }
                    s
                })
                .collect();
            product(&opts, base, q, out);
            continue;
        }
        let opts: Vec<BTreeSet<u64>> = (0..=p)
            .map(|c| {
                let all = rel_of(c, &|_| true);
                let mut s = BTreeSet::new();
                if c < p {
                    let half = f.petals[c] / 2.0;
                    let cw = rel_of(c, &|o| o <= half + TOL);
                    let ccw = rel_of(c, &|o| o >= half - TOL);
                    let extras = [0, cw, ccw, all];
                    if cq == Some(c) {
                        let bcw = rel_of(c, &|o| o <= oq + TOL);
                        let bccw = rel_of(c, &|o| o >= oq - TOL);
                        for b in [bcw, bccw] {
                            for e in extras {
                                s.insert(b | e);
                            }
                        }
                    } else {
                        s.extend(extras);
                    }
                } else if cq == Some(c) {
                    s.insert(rel_of(c, &|o| o <= oq + TOL));
                    s.insert(all);
                } else {
                    s.insert(0);
                    s.insert(all);
                }
                s
            })
            .collect();
        product(&opts, base, q, out);
    }
    flower_choice_count(p, n, open)
}

fn product(opts: &[BTreeSet<u64>], base: u64, q: usize, out: &mut BTreeSet<Choice>) {
    let mut acc: BTreeSet<u64> = BTreeSet::from([base]);
    for o in opts {
        let mut next = BTreeSet::new();
        for &a in &acc {
            for &b in o {
                next.insert(a | b);
            }
        }
        acc = next;
    }
    for a in acc {
        out.insert((a, Some(q)));
    }
}
