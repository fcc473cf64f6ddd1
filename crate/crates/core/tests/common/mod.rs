//! Test-side reference definitions: sensible permutation sets, exhaustive
//! domination checks, permutation enumeration and brute-force evaluators.
//! Nothing here calls the oracles or the structured solvers.

#![allow(dead_code)]

pub mod props;

use oltsp::sim::{RouteTable, Variant};
use oltsp::space::{MetricSpace, Part, Point};

pub const EPS: f64 = 1e-9;

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap(k - 1, a, out);
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

/// `z` lies on the geodesic from `a` to `b` and differs from `a`.
fn strictly_on_path(sp: &MetricSpace, a: &Point, z: &Point, b: &Point) -> bool {
    sp.dist(a, z) > EPS && sp.dist(a, z) + sp.dist(z, b) <= sp.dist(a, b) + EPS
}

/// For every request, the requests on its path to `root` come later.
fn rooted_sensible(sp: &MetricSpace, pts: &[Point], perm: &[usize], root: &Point) -> bool {
    for (i, &a) in perm.iter().enumerate() {
        for &b in &perm[..i] {
            // b is served before a; it must not lie on a's path to the root
            if strictly_on_path(sp, &pts[a], &pts[b], root) {
                return false;
            }
        }
    }
    true
}

/// Sensible orders on a tree (or the line): closed rooted at the origin,
/// open rooted at the last request.
pub fn tree_sensible(sp: &MetricSpace, origin: &Point, pts: &[Point], perm: &[usize], variant: Variant) -> bool {
    match variant {
        Variant::Closed => rooted_sensible(sp, pts, perm, origin),
        Variant::Open => match perm.last() {
            None => true,
            Some(&l) => rooted_sensible(sp, pts, perm, &pts[l].clone()),
        },
    }
}

fn monotone(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1] + EPS) || xs.windows(2).all(|w| w[0] + EPS >= w[1])
}

/// Line-sensible after cutting a ring of circumference `c` at the antipode.
fn split_line_sensible(c: f64, pos: &[f64], perm: &[usize]) -> bool {
    let u: Vec<Point> = pos.iter().map(|&x| Point::Line(if x <= c / 2.0 { x } else { x - c })).collect();
    rooted_sensible(&MetricSpace::Line, &u, perm, &Point::Line(0.0))
}

/// Closed ring: an optional monotone loop prefix, then line-sensible on the
/// ring cut at the antipode.
pub fn ring_closed_sensible(c: f64, pos: &[f64], perm: &[usize]) -> bool {
    for k in 0..=perm.len() {
        let head: Vec<f64> = perm[..k].iter().map(|&i| pos[i]).collect();
        if monotone(&head) && split_line_sensible(c, pos, &perm[k..]) {
            return true;
        }
    }
    false
}

fn flower_parts(pts: &[Point]) -> Vec<(Part, f64)> {
    pts.iter()
        .map(|p| match p {
            Point::Flower { part, offset } => (*part, *offset),
            _ => panic!("flower point expected"),
        })
        .collect()
}

/// Closed flower: per petal, the restricted order is either tree-sensible on
/// the petal cut at its half point, or a monotone loop prefix followed by
/// such an order; the stem is tree-sensible; requests at the origin go last.
pub fn flower_closed_sensible(petals: &[f64], pts: &[Point], perm: &[usize]) -> bool {
    let fp = flower_parts(pts);
    let at_origin = |i: usize| fp[i].1 <= EPS || matches!(fp[i].0, Part::Petal(j) if fp[i].1 >= petals[j] - EPS);
    // origin requests last
    let mut seen_origin = false;
    for &i in perm {
        if at_origin(i) {
            seen_origin = true;
        } else if seen_origin {
            return false;
        }
    }
    let real: Vec<usize> = perm.iter().copied().filter(|&i| !at_origin(i)).collect();
    // stem: deeper first
    let stem: Vec<f64> = real.iter().filter(|&&i| fp[i].0 == Part::Stem).map(|&i| fp[i].1).collect();
    if !stem.windows(2).all(|w| w[0] + EPS >= w[1]) {
        // a later stem request may be deeper only if it is not on the path
        // of the earlier one, which on a segment never happens
        return false;
    }
    for (j, &p) in petals.iter().enumerate() {
        let offs: Vec<f64> = real.iter().filter(|&&i| fp[i].0 == Part::Petal(j)).map(|&i| fp[i].1).collect();
        let ok = (0..=offs.len()).any(|k| monotone(&offs[..k]) && halves_sensible(p, &offs[k..]));
        if !ok {
            return false;
        }
    }
    true
}

/// Tree-sensible on a petal of length `p` cut at p/2: on each half, points
/// closer to the origin come later.
fn halves_sensible(p: f64, offs: &[f64]) -> bool {
    let depth = |o: f64| if o <= p / 2.0 { o } else { p - o };
    let side = |o: f64| o <= p / 2.0;
    for (i, &a) in offs.iter().enumerate() {
        for &b in &offs[..i] {
            // b before a: b must not be strictly between a and the origin
            if side(a) == side(b) && depth(b) < depth(a) - EPS {
                return false;
            }
        }
    }
    true
}

/// Pareto check of domination: some (len, remainder) pair of `set` is no
/// worse in both coordinates than `perm`'s.
pub struct Front {
    pts: Vec<(f64, f64)>,
}

impl Front {
    pub fn new(table: &RouteTable, set: &[Vec<usize>], released: &[bool]) -> Self {
        let mut pts: Vec<(f64, f64)> = set
            .iter()
            .map(|s| {
                let (l, a) = table.stats(s, released);
                (l, (1.0 - a) * l)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut front: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            if front.last().map_or(true, |f| p.1 < f.1) {
                front.push(p);
            }
        }
        Front { pts: front }
    }

    pub fn dominates(&self, table: &RouteTable, perm: &[usize], released: &[bool], tol: f64) -> bool {
        let (l, a) = table.stats(perm, released);
        let r = (1.0 - a) * l;
        self.pts.iter().any(|&(fl, fr)| fl <= l + tol && fr <= r + tol)
    }
}

use oltsp::bench::{item_rng, random_instance, random_space};
use oltsp::oracle::{OracleKind, OracleState};
use oltsp::space::SpaceKind;
use oltsp::tsp::opt_bruteforce;
use oltsp::sim::Instance;
use rand::Rng;

/// The safe set the oracle of a space is checked against.
pub fn in_safe_set(inst: &Instance, kind: OracleKind, perm: &[usize]) -> bool {
    let pts = &inst.predictions;
    match (kind, &inst.space, inst.variant) {
        (OracleKind::General, _, _) => true,
        (OracleKind::Tree, sp, v) => tree_sensible(sp, &inst.origin, pts, perm, v),
        (OracleKind::Ring, _, Variant::Open) => true,
        (OracleKind::Ring, MetricSpace::Ring { circumference }, Variant::Closed) => {
            let pos: Vec<f64> = pts.iter().map(|p| if let Point::Ring(x) = p { *x } else { unreachable!() }).collect();
            ring_closed_sensible(*circumference, &pos, perm)
        }
        (OracleKind::Flower, _, Variant::Open) => true,
        (OracleKind::Flower, MetricSpace::Flower(f), Variant::Closed) => flower_closed_sensible(&f.petals, pts, perm),
        _ => unreachable!(),
    }
}

#[derive(Debug, Default)]
pub struct DomReport {
    pub instances: usize,
    pub checks: usize,
    pub safe_checked: usize,
    pub failures: Vec<String>,
    pub max_cumulative: usize,
}

/// Exhaustive domination check on `count` random instances with 1..=n_max
/// requests: at every release time and 20 random times, every permutation
/// of the safe set and the offline optimal order are dominated by S(t).
pub fn domination_check(space: SpaceKind, variant: Variant, count: usize, n_max: usize, seed: u64) -> DomReport {
    let kind = OracleKind::natural(space);
    let mut rep = DomReport::default();
    for idx in 0..count {
        let mut rng = item_rng(seed, idx as u64);
        let sp = random_space(space, 4, 2, &mut rng);
        let n = rng.gen_range(1..=n_max);
        let inst = random_instance(sp, n, variant, &mut rng).unwrap();
        rep.instances += 1;
        let perms: Vec<Vec<usize>> = permutations(n).into_iter().filter(|p| in_safe_set(&inst, kind, p)).collect();
        rep.safe_checked += perms.len();
        let opt = opt_bruteforce(&inst).unwrap().order;
        let mut events: Vec<f64> = inst.releases();
        events.push(0.0);
        events.sort_by(f64::total_cmp);
        events.dedup();
        let last = *events.last().unwrap();
        let mut times: Vec<(f64, bool)> = events.iter().map(|&t| (t, true)).collect();
        for _ in 0..20 {
            times.push((rng.gen_range(0.0..=last.max(1e-3) * 1.1), false));
        }
        times.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        let mut st = OracleState::new(kind, &inst.space, &inst.origin, &inst.predictions, variant).unwrap();
        let rel = inst.releases();
        for (t, is_event) in times {
            let released: Vec<bool> = rel.iter().map(|&r| r <= t).collect();
            if is_event {
                st.step(t, &released).unwrap();
            }
            let table = st.table().clone();
            let front = Front::new(&table, st.set(), &released);
            rep.max_cumulative = rep.max_cumulative.max(st.set().len());
            for p in perms.iter().chain(std::iter::once(&opt)) {
                rep.checks += 1;
                if !front.dominates(&table, p, &released, EPS) && rep.failures.len() < 5 {
                    rep.failures.push(format!(
                        "{} {} #{idx} t={t:.4} perm={p:?} released={released:?} inst={}",
                        space.name(),
                        variant.name(),
                        inst.to_json()
                    ));
                }
            }
        }
    }
    rep
}

/// Completion time of serving `order` on the true locations: wait for each
/// release, return to the origin if closed.
pub fn serve_time(inst: &Instance, order: &[usize]) -> f64 {
    let sp = &inst.space;
    let mut t = 0.0f64;
    let mut cur = inst.origin.clone();
    for &i in order {
        let r = &inst.requests[i];
        t = (t + sp.dist(&cur, &r.location)).max(r.release);
        cur = r.location.clone();
    }
    if inst.variant == Variant::Closed {
        t += sp.dist(&cur, &inst.origin);
    }
    t
}

/// Shortest classical path by trying every order.
pub fn brute_path(sp: &MetricSpace, start: &Point, pts: &[Point], end: &oltsp::tsp::End) -> f64 {
    use oltsp::tsp::End;
    let mut best = f64::INFINITY;
    for perm in permutations(pts.len()) {
        let mut len = 0.0;
        let mut cur = start;
        for &i in &perm {
            len += sp.dist(cur, &pts[i]);
            cur = &pts[i];
        }
        len += match end {
            End::Fixed(e) => sp.dist(cur, e),
            End::Free => 0.0,
            End::Closed => sp.dist(cur, start),
        };
        best = best.min(len);
    }
    best
}
