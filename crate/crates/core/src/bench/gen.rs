//! Random instances and prediction perturbation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleKind;
use crate::sim::{prediction_error, Instance, Variant};
use crate::space::{Flower, GeneralMetric, MetricSpace, Part, Point, SpaceKind, WeightedTree};
use crate::tsp::{shortest_serving_path_length, BRUTEFORCE_CAP};
use crate::TOL;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Swag,
    #[default]
    LaSwag,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Swag => "swag",
            Algo::LaSwag => "la-swag",
        }
    }
}

fn default_leaves() -> usize {
    4
}
fn default_petals() -> usize {
    2
}
fn default_true() -> bool {
    true
}
fn default_etas() -> Vec<f64> {
    vec![0.0]
}

/// A batch of random instances and how to run them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub space: SpaceKind,
    /// Largest request count; each instance draws n from [n_min, n].
    pub n: usize,
    #[serde(default)]
    pub n_min: Option<usize>,
    #[serde(default = "default_leaves")]
    pub leaves: usize,
    #[serde(default = "default_petals")]
    pub petals: usize,
    pub count: usize,
    #[serde(default = "default_etas")]
    pub etas: Vec<f64>,
    pub seed: u64,
    pub variant: Variant,
    #[serde(default)]
    pub algo: Algo,
    #[serde(default)]
    pub oracle: Option<OracleKind>,
    #[serde(default = "default_true")]
    pub breaking_rule: bool,
    /// When positive, each instance is also run with this many uniformly
    /// random prediction sets and the worst ratio is reported.
    #[serde(default)]
    pub adversarial: usize,
    #[serde(default)]
    pub output: Option<String>,
}

impl SweepSpec {
    pub fn new(space: SpaceKind, n: usize, count: usize, seed: u64, variant: Variant) -> Self {
        SweepSpec {
            space,
            n,
            n_min: None,
            leaves: default_leaves(),
            petals: default_petals(),
            count,
            etas: default_etas(),
            seed,
            variant,
            algo: Algo::LaSwag,
            oracle: None,
            breaking_rule: true,
            adversarial: 0,
            output: None,
        }
    }

    pub fn oracle_kind(&self) -> OracleKind {
        self.oracle.unwrap_or_else(|| OracleKind::natural(self.space))
    }

    pub fn check(&self) -> Result<()> {
        if self.n > BRUTEFORCE_CAP {
            return Err(Error::SizeCap { what: "sweep requests", got: self.n, cap: BRUTEFORCE_CAP });
        }
        if self.n_min.is_some_and(|m| m > self.n) {
            return Err(Error::InvalidInstance("n_min exceeds n".into()));
        }
        if self.space == SpaceKind::Tree && self.leaves == 0 {
            return Err(Error::InvalidInstance("a tree needs at least one leaf".into()));
        }
        if self.etas.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(Error::InvalidInstance("eta targets must be finite and nonnegative".into()));
        }
        if !self.oracle_kind().supports(self.space) {
            return Err(Error::IncompatibleOracle { oracle: self.oracle_kind().name(), space: self.space.name() });
        }
        Ok(())
    }
}

/// RNG of one item of a seeded batch.
pub fn item_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(idx);
    r
}

/// RNG of the perturbation toward the `k`-th η target of item `idx`.
pub fn eta_rng(seed: u64, k: usize, idx: usize) -> ChaCha8Rng {
    item_rng(seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1), idx as u64)
}

pub fn instance_id(spec: &SweepSpec, idx: usize) -> String {
    format!("{}-{}-{}-{idx:04}", spec.space.name(), spec.variant.name(), spec.seed)
}

/// Random space of the family with the spec's size parameters.
pub fn random_space(kind: SpaceKind, leaves: usize, petals: usize, rng: &mut impl Rng) -> MetricSpace {
    match kind {
        SpaceKind::Line => MetricSpace::Line,
        SpaceKind::Euclid2D => MetricSpace::Euclid2D,
        SpaceKind::Ring => MetricSpace::ring(1.0),
        SpaceKind::Flower => MetricSpace::Flower(Flower {
            petals: (0..petals).map(|_| rng.gen_range(0.5..1.5)).collect(),
            stem: if rng.gen_bool(0.8) { rng.gen_range(0.3..1.0) } else { 0.0 },
        }),
        SpaceKind::Tree => {
            // Attach nodes one by one; a new leaf only where the leaf budget allows.
            let nodes = leaves + rng.gen_range(0..=3);
            let mut parent: Vec<usize> = vec![0];
            let mut kids = vec![0usize];
            let mut leaf_count = 0usize;
            for v in 1..=nodes {
                let candidates: Vec<usize> = (0..v)
                    .filter(|&u| {
                        let adds = if u == 0 { kids[0] > 0 } else { kids[u] > 0 };
                        !adds || leaf_count < leaves
                    })
                    .collect();
                let u = *candidates.choose(rng).expect("a leaf can always be extended");
                let adds = kids[u] > 0 || u == 0;
                if adds {
                    leaf_count += 1;
                }
                kids[u] += 1;
                parent.push(u);
                kids.push(0);
            }
            let edges: Vec<(usize, usize, Option<f64>)> =
                (1..=nodes).map(|v| (parent[v], v, Some(rng.gen_range(0.2..1.0)))).collect();
            MetricSpace::Tree(WeightedTree::from_edges(&edges).expect("generated tree is valid"))
        }
        SpaceKind::General => {
            let m = rng.gen_range(5..=8);
            let mut d = vec![vec![0.0; m]; m];
            for i in 0..m {
                for j in i + 1..m {
                    let w = rng.gen_range(0.2..1.0);
                    d[i][j] = w;
                    d[j][i] = w;
                }
            }
            let sites = (0..m).map(|i| format!("s{i}")).collect();
            MetricSpace::General(GeneralMetric::from_graph(sites, d))
        }
    }
}

/// Uniform-ish random point of a space (line and plane use [-1, 1]).
pub fn random_point(space: &MetricSpace, rng: &mut impl Rng) -> Point {
    match space {
        MetricSpace::Line => Point::Line(rng.gen_range(-1.0..=1.0)),
        MetricSpace::Euclid2D => Point::Plane(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
        MetricSpace::Ring { circumference } => Point::Ring(rng.gen_range(0.0..*circumference)),
        MetricSpace::Flower(f) => {
            let total: f64 = f.petals.iter().sum::<f64>() + f.stem;
            let mut x = rng.gen_range(0.0..total);
            for (i, &p) in f.petals.iter().enumerate() {
                if x < p {
                    return Point::Flower { part: Part::Petal(i), offset: x };
                }
                x -= p;
            }
            Point::Flower { part: Part::Stem, offset: x.min(f.stem) }
        }
        MetricSpace::Tree(t) => {
            let edges: Vec<(usize, f64)> = (1..t.node_count()).map(|v| (v, t.edge_len(v).min(2.0))).collect();
            let total: f64 = edges.iter().map(|e| e.1).sum();
            let mut x = rng.gen_range(0.0..total);
            for &(v, l) in &edges {
                if x < l {
                    return Point::Tree { edge: v, offset: x.max(1e-6) };
                }
                x -= l;
            }
            let (v, l) = *edges.last().unwrap();
            Point::Tree { edge: v, offset: l }
        }
        MetricSpace::General(g) => Point::Site(rng.gen_range(0..g.size())),
    }
}

fn diameter(space: &MetricSpace, pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for a in pts {
        for b in pts {
            d = d.max(space.dist(a, b));
        }
    }
    d
}

/// One random instance with perfect predictions: locations uniform on the
/// space, release times uniform in [0, 2 · diameter].
pub fn random_instance(space: MetricSpace, n: usize, variant: Variant, rng: &mut impl Rng) -> Result<Instance> {
    let locs: Vec<Point> = (0..n).map(|_| random_point(&space, rng)).collect();
    let mut all = locs.clone();
    all.push(space.origin());
    let diam = diameter(&space, &all).max(TOL);
    let reqs = locs.into_iter().map(|x| (x, rng.gen_range(0.0..=2.0 * diam))).collect();
    Instance::perfect(space, reqs, variant)
}

/// The spec's instances (perfect predictions), deterministic under the seed.
pub fn generate(spec: &SweepSpec) -> Result<Vec<Instance>> {
    spec.check()?;
    (0..spec.count)
        .map(|idx| {
            let mut rng = item_rng(spec.seed, idx as u64);
            let lo = spec.n_min.unwrap_or(spec.n);
            let n = rng.gen_range(lo..=spec.n);
            let space = random_space(spec.space, spec.leaves, spec.petals, &mut rng);
            random_instance(space, n, spec.variant, &mut rng)
        })
        .collect()
}

/// Predictions displaced so that η lands within 5% of `target` (exactly
/// where the geometry allows).
pub fn perturb_predictions(inst: &Instance, target: f64, rng: &mut impl Rng) -> Result<Instance> {
    let (out, eta) = perturb_toward(inst, target, rng)?;
    if (eta - target).abs() > 0.05 * target {
        return Err(Error::InvalidInstance(format!("eta target {target} unreachable (got {eta})")));
    }
    Ok(out)
}

/// Best-effort version of [`perturb_predictions`]: returns the displaced
/// instance and its realized η even when the target is out of reach.
pub fn perturb_toward(inst: &Instance, target: f64, rng: &mut impl Rng) -> Result<(Instance, f64)> {
    if !(target >= 0.0 && target.is_finite()) {
        return Err(Error::InvalidInstance(format!("eta target {target}")));
    }
    if target == 0.0 || inst.n() == 0 {
        return Ok((inst.truthful(), 0.0));
    }
    let f = shortest_serving_path_length(inst)?;
    if f <= TOL {
        return Err(Error::InvalidInstance("eta is undefined when every request sits at the origin".into()));
    }
    let sp = &inst.space;
    let n = inst.n();
    let mut want: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let sum: f64 = want.iter().sum();
    for w in want.iter_mut() {
        *w *= target * f / sum;
    }
    let mut preds = inst.locations();
    let mut left = 0.0;
    for i in 0..n {
        let x = &inst.requests[i].location;
        let goal = want[i] + left;
        let (p, got) = displace(sp, x, goal, rng);
        preds[i] = p;
        left = goal - got;
    }
    // Leftover displacement goes wherever it still fits.
    for i in 0..n {
        if left <= TOL {
            break;
        }
        let x = &inst.requests[i].location;
        let cur = sp.dist(x, &preds[i]);
        let (p, got) = displace(sp, x, cur + left, rng);
        if got > cur {
            preds[i] = p;
            left -= got - cur;
        }
    }
    let out = inst.with_predictions(preds);
    let eta = prediction_error(&out)?;
    Ok((out, eta))
}

/// A point at distance `goal` from `x` if one exists among a few random
/// tries; otherwise the farthest found. Returns the point and its distance.
fn displace(sp: &MetricSpace, x: &Point, goal: f64, rng: &mut impl Rng) -> (Point, f64) {
    match (sp, x) {
        (MetricSpace::Line, Point::Line(a)) => {
            let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            return (Point::Line(a + s * goal), goal);
        }
        (MetricSpace::Euclid2D, Point::Plane(a, b)) => {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            return (Point::Plane(a + goal * th.cos(), b + goal * th.sin()), goal);
        }
        _ => {}
    }
    let mut best = (x.clone(), 0.0);
    for _ in 0..64 {
        let y = random_point(sp, rng);
        let d = sp.dist(x, &y);
        if d >= goal {
            let p = sp.step(x, &y, goal);
            let got = sp.dist(x, &p);
            return (p, got);
        }
        if d > best.1 {
            best = (y, d);
        }
    }
    best
}

/// Predictions drawn uniformly at random, independent of the truth.
pub fn random_predictions(inst: &Instance, rng: &mut impl Rng) -> Instance {
    let preds = (0..inst.n()).map(|_| random_point(&inst.space, rng)).collect();
    inst.with_predictions(preds)
}
