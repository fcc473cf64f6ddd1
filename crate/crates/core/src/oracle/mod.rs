//! Domination oracles. Every batch is a set of serving orders over all
//! request ids, computed on the predicted locations; the cumulative set only
//! grows.
//!
//! Structured oracles (tree, ring, flower) describe a dominator by a pair
//! (A, q): the released requests A served before the unreleased request q.
//! Its order is read off the walk "optimal O → A ∪ {q} ending at q" followed
//! by "optimal q → everything else" (back to O if closed), by last visit.
//! The general oracle concatenates the two Held–Karp orders literally.

mod enumerate;
mod walks;

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{RouteTable, Variant};
use crate::space::{MetricSpace, Point, SpaceKind};
use crate::TOL;

pub use enumerate::{flower_choice_count, FLOWER_CONSTANT};
use walks::Walker;

/// Released-set masks are `u64`.
pub const ORACLE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    General,
    Tree,
    Ring,
    Flower,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::General => "general",
            OracleKind::Tree => "tree",
            OracleKind::Ring => "ring",
            OracleKind::Flower => "flower",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "general" => Some(OracleKind::General),
            "tree" => Some(OracleKind::Tree),
            "ring" => Some(OracleKind::Ring),
            "flower" => Some(OracleKind::Flower),
            _ => None,
        }
    }

    pub fn supports(self, space: SpaceKind) -> bool {
        match self {
            OracleKind::General => true,
            OracleKind::Tree => matches!(space, SpaceKind::Line | SpaceKind::Tree),
            OracleKind::Ring => space == SpaceKind::Ring,
            OracleKind::Flower => space == SpaceKind::Flower,
        }
    }

    /// The specialized oracle of a space (general for Euclidean and general metrics).
    pub fn natural(space: SpaceKind) -> Self {
        match space {
            SpaceKind::Line | SpaceKind::Tree => OracleKind::Tree,
            SpaceKind::Ring => OracleKind::Ring,
            SpaceKind::Flower => OracleKind::Flower,
            SpaceKind::Euclid2D | SpaceKind::General => OracleKind::General,
        }
    }
}

/// Bookkeeping of one oracle query.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchInfo {
    pub time: f64,
    pub released: usize,
    /// Distinct (A, q) choices evaluated.
    pub choices: usize,
    /// Distinct orders in the batch.
    pub size: usize,
    /// Orders new to the cumulative set.
    pub added: usize,
    /// The cardinality bound the batch must respect.
    pub bound: f64,
}

/// A dominator choice: released mask served first and the unreleased target
/// (`None` when everything is released).
pub(crate) type Choice = (u64, Option<usize>);

pub struct OracleState {
    kind: OracleKind,
    variant: Variant,
    n: usize,
    walker: Walker,
    table: RouteTable,
    set: Vec<Vec<usize>>,
    seen: HashSet<Vec<usize>>,
    cache: HashMap<Choice, Vec<usize>>,
    batches: Vec<BatchInfo>,
    last: Option<(f64, u64)>,
}

impl OracleState {
    pub fn new(kind: OracleKind, space: &MetricSpace, origin: &Point, predictions: &[Point], variant: Variant) -> Result<Self> {
        if !kind.supports(space.kind()) {
            return Err(Error::IncompatibleOracle { oracle: kind.name(), space: space.kind().name() });
        }
        let n = predictions.len();
        if n > ORACLE_CAP {
            return Err(Error::SizeCap { what: "oracle requests", got: n, cap: ORACLE_CAP });
        }
        let preds = predictions.iter().map(|p| space.normalize(p)).collect::<Result<Vec<_>>>()?;
        let walker = Walker::new(kind, space, origin, &preds, variant)?;
        Ok(OracleState {
            kind,
            variant,
            n,
            walker,
            table: RouteTable::new(space, origin, &preds, variant),
            set: Vec::new(),
            seen: HashSet::new(),
            cache: HashMap::new(),
            batches: Vec::new(),
            last: None,
        })
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    /// Distances over the origin (index 0) and the predictions.
    pub fn table(&self) -> &RouteTable {
        &self.table
    }

    /// The cumulative set S(t), in insertion order.
    pub fn set(&self) -> &[Vec<usize>] {
        &self.set
    }

    pub fn batches(&self) -> &[BatchInfo] {
        &self.batches
    }

    /// Queries the oracle at a release event. Repeating the last query is a
    /// no-op; going back in time is an error.
    pub fn step(&mut self, t: f64, released: &[bool]) -> Result<&[Vec<usize>]> {
        if released.len() != self.n {
            return Err(Error::InvalidInstance(format!("{} release flags for {} requests", released.len(), self.n)));
        }
        let mask = to_mask(released);
        if let Some((lt, lm)) = self.last {
            if t < lt - TOL {
                return Err(Error::OutOfOrder { got: t, last: lt });
            }
            if (t - lt).abs() <= TOL && lm == mask {
                return Ok(&self.set);
            }
        }
        self.last = Some((t, mask));
        let (choices, bound) = enumerate::choices(self.kind, &self.walker, mask, self.n, self.variant);
        let mut batch: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &choices {
            let perm = match self.cache.get(c) {
                Some(p) => p.clone(),
                None => {
                    let p = self.walker.order(*c, self.n)?;
                    self.cache.insert(*c, p.clone());
                    p
                }
            };
            batch.insert(perm);
        }
        let size = batch.len();
        let mut added = 0;
        for p in batch {
            if self.seen.insert(p.clone()) {
                self.set.push(p);
                added += 1;
            }
        }
        self.batches.push(BatchInfo { time: t, released: mask.count_ones() as usize, choices: choices.len(), size, bound, added });
        Ok(&self.set)
    }
}

pub(crate) fn to_mask(flags: &[bool]) -> u64 {
    flags.iter().enumerate().filter(|(_, &f)| f).fold(0, |m, (i, _)| m | (1 << i))
}

pub(crate) fn ids(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Whether `a` dominates `b` at the release state `released`: no longer, and
/// no more unreleased remainder.
pub fn dominates(table: &RouteTable, a: &[usize], b: &[usize], released: &[bool], tol: f64) -> bool {
    let (la, aa) = table.stats(a, released);
    let (lb, ab) = table.stats(b, released);
    la <= lb + tol && (1.0 - aa) * la <= (1.0 - ab) * lb + tol
}

/// Some order of `set` dominates `b`.
pub fn dominated_by_set(table: &RouteTable, set: &[Vec<usize>], b: &[usize], released: &[bool], tol: f64) -> bool {
    set.iter().any(|a| dominates(table, a, b, released, tol))
}

/// One-shot batch for a release state, without history.
pub fn batch(kind: OracleKind, space: &MetricSpace, predictions: &[Point], variant: Variant, released: &[bool]) -> Result<Vec<Vec<usize>>> {
    let mut st = OracleState::new(kind, space, &space.origin(), predictions, variant)?;
    Ok(st.step(0.0, released)?.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::Line(x)).collect()
    }

    #[test]
    fn all_released_gives_a_single_optimal_order() {
        for kind in [OracleKind::General, OracleKind::Tree] {
            let b = batch(kind, &MetricSpace::Line, &line(&[1.0, -1.0, 2.0]), Variant::Closed, &[true; 3]).unwrap();
            assert_eq!(b.len(), 1, "{kind:?}");
            let t = RouteTable::new(&MetricSpace::Line, &Point::Line(0.0), &line(&[1.0, -1.0, 2.0]), Variant::Closed);
            assert!((t.length(&b[0]) - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lone_unreleased_request() {
        let b = batch(OracleKind::General, &MetricSpace::Line, &line(&[1.0]), Variant::Closed, &[false]).unwrap();
        assert_eq!(b, vec![vec![0]]);
    }

    #[test]
    fn closed_line_fixture_has_only_the_far_first_order() {
        // predictions 0 and -1, only the first released
        let b = batch(OracleKind::Tree, &MetricSpace::Line, &line(&[0.0, -1.0]), Variant::Closed, &[true, false]).unwrap();
        assert_eq!(b, vec![vec![1, 0]]);
    }

    #[test]
    fn repeated_query_is_idempotent_and_past_is_rejected() {
        let preds = line(&[1.0, -1.0]);
        let mut st = OracleState::new(OracleKind::General, &MetricSpace::Line, &Point::Line(0.0), &preds, Variant::Open).unwrap();
        let a = st.step(1.0, &[true, false]).unwrap().to_vec();
        let b = st.step(1.0, &[true, false]).unwrap().to_vec();
        assert_eq!(a, b);
        assert_eq!(st.batches().len(), 1);
        assert!(matches!(st.step(0.5, &[true, true]), Err(Error::OutOfOrder { .. })));
    }

    #[test]
    fn incompatible_space_is_rejected() {
        let r = OracleState::new(OracleKind::Ring, &MetricSpace::Line, &Point::Line(0.0), &[], Variant::Open);
        assert!(matches!(r, Err(Error::IncompatibleOracle { .. })));
    }
}
