//! SWAG and LA-SWAG as simulator policies.
//!
//! Before starting, the server waits at the origin. At every release event
//! the oracle is queried and the earliest start candidate of the current
//! window is scheduled; a later release preempts it. At the start time the
//! order minimizing (1 − β)ℓ is followed: go to each predicted location,
//! wait for the release, then go to the true location and serve. LA-SWAG
//! additionally switches to an optimal classical path over the true
//! locations once everything is released (the breaking rule).

use crate::error::{Error, Result};
use crate::oracle::{BatchInfo, OracleKind, OracleState};
use crate::sim::{run_adaptive, simulate, Action, Adversary, EventKind, Instance, Plan, Policy, RunResult, Setup, Variant, View};
use crate::space::Point;
use crate::tsp::{classical_path, End};

/// Orders with equal cost are broken by the smallest id sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    Lexicographic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub oracle: OracleKind,
    pub breaking_rule: bool,
    pub tie_break: TieBreak,
    /// Slack on the start condition α ≥ 1/2 and on cost ties.
    pub tol: f64,
}

impl EngineConfig {
    pub fn new(oracle: OracleKind) -> Self {
        EngineConfig { oracle, breaking_rule: true, tie_break: TieBreak::Lexicographic, tol: 1e-9 }
    }

    pub fn without_breaking_rule(mut self) -> Self {
        self.breaking_rule = false;
        self
    }
}

/// Start time T, the witness order meeting both start conditions, and the
/// order followed from T on.
#[derive(Clone, Debug, PartialEq)]
pub struct StartDecision {
    pub t: f64,
    pub witness: Vec<usize>,
    pub chosen: Vec<usize>,
}

/// Earliest start in the current window: max(now, min ℓ/2 over orders with
/// α ≥ 1/2), with its witness.
fn candidate(oracle: &OracleState, now: f64, released: &[bool], tol: f64) -> Option<(f64, Vec<usize>)> {
    let table = oracle.table();
    let mut best: Option<(f64, &Vec<usize>)> = None;
    for s in oracle.set() {
        let (l, a) = table.stats(s, released);
        if a < 0.5 - tol {
            continue;
        }
        let better = match best {
            None => true,
            Some((bl, bs)) => l < bl - tol || (l <= bl + tol && s < bs),
        };
        if better {
            best = Some((l, s));
        }
    }
    best.map(|(l, s)| ((l / 2.0).max(now), s.clone()))
}

/// The order minimizing (1 − β)ℓ, ties to the smallest sequence.
fn choose(oracle: &OracleState, released: &[bool], tol: f64) -> Vec<usize> {
    let table = oracle.table();
    let mut best: Option<(f64, &Vec<usize>)> = None;
    for s in oracle.set() {
        let (l, a) = table.stats(s, released);
        let cost = (1.0 - a.min(0.5)) * l;
        let better = match best {
            None => true,
            Some((bc, bs)) => cost < bc - tol || (cost <= bc + tol && s < bs),
        };
        if better {
            best = Some((cost, s));
        }
    }
    best.expect("the oracle set is never empty once queried").1.clone()
}

/// Start decision of an instance, computed offline from its release
/// schedule (predicted locations, real release times).
pub fn find_start(inst: &Instance, cfg: &EngineConfig) -> Result<StartDecision> {
    let mut oracle = OracleState::new(cfg.oracle, &inst.space, &inst.origin, &inst.predictions, inst.variant)?;
    let rel = inst.releases();
    let mut events: Vec<f64> = rel.clone();
    events.push(0.0);
    events.sort_by(f64::total_cmp);
    events.dedup();
    for (i, &t) in events.iter().enumerate() {
        let released: Vec<bool> = rel.iter().map(|&r| r <= t).collect();
        oracle.step(t, &released)?;
        let next = events.get(i + 1).copied().unwrap_or(f64::INFINITY);
        if let Some((c, witness)) = candidate(&oracle, t, &released, cfg.tol) {
            if c < next {
                let chosen = choose(&oracle, &released, cfg.tol);
                return Ok(StartDecision { t: c, witness, chosen });
            }
        }
    }
    Err(Error::Sim("no start time found after the last release".into()))
}

/// The LA-SWAG policy; with the breaking rule off and exact predictions it
/// is SWAG.
pub struct LaSwag {
    cfg: EngineConfig,
    setup: Option<Setup>,
    oracle: Option<OracleState>,
    witness: Vec<usize>,
    decision: Option<StartDecision>,
    fired: bool,
}

impl LaSwag {
    pub fn new(cfg: EngineConfig) -> Self {
        LaSwag { cfg, setup: None, oracle: None, witness: Vec::new(), decision: None, fired: false }
    }

    pub fn decision(&self) -> Option<&StartDecision> {
        self.decision.as_ref()
    }

    pub fn batches(&self) -> &[BatchInfo] {
        self.oracle.as_ref().map_or(&[], |o| o.batches())
    }

    pub fn set_size(&self) -> usize {
        self.oracle.as_ref().map_or(0, |o| o.set().len())
    }

    fn setup(&self) -> &Setup {
        self.setup.as_ref().expect("policy started")
    }

    fn follow(&self, order: &[usize]) -> Plan {
        let s = self.setup();
        let mut a = Vec::with_capacity(4 * order.len() + 1);
        for &i in order {
            a.push(Action::MoveTo(s.predictions[i].clone()));
            a.push(Action::WaitFor(i));
            a.push(Action::MoveToTrue(i));
            a.push(Action::Serve(i));
        }
        if s.variant == Variant::Closed {
            a.push(Action::MoveTo(s.origin.clone()));
        }
        Plan::new(a)
    }

    fn break_plan(&self, view: &View) -> Result<Plan> {
        let s = self.setup();
        let left: Vec<usize> = (0..view.served.len()).filter(|&i| !view.served[i]).collect();
        let locs: Vec<Point> = left.iter().map(|&i| view.locations[i].clone().expect("all released")).collect();
        let end = match s.variant {
            Variant::Closed => End::Fixed(s.origin.clone()),
            Variant::Open => End::Free,
        };
        let path = classical_path(&s.space, view.pos, &locs, &end)?;
        let mut a = Vec::with_capacity(2 * left.len() + 1);
        for &k in &path.order {
            a.push(Action::MoveTo(locs[k].clone()));
            a.push(Action::Serve(left[k]));
        }
        if s.variant == Variant::Closed {
            a.push(Action::MoveTo(s.origin.clone()));
        }
        Ok(Plan { actions: a, notes: vec![EventKind::BreakRuleFired] })
    }
}

impl Policy for LaSwag {
    fn start(&mut self, setup: &Setup) -> Result<()> {
        self.oracle = Some(OracleState::new(self.cfg.oracle, &setup.space, &setup.origin, &setup.predictions, setup.variant)?);
        self.setup = Some(setup.clone());
        self.decision = None;
        self.fired = false;
        Ok(())
    }

    fn on_event(&mut self, view: &View, _new: &[usize]) -> Result<Option<Plan>> {
        if self.cfg.breaking_rule && !self.fired && view.released.iter().all(|&r| r) {
            self.fired = true;
            return self.break_plan(view).map(Some);
        }
        if self.decision.is_some() {
            return Ok(None);
        }
        let oracle = self.oracle.as_mut().expect("policy started");
        oracle.step(view.now, view.released)?;
        // no order is half released yet: idle until the next release
        let Some((c, witness)) = candidate(oracle, view.now, view.released, self.cfg.tol) else {
            return Ok(Some(Plan::new(Vec::new())));
        };
        self.witness = witness;
        Ok(Some(Plan::new(vec![Action::WaitUntil(c), Action::Wake])))
    }

    fn on_wake(&mut self, view: &View) -> Result<Option<Plan>> {
        if self.decision.is_some() || self.fired {
            return Ok(None);
        }
        let oracle = self.oracle.as_ref().expect("policy started");
        let chosen = choose(oracle, view.released, self.cfg.tol);
        let plan = self.follow(&chosen);
        self.decision = Some(StartDecision { t: view.now, witness: self.witness.clone(), chosen });
        Ok(Some(plan))
    }
}

/// A finished engine run with its start decision and oracle batches.
#[derive(Clone, Debug)]
pub struct EngineRun {
    pub result: RunResult,
    pub decision: Option<StartDecision>,
    pub batches: Vec<BatchInfo>,
    pub set_size: usize,
}

fn finish(result: RunResult, p: &LaSwag) -> EngineRun {
    EngineRun { result, decision: p.decision.clone(), batches: p.batches().to_vec(), set_size: p.set_size() }
}

pub fn la_swag(inst: &Instance, cfg: &EngineConfig) -> Result<EngineRun> {
    let mut p = LaSwag::new(cfg.clone());
    let r = simulate(inst, &mut p)?;
    Ok(finish(r, &p))
}

/// SWAG: requires exact predictions; never uses the breaking rule.
pub fn swag(inst: &Instance, oracle: OracleKind) -> Result<EngineRun> {
    let exact = inst.requests.iter().zip(&inst.predictions).all(|(r, p)| inst.space.dist(&r.location, p) <= crate::TOL);
    if !exact {
        return Err(Error::InvalidInstance("SWAG needs predictions equal to the true locations".into()));
    }
    la_swag(inst, &EngineConfig::new(oracle).without_breaking_rule())
}

pub fn la_swag_adaptive(adv: &mut dyn Adversary, cfg: &EngineConfig) -> Result<EngineRun> {
    let mut p = LaSwag::new(cfg.clone());
    let r = run_adaptive(adv, &mut p)?;
    Ok(finish(r, &p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::MetricSpace;

    fn closed_line_fixture() -> Instance {
        Instance::new(
            MetricSpace::Line,
            vec![(Point::Line(1.0), 1.0), (Point::Line(0.0), 2.0)],
            vec![Point::Line(0.0), Point::Line(-1.0)],
            Variant::Closed,
        )
        .unwrap()
    }

    #[test]
    fn everything_at_the_origin_starts_immediately() {
        let inst = Instance::perfect(MetricSpace::Line, vec![(Point::Line(0.0), 0.0), (Point::Line(0.0), 0.0)], Variant::Closed).unwrap();
        let d = find_start(&inst, &EngineConfig::new(OracleKind::Tree)).unwrap();
        assert_eq!(d.t, 0.0);
    }

    #[test]
    fn closed_line_fixture_starts_at_one_and_finishes_at_five() {
        let inst = closed_line_fixture();
        let cfg = EngineConfig::new(OracleKind::Tree);
        let d = find_start(&inst, &cfg).unwrap();
        assert!((d.t - 1.0).abs() < 1e-12);
        assert_eq!(d.chosen, vec![1, 0]);
        let run = la_swag(&inst, &cfg).unwrap();
        assert!((run.result.completion_time - 5.0).abs() < 1e-9);
        assert_eq!(run.decision.unwrap().t, 1.0);
    }

    #[test]
    fn single_request_at_origin_finishes_at_release() {
        let inst = Instance::perfect(MetricSpace::Line, vec![(Point::Line(0.0), 3.0)], Variant::Closed).unwrap();
        let run = swag(&inst, OracleKind::General).unwrap();
        assert!((run.result.completion_time - 3.0).abs() < 1e-12);
    }

    #[test]
    fn swag_rejects_inexact_predictions() {
        assert!(swag(&closed_line_fixture(), OracleKind::Tree).is_err());
    }

    #[test]
    fn open_line_fixture() {
        let inst = Instance::new(MetricSpace::Line, vec![(Point::Line(1.5), 1.5)], vec![Point::Line(-1.0)], Variant::Open).unwrap();
        let cfg = EngineConfig::new(OracleKind::Tree);
        assert!((find_start(&inst, &cfg).unwrap().t - 0.5).abs() < 1e-12);
        let run = la_swag(&inst, &cfg).unwrap();
        assert!((run.result.completion_time - 4.0).abs() < 1e-9);
    }
}
