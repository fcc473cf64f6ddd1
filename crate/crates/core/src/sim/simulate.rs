//! Event-driven simulation of a unit-speed server against a release schedule
//! or an adaptive adversary.

use std::collections::VecDeque;
use std::fmt::Write as _;

use super::{Instance, Variant};
use crate::error::{Error, Result};
use crate::space::{MetricSpace, Point};
use crate::TOL;

const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    MoveTo(Point),
    /// Move to the true location of a released request.
    MoveToTrue(usize),
    WaitFor(usize),
    WaitUntil(f64),
    Serve(usize),
    /// Hand control back to the policy.
    Wake,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Plan {
    pub actions: Vec<Action>,
    /// Extra log entries emitted when the plan is adopted.
    pub notes: Vec<EventKind>,
}

impl Plan {
    pub fn new(actions: Vec<Action>) -> Self {
        Plan { actions, notes: Vec::new() }
    }
}

/// Static information handed to a policy before the run starts.
#[derive(Clone, Debug)]
pub struct Setup {
    pub space: MetricSpace,
    pub origin: Point,
    pub predictions: Vec<Point>,
    pub variant: Variant,
}

/// What a policy sees when it is called.
pub struct View<'a> {
    pub now: f64,
    pub pos: &'a Point,
    pub released: &'a [bool],
    pub served: &'a [bool],
    /// True locations, known once released.
    pub locations: &'a [Option<Point>],
}

pub trait Policy {
    fn start(&mut self, setup: &Setup) -> Result<()>;
    /// Called at time 0 and at every release event, after the releases.
    /// `None` keeps the current plan.
    fn on_event(&mut self, view: &View, new: &[usize]) -> Result<Option<Plan>>;
    /// Called when a `Wake` action is reached.
    fn on_wake(&mut self, view: &View) -> Result<Option<Plan>>;
}

pub trait Adversary {
    fn setup(&self) -> Setup;
    /// Next time at which `decide` must be called, if any.
    fn next_time(&self) -> Option<f64>;
    /// Requests (id, location) released at `now`.
    fn decide(&mut self, now: f64, pos: &Point) -> Result<Vec<(usize, Point)>>;
}

/// Replays the release schedule of an instance.
pub struct StaticAdversary<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    next: usize,
}

impl<'a> StaticAdversary<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let mut order: Vec<usize> = (0..inst.n()).collect();
        order.sort_by(|&a, &b| inst.requests[a].release.total_cmp(&inst.requests[b].release).then(a.cmp(&b)));
        StaticAdversary { inst, order, next: 0 }
    }
}

impl Adversary for StaticAdversary<'_> {
    fn setup(&self) -> Setup {
        Setup {
            space: self.inst.space.clone(),
            origin: self.inst.origin.clone(),
            predictions: self.inst.predictions.clone(),
            variant: self.inst.variant,
        }
    }

    fn next_time(&self) -> Option<f64> {
        self.order.get(self.next).map(|&i| self.inst.requests[i].release)
    }

    fn decide(&mut self, now: f64, _pos: &Point) -> Result<Vec<(usize, Point)>> {
        let mut out = Vec::new();
        while let Some(&i) = self.order.get(self.next) {
            let r = &self.inst.requests[i];
            if r.release > now {
                break;
            }
            out.push((i, r.location.clone()));
            self.next += 1;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Depart,
    Arrive,
    WaitStart,
    WaitEnd,
    Serve,
    Release,
    BreakRuleFired,
    Finish,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Depart => "depart",
            EventKind::Arrive => "arrive",
            EventKind::WaitStart => "wait_start",
            EventKind::WaitEnd => "wait_end",
            EventKind::Serve => "serve",
            EventKind::Release => "release",
            EventKind::BreakRuleFired => "break_rule_fired",
            EventKind::Finish => "finish",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajEvent {
    pub time: f64,
    pub point: Point,
    pub kind: EventKind,
    pub request: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub completion_time: f64,
    pub trajectory: Vec<TrajEvent>,
    pub served_at: Vec<f64>,
    /// The instance the adversary ended up producing.
    pub realized: Instance,
}

impl RunResult {
    pub fn fired_break_rule(&self) -> bool {
        self.trajectory.iter().any(|e| e.kind == EventKind::BreakRuleFired)
    }

    /// Trajectory as CSV with columns time, location, event.
    pub fn trajectory_csv(&self) -> String {
        let sp = &self.realized.space;
        let mut out = String::from("time,location,event\n");
        for e in &self.trajectory {
            let ev = match e.request {
                Some(i) => format!("{} {}", e.kind.name(), i),
                None => e.kind.name().to_string(),
            };
            let _ = writeln!(out, "{},\"{}\",{}", e.time, sp.point_label(&e.point), ev);
        }
        out
    }
}

struct State<'a> {
    space: &'a MetricSpace,
    t: f64,
    pos: Point,
    released: Vec<bool>,
    served: Vec<bool>,
    locations: Vec<Option<Point>>,
    release_times: Vec<f64>,
    served_at: Vec<f64>,
    log: Vec<TrajEvent>,
}

impl State<'_> {
    fn note(&mut self, kind: EventKind, request: Option<usize>) {
        self.log.push(TrajEvent { time: self.t, point: self.pos.clone(), kind, request });
    }

    fn view(&self) -> View<'_> {
        View { now: self.t, pos: &self.pos, released: &self.released, served: &self.served, locations: &self.locations }
    }
}

/// Runs `policy` against `adv` until every request is released and served
/// (and the server is back at the origin, if closed).
pub fn run_adaptive(adv: &mut dyn Adversary, policy: &mut dyn Policy) -> Result<RunResult> {
    let setup = adv.setup();
    let n = setup.predictions.len();
    policy.start(&setup)?;
    let space = &setup.space;
    let mut st = State {
        space,
        t: 0.0,
        pos: setup.origin.clone(),
        released: vec![false; n],
        served: vec![false; n],
        locations: vec![None; n],
        release_times: vec![f64::NAN; n],
        served_at: vec![f64::NAN; n],
        log: Vec::new(),
    };
    let mut plan: VecDeque<Action> = VecDeque::new();
    let mut started = false;

    let adopt = |st: &mut State, plan: &mut VecDeque<Action>, started: &mut bool, p: Option<Plan>| {
        if let Some(p) = p {
            for k in p.notes {
                st.note(k, None);
            }
            *plan = p.actions.into();
            *started = false;
        }
    };

    let process = |st: &mut State, adv: &mut dyn Adversary, policy: &mut dyn Policy, first: bool| -> Result<Option<Plan>> {
        let mut new = Vec::new();
        while let Some(td) = adv.next_time() {
            if td > st.t {
                break;
            }
            if td < st.t - TOL {
                return Err(Error::Sim(format!("adversary decision time {td} is before now {}", st.t)));
            }
            for (id, x) in adv.decide(st.t, &st.pos)? {
                if id >= n {
                    return Err(Error::Sim(format!("release of unknown request {id}")));
                }
                if st.released[id] {
                    return Err(Error::Sim(format!("request {id} released twice")));
                }
                let x = st.space.normalize(&x)?;
                st.released[id] = true;
                st.locations[id] = Some(x);
                st.release_times[id] = st.t;
                st.note(EventKind::Release, Some(id));
                new.push(id);
            }
        }
        if first || !new.is_empty() {
            policy.on_event(&st.view(), &new)
        } else {
            Ok(None)
        }
    };

    let p = process(&mut st, adv, policy, true)?;
    adopt(&mut st, &mut plan, &mut started, p);

    for _ in 0..MAX_STEPS {
        let Some(front) = plan.front().cloned() else {
            let done = st.served.iter().all(|&s| s)
                && adv.next_time().is_none()
                && (setup.variant == Variant::Open || space.dist(&st.pos, &setup.origin) <= TOL);
            if done {
                st.note(EventKind::Finish, None);
                let realized = realized_instance(&setup, &st)?;
                return Ok(RunResult { completion_time: st.t, trajectory: st.log, served_at: st.served_at, realized });
            }
            // Idle: wait for the next release.
            match adv.next_time() {
                Some(td) => {
                    st.t = st.t.max(td);
                    let p = process(&mut st, adv, policy, false)?;
                    adopt(&mut st, &mut plan, &mut started, p);
                    continue;
                }
                None => return Err(Error::Sim(format!("policy idle at t={} with work left", st.t))),
            }
        };
        // Target and scheduled end of the front action.
        let (target, end) = match &front {
            Action::MoveTo(p) => {
                let p = space.normalize(p)?;
                let e = st.t + space.dist(&st.pos, &p);
                (Some(p), e)
            }
            Action::MoveToTrue(i) => {
                let Some(p) = st.locations.get(*i).cloned().flatten() else {
                    return Err(Error::Sim(format!("move to unreleased request {i}")));
                };
                let e = st.t + space.dist(&st.pos, &p);
                (Some(p), e)
            }
            Action::WaitFor(i) => {
                if *i >= n {
                    return Err(Error::Sim(format!("wait for unknown request {i}")));
                }
                (None, if st.released[*i] { st.t } else { f64::INFINITY })
            }
            Action::WaitUntil(x) => (None, x.max(st.t)),
            Action::Serve(i) => {
                let i = *i;
                let ok = i < n && st.released[i] && !st.served[i];
                if !ok {
                    return Err(Error::Sim(format!("cannot serve request {i} at t={}", st.t)));
                }
                let loc = st.locations[i].clone().unwrap();
                if space.dist(&st.pos, &loc) > 1e-7 {
                    return Err(Error::Sim(format!("serve {i} away from its location")));
                }
                st.served[i] = true;
                st.served_at[i] = st.t;
                st.note(EventKind::Serve, Some(i));
                plan.pop_front();
                started = false;
                continue;
            }
            Action::Wake => {
                plan.pop_front();
                started = false;
                let p = policy.on_wake(&st.view())?;
                adopt(&mut st, &mut plan, &mut started, p);
                continue;
            }
        };
        if !started {
            started = true;
            if target.is_some() && end > st.t {
                st.note(EventKind::Depart, None);
            } else if target.is_none() && end > st.t {
                st.note(EventKind::WaitStart, None);
            }
        }
        let next_dec = adv.next_time();
        match next_dec {
            Some(td) if td < end || (td <= end && target.is_none()) => {
                if let Some(p) = &target {
                    st.pos = space.step(&st.pos, p, td - st.t);
                }
                st.t = td;
                let p = process(&mut st, adv, policy, false)?;
                adopt(&mut st, &mut plan, &mut started, p);
            }
            _ => {
                if end.is_infinite() {
                    return Err(Error::Sim(format!("waiting at t={} for a release that never comes", st.t)));
                }
                let moved = end > st.t;
                st.t = end;
                if let Some(p) = target {
                    st.pos = p;
                    if moved {
                        st.note(EventKind::Arrive, None);
                    }
                } else if moved {
                    st.note(EventKind::WaitEnd, None);
                }
                plan.pop_front();
                started = false;
            }
        }
    }
    Err(Error::Sim("step limit reached".into()))
}

fn realized_instance(setup: &Setup, st: &State) -> Result<Instance> {
    let reqs = (0..st.released.len())
        .map(|i| (st.locations[i].clone().expect("all released"), st.release_times[i]))
        .collect();
    Instance::new(setup.space.clone(), reqs, setup.predictions.clone(), setup.variant)
}

pub fn simulate(inst: &Instance, policy: &mut dyn Policy) -> Result<RunResult> {
    run_adaptive(&mut StaticAdversary::new(inst), policy)
}
