//! Randomized invariants of the simulator and the engine, as proptest
//! properties over seeded random instances.

use oltsp::bench::{item_rng, random_instance, random_predictions, random_space};
use oltsp::oracle::OracleKind;
use oltsp::sim::{prediction_error, released_fraction, EventKind, Instance, Variant};
use oltsp::space::SpaceKind;
use oltsp::swag::{la_swag, EngineConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::Rng;

pub const SPACES: [SpaceKind; 6] =
    [SpaceKind::Line, SpaceKind::Euclid2D, SpaceKind::Tree, SpaceKind::Ring, SpaceKind::Flower, SpaceKind::General];

/// A random instance description: space family, variant, size, seed and
/// whether predictions are drawn independently of the truth.
#[derive(Clone, Debug)]
pub struct Case {
    pub space: SpaceKind,
    pub variant: Variant,
    pub n: usize,
    pub seed: u64,
    pub noisy: bool,
}

impl Case {
    pub fn instance(&self) -> Instance {
        let mut rng = item_rng(self.seed, self.n as u64);
        let sp = random_space(self.space, 4, 2, &mut rng);
        let inst = random_instance(sp, self.n, self.variant, &mut rng).unwrap();
        if self.noisy {
            random_predictions(&inst, &mut rng)
        } else {
            inst
        }
    }
}

pub fn arb_case(n_max: usize) -> impl Strategy<Value = Case> {
    (0..SPACES.len(), any::<bool>(), 0..=n_max, any::<u64>(), any::<bool>()).prop_map(|(s, closed, n, seed, noisy)| Case {
        space: SPACES[s],
        variant: if closed { Variant::Closed } else { Variant::Open },
        n,
        seed,
        noisy,
    })
}

/// η is unchanged when every length and time is scaled by c.
pub fn eta_scale_invariance(case: &Case, c: f64) -> Result<(), TestCaseError> {
    let inst = case.instance();
    let a = prediction_error(&inst).unwrap();
    let b = prediction_error(&inst.scaled(c)).unwrap();
    prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "eta {a} vs scaled {b} (c = {c})");
    Ok(())
}

/// For a fixed order, the released fraction never decreases over time and
/// equals 1 once everything is released.
pub fn alpha_monotone(case: &Case, shuffle: u64) -> Result<(), TestCaseError> {
    let inst = case.instance();
    let n = inst.n();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut item_rng(shuffle, 0));
    let rel = inst.releases();
    let mut times: Vec<f64> = rel.clone();
    let mut rng = item_rng(shuffle, 1);
    let last = rel.iter().copied().fold(0.0, f64::max);
    for _ in 0..8 {
        times.push(rng.gen_range(0.0..=last + 1.0));
    }
    times.push(0.0);
    times.sort_by(f64::total_cmp);
    let mut prev = -1.0;
    for &t in &times {
        let a = released_fraction(&inst.space, &inst.origin, &inst.predictions, &rel, &perm, inst.variant, t);
        prop_assert!(a >= prev - 1e-12, "alpha dropped from {prev} to {a} at t = {t}");
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
        prev = a;
    }
    let a = released_fraction(&inst.space, &inst.origin, &inst.predictions, &rel, &perm, inst.variant, last);
    prop_assert!((a - 1.0).abs() <= 1e-12, "alpha = {a} with everything released");
    Ok(())
}

/// Consecutive trajectory samples are at most Δt apart, every request is
/// served at its true location after its release, and a closed run ends at
/// the origin.
pub fn unit_speed(case: &Case) -> Result<(), TestCaseError> {
    let inst = case.instance();
    let run = la_swag(&inst, &EngineConfig::new(OracleKind::natural(case.space))).unwrap().result;
    for w in run.trajectory.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        prop_assert!(b.time >= a.time - 1e-12, "time went back");
        let d = inst.space.dist(&a.point, &b.point);
        prop_assert!(d <= b.time - a.time + 1e-9, "moved {d} in {}", b.time - a.time);
    }
    for (i, r) in inst.requests.iter().enumerate() {
        let t = run.served_at[i];
        prop_assert!(t >= r.release - 1e-12, "request {i} served at {t} before release {}", r.release);
        let ev = run.trajectory.iter().find(|e| e.request == Some(i) && matches!(e.kind, EventKind::Serve));
        prop_assert!(ev.is_some_and(|e| inst.space.dist(&e.point, &r.location) <= 1e-7), "request {i} not served in place");
    }
    if inst.variant == Variant::Closed {
        let end = &run.trajectory.last().unwrap().point;
        prop_assert!(inst.space.dist(end, &inst.origin) <= 1e-7);
    }
    Ok(())
}

/// LA-SWAG never finishes later than the same policy without the breaking
/// rule.
pub fn breaking_rule_monotone(case: &Case) -> Result<(), TestCaseError> {
    let inst = case.instance();
    let cfg = EngineConfig::new(OracleKind::natural(case.space));
    let with = la_swag(&inst, &cfg).unwrap().result.completion_time;
    let without = la_swag(&inst, &cfg.without_breaking_rule()).unwrap().result.completion_time;
    prop_assert!(with <= without + 1e-9, "with rule {with} > without {without}");
    Ok(())
}

fn done<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{e}"))
}

/// Runs the four properties with `cases` trials each on a fixed RNG;
/// returns (name, trials, outcome).
pub fn run_suite(cases: u32, n_max: usize) -> Vec<(&'static str, u32, Result<(), String>)> {
    let runner = || {
        TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    };
    vec![
        ("eta scale invariance", cases, done(runner().run(&(arb_case(n_max), 0.01f64..100.0), |(c, k)| eta_scale_invariance(&c, k)))),
        ("alpha monotonicity", cases, done(runner().run(&(arb_case(n_max), any::<u64>()), |(c, s)| alpha_monotone(&c, s)))),
        ("unit-speed trajectory", cases, done(runner().run(&arb_case(n_max), |c| unit_speed(&c)))),
        ("breaking-rule monotonicity", cases, done(runner().run(&arb_case(n_max), |c| breaking_rule_monotone(&c)))),
    ]
}
