//! `oltsp`: validate spaces, replay instances and fixtures, run ratio sweeps
//! and generate instance files.
//!
//! Exit status is 0 iff nothing violated its guarantee (or its fixture
//! expectation, or the space invariants for `validate`).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use oltsp::bench::{eta_rng, generate, guarantee, instance_id, perturb_toward, run_fixture, sweep, Algo, FixtureId, SweepSpec};
use oltsp::oracle::OracleKind;
use oltsp::sim::{prediction_error, Instance, Variant};
use oltsp::space::SpaceDesc;
use oltsp::swag::{la_swag, swag, EngineConfig, EngineRun};
use oltsp::tsp::{opt_bruteforce, opt_release_dp, BRUTEFORCE_CAP, RELEASE_DP_CAP};

/// Slack on the ratio check of `run`.
const RUN_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "oltsp", version, about = "Learning-augmented online TSP: LA-SWAG runs, fixtures and ratio sweeps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Swag,
    LaSwag,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    General,
    Tree,
    Ring,
    Flower,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Open,
    Closed,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a space descriptor (or the space of an instance file).
    Validate { file: PathBuf },
    /// Run one instance and compare against the exact offline optimum.
    Run {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "la-swag")]
        algo: AlgoArg,
        /// Defaults to the natural oracle of the space.
        #[arg(long, value_enum)]
        oracle: Option<OracleArg>,
        /// Overrides the variant stored in the instance.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, value_enum, default_value = "on")]
        breaking_rule: Switch,
        /// Write the trajectory as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Print every oracle batch.
        #[arg(long)]
        dump_batches: bool,
    },
    /// Replay a tightness instance or lower-bound adversary (`all` runs every one).
    Fixture {
        id: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Grid steps of the open-line adversary.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Ratio sweep; writes CSV, a summary and a gnuplot script.
    Sweep {
        spec: PathBuf,
        /// CSV path; overrides the spec's `output`. Without either, the CSV
        /// goes to stdout and the summary to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the instances of a spec (and their perturbed copies per η target).
    Gen {
        spec: PathBuf,
        /// Directory for one JSON file per instance; stdout gets a JSON array otherwise.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_spec(path: &Path) -> Result<SweepSpec> {
    let spec: SweepSpec = serde_json::from_value(read_json(path)?).with_context(|| format!("sweep spec {}", path.display()))?;
    spec.check()?;
    Ok(spec)
}

fn validate(file: &Path) -> Result<bool> {
    let v = read_json(file)?;
    let desc = v.get("space").unwrap_or(&v);
    let desc: SpaceDesc = serde_json::from_value(desc.clone()).context("space descriptor")?;
    let space = desc.build()?;
    let mut issues = space.validate();
    if issues.is_empty() && v.get("space").is_some() {
        if let Err(e) = Instance::from_json(&v) {
            issues.push(e.to_string());
        }
    }
    if issues.is_empty() {
        println!("ok: {} space", space.kind().name());
    }
    for i in &issues {
        println!("violation: {i}");
    }
    Ok(issues.is_empty())
}

fn exact_opt(inst: &Instance) -> Result<Option<f64>> {
    Ok(if inst.n() <= BRUTEFORCE_CAP {
        Some(opt_bruteforce(inst)?.length)
    } else if inst.n() <= RELEASE_DP_CAP {
        Some(opt_release_dp(inst)?)
    } else {
        None
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn trajectory_csv(inst: &Instance, run: &EngineRun) -> String {
    let mut out = String::from("time,event,request,point\n");
    for e in &run.result.trajectory {
        let req = e.request.map_or(String::new(), |r| r.to_string());
        let pt = inst.space.point_to_json(&e.point).to_string();
        out.push_str(&format!("{},{},{},{}\n", e.time, e.kind.name(), req, csv_field(&pt)));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn run(
    path: &Path,
    algo: AlgoArg,
    oracle: Option<OracleArg>,
    variant: Option<VariantArg>,
    rule: Switch,
    trajectory: Option<&Path>,
    dump: bool,
) -> Result<bool> {
    let mut inst = Instance::from_json(&read_json(path)?)?;
    if let Some(v) = variant {
        inst.variant = match v {
            VariantArg::Open => Variant::Open,
            VariantArg::Closed => Variant::Closed,
        };
    }
    let kind = match oracle {
        None => OracleKind::natural(inst.space.kind()),
        Some(OracleArg::General) => OracleKind::General,
        Some(OracleArg::Tree) => OracleKind::Tree,
        Some(OracleArg::Ring) => OracleKind::Ring,
        Some(OracleArg::Flower) => OracleKind::Flower,
    };
    let mut cfg = EngineConfig::new(kind);
    cfg.breaking_rule = rule == Switch::On;
    let res = match algo {
        AlgoArg::Swag => swag(&inst, kind)?,
        AlgoArg::LaSwag => la_swag(&inst, &cfg)?,
    };
    let eta = prediction_error(&inst)?;
    let alg = res.result.completion_time;
    println!(
        "instance: {} {} n={} eta={eta:.6}; algo={} oracle={} breaking_rule={}",
        inst.space.kind().name(),
        inst.variant.name(),
        inst.n(),
        match algo {
            AlgoArg::Swag => Algo::Swag.name(),
            AlgoArg::LaSwag => Algo::LaSwag.name(),
        },
        kind.name(),
        if cfg.breaking_rule && matches!(algo, AlgoArg::LaSwag) { "on" } else { "off" }
    );
    if let Some(d) = &res.decision {
        println!("start: t={:.6} witness={:?} chosen={:?}", d.t, d.witness, d.chosen);
    }
    if res.result.fired_break_rule() {
        println!("breaking rule fired");
    }
    let sizes: Vec<usize> = res.batches.iter().map(|b| b.size).collect();
    println!("oracle batches: {sizes:?}, cumulative set {}", res.set_size);
    if dump {
        for (k, b) in res.batches.iter().enumerate() {
            println!(
                "batch {k}: t={} released={} choices={} size={} added={} bound={}",
                b.time, b.released, b.choices, b.size, b.added, b.bound
            );
        }
    }
    if let Some(p) = trajectory {
        fs::write(p, trajectory_csv(&inst, &res)).with_context(|| format!("writing {}", p.display()))?;
    }
    let ok = match exact_opt(&inst)? {
        Some(opt) => {
            let ratio = if opt > oltsp::TOL { alg / opt } else if alg <= oltsp::TOL { 1.0 } else { f64::INFINITY };
            let bound = guarantee(eta, inst.space.kind(), inst.variant);
            let ok = ratio <= bound + RUN_TOL;
            println!("|ALG| = {alg:.9}, |OPT| = {opt:.9}, ratio = {ratio:.9}, guarantee = {bound:.9}: {}", if ok { "ok" } else { "VIOLATION" });
            ok
        }
        None => {
            println!("|ALG| = {alg:.9}; n = {} is above the exact-optimum cap, ratio not checked", inst.n());
            true
        }
    };
    Ok(ok)
}

fn fixture(id: &str, eps: Option<f64>, lambda: Option<f64>, steps: Option<usize>) -> Result<bool> {
    let names: Vec<&str> = if id == "all" { FixtureId::NAMES.to_vec() } else { vec![id] };
    let mut ok = true;
    for name in names {
        let mut f = FixtureId::parse(name, eps, lambda)?;
        if let (FixtureId::OpenLineAdversary { .. }, Some(k)) = (f, steps) {
            if k == 0 {
                bail!("--steps must be positive");
            }
            f = FixtureId::OpenLineAdversary { steps: k };
        }
        let r = run_fixture(f)?;
        ok &= r.pass;
        println!("{}", r.line());
    }
    Ok(ok)
}

fn sibling(csv: &Path, ext: &str) -> PathBuf {
    csv.with_extension(ext)
}

fn run_sweep(path: &Path, out: Option<PathBuf>) -> Result<bool> {
    let spec = read_spec(path)?;
    let report = sweep(&spec)?;
    let summary = report.summary();
    match out.or_else(|| spec.output.as_ref().map(PathBuf::from)) {
        Some(csv) => {
            fs::write(&csv, report.csv()).with_context(|| format!("writing {}", csv.display()))?;
            let gp = sibling(&csv, "gp");
            fs::write(&gp, report.gnuplot(&csv.to_string_lossy()))?;
            let sum = sibling(&csv, "summary.txt");
            fs::write(&sum, &summary)?;
            print!("{summary}");
            println!("wrote {}, {}, {}", csv.display(), gp.display(), sum.display());
        }
        None => {
            print!("{}", report.csv());
            eprint!("{summary}");
        }
    }
    Ok(report.violations().is_empty())
}

fn gen(path: &Path, out_dir: Option<PathBuf>) -> Result<bool> {
    let spec = read_spec(path)?;
    let mut files: Vec<(String, Value)> = Vec::new();
    for (idx, inst) in generate(&spec)?.iter().enumerate() {
        let id = instance_id(&spec, idx);
        files.push((id.clone(), inst.to_json()));
        for (k, &target) in spec.etas.iter().enumerate().filter(|(_, &t)| t > 0.0) {
            match perturb_toward(inst, target, &mut eta_rng(spec.seed, k, idx)) {
                Ok((p, _)) => files.push((format!("{id}.eta{k}"), p.to_json())),
                Err(e) => eprintln!("skipped {id} at eta {target}: {e}"),
            }
        }
    }
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            for (id, v) in &files {
                fs::write(dir.join(format!("{id}.json")), serde_json::to_string_pretty(v)? + "\n")?;
            }
            println!("wrote {} instance files to {}", files.len(), dir.display());
        }
        None => {
            let all: Vec<Value> = files.into_iter().map(|(id, mut v)| {
                v["id"] = Value::String(id);
                v
            }).collect();
            println!("{}", serde_json::to_string_pretty(&all)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Validate { file } => validate(&file),
        Cmd::Run { instance, algo, oracle, variant, breaking_rule, trajectory, dump_batches } => {
            run(&instance, algo, oracle, variant, breaking_rule, trajectory.as_deref(), dump_batches)
        }
        Cmd::Fixture { id, eps, lambda, steps } => fixture(&id, eps, lambda, steps),
        Cmd::Sweep { spec, out } => run_sweep(&spec, out),
        Cmd::Gen { spec, out_dir } => gen(&spec, out_dir),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
