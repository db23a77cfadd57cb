//! Command-line interface.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::cost::{CostMode, CostModel};
use crate::env::{AgentMode, EnvConfig, History, PresolveEnv, TwoArmedEnv, FEATURE_NAMES};
use crate::harness::{self, EvalConfig, Method, Routine, RoutineKind};
use crate::instancegen::{self, Family, GenSpec, Manifest, ManifestEntry};
use crate::lp::{LpProblem, Status};
use crate::policy::Checkpoint;
use crate::presolve::PresolverId;
use crate::simplex::SolverOptions;
use crate::trainer::{self, Trainer, TrainerConfig};

#[derive(Debug, Parser)]
#[command(name = "rl-presolve", version, about = "LP presolve with learned presolve routines")]
pub struct Cli {
    /// Seed for generation, training and stochastic routines.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// `work_units` (deterministic) or `wall_clock`.
    #[arg(long, global = true, default_value = "work_units")]
    pub cost_model: CostMode,
    /// Trainer configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a corpus of MPS files with a manifest.
    Gen(GenArgs),
    /// Run a routine and write the reduced problem.
    Presolve(PresolveArgs),
    /// Presolve with a routine, solve and postsolve.
    Solve(SolveArgs),
    /// Train a presolve agent.
    Train(TrainArgs),
    /// Compare routines on an instance set.
    Eval(EvalArgs),
    /// Extract a fixed routine from a trained agent.
    Extract(ExtractArgs),
    /// Print the observation vector of a problem.
    Features(FeaturesArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// set_covering, facility_location, multicommodity_flow,
    /// generalized_network_flow or redundancy_heavy.
    #[arg(long)]
    pub family: String,
    /// Comma-separated `key=value` overrides of the family defaults.
    #[arg(long, default_value = "")]
    pub params: String,
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RoutineArg {
    /// Preset name (default, off, enhance-v1, enhance-v2, reorder, topN,
    /// lastN, iter±N) or a routine JSON file.
    #[arg(long, default_value = "default")]
    pub routine: String,
    /// Trained checkpoint for learned routines.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PresolveArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub routine: RoutineArg,
    /// Where to write the reduced problem.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub routine: RoutineArg,
    /// Print a JSON record instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InstanceSource {
    /// Directory of MPS files.
    #[arg(long)]
    pub instances: Option<PathBuf>,
    /// Generate instances of this family instead.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value = "")]
    pub params: String,
    #[arg(long, default_value_t = 40)]
    pub count: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: InstanceSource,
    /// Validation MPS directory; defaults to the last fifth of the instances.
    #[arg(long)]
    pub validation: Option<PathBuf>,
    /// Train on the two-armed toy environment.
    #[arg(long)]
    pub toy: bool,
    #[arg(long, default_value = "full")]
    pub mode: AgentMode,
    /// Trainer config override `key=value` (repeatable).
    #[arg(long = "set")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Output directory for checkpoints and metrics.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Comma-separated presets or routine JSON files.
    #[arg(long, default_value = "default,enhance-v1,enhance-v2")]
    pub methods: String,
    #[command(flatten)]
    pub source: InstanceSource,
    /// Instances used to rank presolvers for topN/lastN; defaults to the
    /// evaluated set.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Comma-separated seeds for stochastic methods.
    #[arg(long, default_value = "0,1,2,3")]
    pub seeds: String,
    /// Write per-instance rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Benchmark instances whose mean state drives sampling.
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long)]
    pub validation: PathBuf,
    #[arg(short, default_value_t = 20)]
    pub k: usize,
    /// Routine JSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write policy tables at the mean state as CSV.
    #[arg(long)]
    pub tables: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
}

pub fn run<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let cost = CostModel::with_mode(cli.cost_model);
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Gen(a) => gen(a, seed),
        Command::Presolve(a) => presolve_cmd(a, &cost, seed),
        Command::Solve(a) => solve_cmd(a, &cost, seed),
        Command::Train(a) => train_cmd(a, &cli, &cost),
        Command::Eval(a) => eval_cmd(a, &cost, seed),
        Command::Extract(a) => extract_cmd(a, &cost, seed),
        Command::Features(a) => features_cmd(a),
    }
}

fn gen(a: &GenArgs, seed: u64) -> Result<()> {
    let family = Family::parse(&a.family, &a.params)?;
    let spec = GenSpec { family, seed };
    std::fs::create_dir_all(&a.out)?;
    let mut entries = Vec::new();
    for k in 0..a.count {
        let lp = instancegen::generate_indexed(&spec, k)?;
        let file = format!("{}.mps", lp.name);
        crate::mps::write_file(&lp, a.out.join(&file))?;
        entries.push(ManifestEntry {
            file,
            index: k,
            rows: lp.num_rows(),
            cols: lp.num_cols(),
            nnz: lp.nnz(),
        });
    }
    let manifest = Manifest {
        distributions: instancegen::distributions(&spec.family).to_string(),
        spec,
        instances: entries,
    };
    std::fs::write(a.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    println!("wrote {} instances to {}", a.count, a.out.display());
    Ok(())
}

fn load_routine(arg: &RoutineArg) -> Result<Routine> {
    let p = Path::new(&arg.routine);
    if p.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return Ok(Routine::from_json(&text)?);
    }
    Routine::preset(&arg.routine).with_context(|| format!("unknown routine {:?}", arg.routine))
}

/// Turns a routine into a runnable method, ranking presolvers on
/// `profile_set` and loading checkpoints as needed.
fn to_method(r: Routine, profile_set: &[LpProblem], checkpoint: Option<&Path>) -> Result<Method> {
    if r.kind == RoutineKind::Learned {
        let path = r
            .checkpoint
            .as_deref()
            .or(checkpoint)
            .context("learned routine needs --checkpoint")?;
        let ck = Checkpoint::load(path).with_context(|| format!("loading {}", path.display()))?;
        return Ok(Method::Learned {
            name: r.name,
            agent: Arc::new(ck.agent),
        });
    }
    let ranking = matches!(r.kind, RoutineKind::TopK | RoutineKind::LastK).then(|| harness::profile(profile_set));
    Ok(Method::Routine(r.resolve(ranking.as_ref())?))
}

fn presolve_cmd(a: &PresolveArgs, cost: &CostModel, seed: u64) -> Result<()> {
    let lp = crate::mps::read_file(&a.file)?;
    let r = load_routine(&a.routine)?;
    if r.kind == RoutineKind::Learned {
        bail!("presolve supports static routines; use solve for learned ones");
    }
    let Method::Routine(r) = to_method(r, std::slice::from_ref(&lp), None)? else {
        unreachable!()
    };
    let r = Routine {
        seed: r.seed.or(Some(seed)),
        ..r
    };
    let run = harness::run_presolve(&r, &lp, cost)?;
    println!(
        "routine {}: rounds {} presolvers {} rows {}→{} cols {}→{} nnz {}→{} cost {}{}",
        r.name,
        run.rounds,
        run.presolvers,
        lp.num_rows(),
        run.lp.num_rows(),
        lp.num_cols(),
        run.lp.num_cols(),
        lp.nnz(),
        run.lp.nnz(),
        run.presolve_cost,
        if run.infeasible { " (infeasible)" } else { "" }
    );
    if let Some(out) = &a.out {
        let (reduced, _) = run.lp.compact();
        crate::mps::write_file(&reduced, out)?;
    }
    Ok(())
}

fn solve_cmd(a: &SolveArgs, cost: &CostModel, seed: u64) -> Result<()> {
    let lp = crate::mps::read_file(&a.file)?;
    let r = load_routine(&a.routine)?;
    let m = to_method(r, std::slice::from_ref(&lp), a.routine.checkpoint.as_deref())?;
    let cfg = EvalConfig {
        cost: *cost,
        ..EvalConfig::default()
    };
    let row = harness::run_method(&m, &lp, &cfg, seed)?;
    if a.json {
        println!("{}", serde_json::to_string(&row)?);
    } else {
        println!("status: {}", row.status);
        match row.objective {
            Some(o) => println!("objective: {o}"),
            None => println!("objective: -"),
        }
        println!("nnz reduction: {:.2}%", row.nnz_reduction_pct);
        println!(
            "cost: {} (presolve {}, lp {}), presolvers {}",
            row.cost, row.presolve_cost, row.lp_cost, row.presolver_count
        );
    }
    if row.status != Status::Optimal && !a.json {
        eprintln!("problem is {}", row.status);
    }
    Ok(())
}

fn load_source(s: &InstanceSource, seed: u64) -> Result<Vec<LpProblem>> {
    match (&s.instances, &s.family) {
        (Some(dir), None) => {
            let v = harness::load_instances(dir)?;
            if v.is_empty() {
                bail!("no .mps files in {}", dir.display());
            }
            Ok(v)
        }
        (None, Some(f)) => {
            let spec = GenSpec {
                family: Family::parse(f, &s.params)?,
                seed,
            };
            (0..s.count)
                .map(|k| instancegen::generate_indexed(&spec, k).map_err(Into::into))
                .collect()
        }
        _ => bail!("give exactly one of --instances or --family"),
    }
}

fn trainer_config(cli: &Cli, a: &TrainArgs) -> Result<TrainerConfig> {
    let mut cfg = match &cli.config {
        Some(p) => TrainerConfig::from_toml(&std::fs::read_to_string(p)?)?,
        None => TrainerConfig::default(),
    };
    let mut ov = a.overrides.clone();
    if let Some(s) = cli.seed {
        ov.push(format!("seed={s}"));
    }
    if let Some(n) = a.iterations {
        ov.push(format!("iterations={n}"));
    }
    if !ov.is_empty() {
        cfg = cfg.with_overrides(&ov)?;
    }
    Ok(cfg)
}

fn train_cmd(a: &TrainArgs, cli: &Cli, cost: &CostModel) -> Result<()> {
    let cfg = trainer_config(cli, a)?;
    std::fs::create_dir_all(&a.out)?;
    std::fs::write(a.out.join("config.toml"), cfg.to_toml())?;
    let outcome = if a.toy {
        let env = TwoArmedEnv::new(vec![PresolverId::MakeFixed]).with_mode(a.mode);
        let mut val = env.clone();
        let seed = cfg.seed;
        let mut f = move |ag: &crate::policy::Agent| trainer::mean_episode_cost(&mut val, ag, seed);
        Trainer::new(cfg, env)?.train(Some(&mut f))?
    } else {
        let mut all = load_source(&a.source, cfg.seed)?;
        let val = match &a.validation {
            Some(d) => harness::load_instances(d)?,
            None => {
                if all.len() < 2 {
                    bail!("need at least two instances to split off validation");
                }
                let n = (all.len() / 5).max(1);
                all.split_off(all.len() - n)
            }
        };
        let env_cfg = EnvConfig {
            cost: *cost,
            mode: a.mode,
            solver: SolverOptions::default(),
            action_space: PresolverId::ALL.to_vec(),
        };
        let env = PresolveEnv::new(Arc::new(all), env_cfg.clone());
        let mut val_env = PresolveEnv::new(Arc::new(val), env_cfg);
        let seed = cfg.seed;
        let mut f = move |ag: &crate::policy::Agent| trainer::mean_episode_cost(&mut val_env, ag, seed);
        Trainer::new(cfg, env)?.train(Some(&mut f))?
    };
    outcome.best.save(&a.out.join("best.json"))?;
    outcome.last.save(&a.out.join("last.json"))?;
    trainer::write_metrics(&a.out.join("metrics.csv"), &outcome.log)?;
    println!(
        "trained {} iterations; best validation cost {} at iteration {}",
        outcome.log.len(),
        outcome.best_validation.map_or("-".into(), |v| v.to_string()),
        outcome.best.iteration
    );
    Ok(())
}

fn eval_cmd(a: &EvalArgs, cost: &CostModel, seed: u64) -> Result<()> {
    let instances = load_source(&a.source, seed)?;
    let profile_set = match &a.profile {
        Some(d) => harness::load_instances(d)?,
        None => instances.clone(),
    };
    let seeds: Vec<u64> = a
        .seeds
        .split(',')
        .map(|s| s.trim().parse().with_context(|| format!("bad seed {s:?}")))
        .collect::<Result<_>>()?;
    if seeds.is_empty() {
        bail!("need at least one seed");
    }
    let mut methods = Vec::new();
    for name in a.methods.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let r = load_routine(&RoutineArg {
            routine: name.to_string(),
            checkpoint: None,
        })?;
        methods.push(to_method(r, &profile_set, a.checkpoint.as_deref())?);
    }
    if methods.is_empty() {
        bail!("no methods given");
    }
    let cfg = EvalConfig {
        cost: *cost,
        seeds,
        ..EvalConfig::default()
    };
    let report = harness::evaluate(&methods, &instances, &cfg)?;
    print!("{}", report.table());
    match &a.csv {
        Some(p) => std::fs::write(p, report.to_csv())?,
        None => print!("{}", report.to_csv()),
    }
    Ok(())
}

fn extract_cmd(a: &ExtractArgs, cost: &CostModel, seed: u64) -> Result<()> {
    let ck = Checkpoint::load(&a.checkpoint)?;
    let bench = harness::load_instances(&a.instances)?;
    let val = harness::load_instances(&a.validation)?;
    if bench.is_empty() || val.is_empty() || a.k == 0 {
        bail!("need instances, validation instances and k > 0");
    }
    let cfg = EvalConfig {
        cost: *cost,
        ..EvalConfig::default()
    };
    let (routine, c) = harness::extract_rules(&ck.agent, &bench, &val, a.k, &cfg, seed)?;
    std::fs::write(&a.out, routine.to_json())?;
    if let Some(t) = &a.tables {
        std::fs::write(t, harness::policy_tables(&ck.agent, &bench).to_csv())?;
    }
    let names: Vec<&str> = routine.sequence.iter().map(|p| p.name()).collect();
    println!("extracted [{}] with validation cost {c}", names.join(", "));
    Ok(())
}

fn features_cmd(a: &FeaturesArgs) -> Result<()> {
    let lp = crate::mps::read_file(&a.file)?;
    let f = crate::env::extract(&lp, &History::new(&lp));
    if a.json {
        let map: serde_json::Map<String, serde_json::Value> = FEATURE_NAMES
            .iter()
            .zip(&f)
            .map(|(n, v)| (n.to_string(), serde_json::json!(v)))
            .collect();
        println!("{}", serde_json::to_string_pretty(&map)?);
    } else {
        for (k, (n, v)) in FEATURE_NAMES.iter().zip(&f).enumerate() {
            println!("{k:>2} {n:<22} {v}");
        }
    }
    Ok(())
}
