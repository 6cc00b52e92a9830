//! Command-line front end: one-shot planning, closed-loop simulation,
//! planner benchmarks and primitive listing.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use legplan::footstep::footstep_sequence;
use legplan::search::{ara_star, AnytimeSchedule, Budget, HeuristicKind};
use legplan::sim::{
    benchmark_goals, generate_benchmark_terrain, reveal_obstacle_scenario, run_benchmark, run_closed_loop, scene_svg,
    BenchConfig, BenchmarkKind, BenchmarkParams, PlannerKind, Scene, SimConfig, SimOutcome, BENCH_START,
};
use legplan::terrain::load_heightmap;
use legplan::{ConfigError, PlanError, PlannerConfig, Pose2, TerrainMaps};

const EXIT_NO_PLAN: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "legplan", version, about = "Body-action and footstep planning for quadrupeds on rough terrain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan once on a map file or a generated benchmark terrain.
    Plan(PlanArgs),
    /// Run the perceive-plan-step loop in a partially observed world.
    Simulate(SimulateArgs),
    /// Compare A* and ARA* on the benchmark terrains.
    Bench(BenchArgs),
    /// Print the motion primitive set as TOML.
    DumpPrimitives(DumpArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlannerArg {
    #[value(name = "a*", alias = "astar", alias = "a_star")]
    AStar,
    #[value(name = "ara*", alias = "arastar", alias = "ara_star")]
    AraStar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HeuristicArg {
    Guarded,
    Faithful,
    Zero,
}

impl From<HeuristicArg> for HeuristicKind {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Guarded => HeuristicKind::Guarded,
            HeuristicArg::Faithful => HeuristicKind::Faithful,
            HeuristicArg::Zero => HeuristicKind::Zero,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TerrainArg {
    SteppingStones,
    Pallet,
    Stair,
    Gap,
}

impl From<TerrainArg> for BenchmarkKind {
    fn from(t: TerrainArg) -> Self {
        match t {
            TerrainArg::SteppingStones => BenchmarkKind::SteppingStones,
            TerrainArg::Pallet => BenchmarkKind::Pallet,
            TerrainArg::Stair => BenchmarkKind::Stair,
            TerrainArg::Gap => BenchmarkKind::Gap,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    /// Height map in the plain-text grid format.
    #[arg(long, conflicts_with = "benchmark", required_unless_present = "benchmark")]
    map: Option<PathBuf>,
    /// Generated benchmark terrain.
    #[arg(long, value_enum)]
    benchmark: Option<TerrainArg>,
    /// Seed of the generated terrain.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start pose `x,y[,theta_deg]`; defaults to the benchmark start.
    #[arg(long, value_parser = parse_pose)]
    start: Option<Pose2>,
    /// Goal pose `x,y[,theta_deg]`; defaults to the straight-ahead benchmark goal.
    #[arg(long, value_parser = parse_pose)]
    goal: Option<Pose2>,
    #[arg(long, value_enum, default_value = "ara*")]
    planner: PlannerArg,
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicArg>,
    /// Initial inflation of ARA*.
    #[arg(long)]
    epsilon0: Option<f64>,
    /// Wall-time budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Expansion budget.
    #[arg(long)]
    expansions: Option<u64>,
    /// Planner configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value` overrides, e.g. `body.terrain=2` or `search.schedule.epsilon_step=0.5`.
    #[arg(long, value_delimiter = ',')]
    weights: Vec<String>,
    /// Body actions covered by the footstep plan; all by default.
    #[arg(long)]
    horizon: Option<usize>,
    /// Plan output (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scene output (SVG).
    #[arg(long)]
    render: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// True-world height map; the generated reveal-an-obstacle world otherwise.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Seed of the generated world. Its start and goal replace the configured ones.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for `trace.json`, `cycles.csv` and `scene.svg`.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// `all` or a single terrain name.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 9)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// CSV table output; printed to stdout otherwise.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Per-trial rows (JSON).
    #[arg(long)]
    rows: Option<PathBuf>,
    /// Fill the `time_s` column with wall time.
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicArg>,
    #[arg(long)]
    epsilon0: Option<f64>,
}

#[derive(Args)]
struct DumpArgs {
    /// Planner configuration file (TOML) to read primitives and geometry from.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print JSON instead of TOML.
    #[arg(long)]
    json: bool,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure { code: EXIT_CONFIG, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn config_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_CONFIG, error: e.into() }
}

fn parse_pose(s: &str) -> Result<Pose2, String> {
    let parts: Vec<f64> =
        s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"))).collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y] => Ok(Pose2::new(x, y, 0.0)),
        [x, y, deg] => Ok(Pose2::new(x, y, deg.to_radians())),
        _ => Err("expected x,y or x,y,theta_deg".into()),
    }
}

fn main() -> ExitCode {
    // Usage errors are configuration errors; clap would exit with 2 (no plan).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::DumpPrimitives(a) => cmd_dump(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_planner_config(path: Option<&Path>, overrides: &[String]) -> Result<PlannerConfig, Failure> {
    let mut cfg = match path {
        Some(p) => {
            PlannerConfig::load(p).with_context(|| format!("reading {}", p.display())).map_err(config_failure)?
        }
        None => PlannerConfig::default(),
    };
    cfg.apply_overrides(overrides)?;
    Ok(cfg)
}

/// Writes to stdout, ignoring a closed pipe.
fn print_stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_plan(a: PlanArgs) -> Result<(), Failure> {
    let mut cfg = load_planner_config(a.config.as_deref(), &a.weights)?;
    if let Some(h) = a.heuristic {
        cfg.search.heuristic = h.into();
    }
    if let Some(e) = a.epsilon0 {
        cfg.search.schedule.epsilon_0 = e;
        cfg.search.schedule.final_epsilon = cfg.search.schedule.final_epsilon.min(e);
    }
    if a.time_budget.is_some() {
        cfg.search.budget.time_s = a.time_budget;
    }
    if a.expansions.is_some() {
        cfg.search.budget.expansions = a.expansions;
    }
    cfg.validate()?;
    let schedule = match a.planner {
        PlannerArg::AStar => AnytimeSchedule::optimal(),
        PlannerArg::AraStar => cfg.search.schedule,
    };

    let height = match (&a.map, a.benchmark) {
        (Some(p), _) => {
            load_heightmap(p).with_context(|| format!("loading {}", p.display())).map_err(config_failure)?
        }
        (None, Some(kind)) => generate_benchmark_terrain(kind.into(), &BenchmarkParams::default(), a.seed)?,
        (None, None) => unreachable!("clap requires one of --map and --benchmark"),
    };
    let (start, goal) = match (a.start, a.goal, a.benchmark) {
        (Some(s), Some(g), _) => (s, g),
        (s, g, Some(_)) => (s.unwrap_or(BENCH_START), g.unwrap_or(benchmark_goals()[4])),
        _ => return Err(config_failure(anyhow::anyhow!("--start and --goal are required with --map"))),
    };
    let maps = TerrainMaps::build(height, cfg.terrain.clone()).map_err(config_failure)?;
    let model = cfg.cost_model(&maps)?;
    let (s, g) = (model.lattice.discretize(&start), model.lattice.discretize(&goal));

    let result = ara_star(&model, &s, &g, &schedule, cfg.search.heuristic, &cfg.search.budget, |p| {
        println!("{}", p.stats_line());
    });
    let plans = match result {
        Ok(p) => p,
        Err(e @ PlanError::NoPlan { .. }) => return Err(Failure { code: EXIT_NO_PLAN, error: e.into() }),
        Err(e) => return Err(config_failure(e)),
    };
    let plan = plans.last().expect("non-empty");
    let footsteps = if plan.is_empty() {
        None
    } else {
        let horizon = a.horizon.unwrap_or(plan.len()).max(1);
        Some(footstep_sequence(&model, plan, horizon, None).map_err(|e| config_failure(anyhow::Error::from(e)))?)
    };
    if let Some(f) = footsteps.as_ref().and_then(|f| f.infeasible.as_ref()) {
        eprintln!("warning: footstep plan truncated: {f}");
    }
    if let Some(out) = &a.out {
        let doc = serde_json::json!({
            "plan": plan.to_json(&model),
            "footsteps": footsteps,
            "solutions": plans.iter().map(|p| serde_json::json!({
                "cost": p.cost, "epsilon": p.epsilon, "expansions": p.expansions, "elapsed_s": p.elapsed_s,
            })).collect::<Vec<_>>(),
        });
        let text = serde_json::to_string_pretty(&doc).context("serializing plan")?;
        write_file(out, &text)?;
    }
    if let Some(path) = &a.render {
        let poses = plan.poses(&model);
        let steps = footsteps.as_ref().map(|f| f.footsteps.as_slice()).unwrap_or(&[]);
        let scene = Scene { path: &poses, footsteps: steps, start: Some(start), goal: Some(goal) };
        write_file(path, &scene_svg(&maps, &scene))?;
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let mut cfg = match &a.config {
        Some(p) => SimConfig::load(p).with_context(|| format!("reading {}", p.display())).map_err(config_failure)?,
        None => SimConfig::default(),
    };
    let world = match &a.map {
        Some(p) => load_heightmap(p).with_context(|| format!("loading {}", p.display())).map_err(config_failure)?,
        None => {
            let sc = reveal_obstacle_scenario(a.seed);
            cfg.start = sc.start;
            cfg.goal = sc.goal;
            sc.world
        }
    };
    let report = run_closed_loop(&world, &cfg)?;
    let mut cycles = report.cycle_times();
    cycles.sort_by(f64::total_cmp);
    let median = cycles.get(cycles.len() / 2).copied().unwrap_or(0.0);
    println!(
        "outcome={:?} actions={} cycles={} collisions={} bad_footholds={} median_cycle_s={:.4}",
        report.outcome,
        report.executed.len() - 1,
        report.trace.len(),
        report.collisions,
        report.bad_footholds,
        median
    );
    if let Some(dir) = &a.trace {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let json = serde_json::to_string_pretty(&report).context("serializing trace")?;
        write_file(&dir.join("trace.json"), &json)?;
        let mut csv =
            String::from("cycle,time,x,y,theta,revealed,update_s,plan_s,cycle_s,plan_cost,expansions,epsilon,action\n");
        for c in &report.trace {
            csv.push_str(&format!(
                "{},{:.2},{:.3},{:.3},{:.4},{},{:.5},{:.5},{:.5},{},{},{},{}\n",
                c.cycle,
                c.time,
                c.pose.x,
                c.pose.y,
                c.pose.theta,
                c.revealed_cells,
                c.update_s,
                c.plan_s,
                c.cycle_s,
                c.plan_cost.map(|v| format!("{v:.4}")).unwrap_or_default(),
                c.expansions,
                c.epsilon.map(|v| format!("{v:.1}")).unwrap_or_default(),
                c.executed_action.clone().unwrap_or_default(),
            ));
        }
        write_file(&dir.join("cycles.csv"), &csv)?;
        let maps = TerrainMaps::build(world, cfg.maps.clone()).map_err(config_failure)?;
        let scene = Scene {
            path: &report.executed_poses,
            footsteps: &report.footsteps,
            start: Some(cfg.start),
            goal: Some(cfg.goal),
        };
        write_file(&dir.join("scene.svg"), &scene_svg(&maps, &scene))?;
    }
    match report.outcome {
        SimOutcome::ReachedGoal => Ok(()),
        SimOutcome::NoPlan => Err(Failure { code: EXIT_NO_PLAN, error: anyhow::anyhow!("no plan found") }),
        o => Err(Failure { code: 1, error: anyhow::anyhow!("simulation ended with {o:?}") }),
    }
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    let kinds: Vec<BenchmarkKind> = match a.suite.as_str() {
        "all" => BenchmarkKind::ALL.to_vec(),
        s => vec![BenchmarkKind::from_label(s).ok_or_else(|| config_failure(anyhow::anyhow!("unknown suite `{s}`")))?],
    };
    let mut cfg = BenchConfig { timing: a.timing, ..BenchConfig::default() };
    if let Some(h) = a.heuristic {
        cfg.heuristic = h.into();
    }
    if let Some(e) = a.epsilon0 {
        cfg.epsilon_0 = e;
    }
    cfg.budget = Budget::unlimited();
    let report = run_benchmark(&kinds, &[PlannerKind::AStar, PlannerKind::AraStar], a.trials, a.seed, &cfg)?;
    let csv = report.to_csv(a.timing);
    match &a.table {
        Some(p) => write_file(p, &csv)?,
        None => print_stdout(&csv),
    }
    if let Some(p) = &a.rows {
        let json = serde_json::to_string_pretty(&report).context("serializing rows")?;
        write_file(p, &json)?;
    }
    let failed = report.rows.iter().filter(|r| !r.success).count();
    if failed > 0 {
        eprintln!("{failed} of {} trials failed", report.rows.len());
    }
    Ok(())
}

fn cmd_dump(a: DumpArgs) -> Result<(), Failure> {
    let cfg = load_planner_config(a.config.as_deref(), &[])?;
    let set = cfg.primitive_set();
    let text = if a.json {
        serde_json::to_string_pretty(&set).context("serializing primitives")?
    } else {
        legplan::config::primitives_toml(&set)
    };
    print_stdout(&format!("{text}\n"));
    Ok(())
}
