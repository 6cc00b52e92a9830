//! A*-versus-ARA* comparison over the benchmark terrains.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::terrain::{generate_benchmark_terrain, BenchmarkKind, BenchmarkParams};
use crate::cost::{CostModel, CostParams};
use crate::error::{ConfigError, PlanError};
use crate::footstep::{footstep_sequence, FootstepPlan};
use crate::geometry::Pose2;
use crate::lattice::{BodyState, PrimitiveSet, RegionParams, StanceGeometry};
use crate::search::{ara_star, AnytimeSchedule, BodyActionPlan, Budget, HeuristicKind};
use crate::terrain::{TerrainMaps, TerrainParams};

/// Start pose shared by all benchmark trials.
pub const BENCH_START: Pose2 = Pose2::new(1.0, 1.4, 0.0);

/// Nine goals 2 m ahead: three lateral offsets by three headings.
pub fn benchmark_goals() -> Vec<Pose2> {
    let headings = [-27f64.to_radians(), 0.0, 27f64.to_radians()];
    let mut out = Vec::with_capacity(9);
    for y in [0.9, 1.4, 1.9] {
        for &theta in &headings {
            out.push(Pose2::new(3.0, y, theta));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    AStar,
    AraStar,
}

impl PlannerKind {
    pub fn label(self) -> &'static str {
        match self {
            PlannerKind::AStar => "a_star",
            PlannerKind::AraStar => "ara_star",
        }
    }
}

/// Everything a benchmark trial depends on besides the terrain kind and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub terrain: BenchmarkParams,
    pub maps: TerrainParams,
    pub geometry: StanceGeometry,
    pub regions: RegionParams,
    pub cost: CostParams,
    pub heuristic: HeuristicKind,
    /// ARA* stops at its first solution with this inflation.
    pub epsilon_0: f64,
    pub budget: Budget,
    /// Record wall time in the table.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            terrain: BenchmarkParams::default(),
            maps: TerrainParams::default(),
            geometry: StanceGeometry::default(),
            regions: RegionParams::default(),
            cost: CostParams::default(),
            heuristic: HeuristicKind::default(),
            epsilon_0: 3.0,
            budget: Budget::unlimited(),
            timing: false,
        }
    }
}

impl BenchConfig {
    pub fn schedule(&self, planner: PlannerKind) -> AnytimeSchedule {
        match planner {
            PlannerKind::AStar => AnytimeSchedule::optimal(),
            PlannerKind::AraStar => AnytimeSchedule::first_solution(self.epsilon_0),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.terrain.validate()?;
        self.schedule(PlannerKind::AraStar).validate()
    }
}

/// Terrain seed of trial `trial` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(trial as u64)
}

/// Map, start and goal of one trial.
#[derive(Clone, Debug)]
pub struct BenchmarkCase {
    pub kind: BenchmarkKind,
    pub trial: usize,
    pub maps: TerrainMaps,
    pub start: Pose2,
    pub goal: Pose2,
}

impl BenchmarkCase {
    pub fn new(kind: BenchmarkKind, trial: usize, seed: u64, cfg: &BenchConfig) -> Result<Self, ConfigError> {
        let hm = generate_benchmark_terrain(kind, &cfg.terrain, trial_seed(seed, trial))?;
        let maps = TerrainMaps::build(hm, cfg.maps.clone()).map_err(|e| ConfigError::invalid(e.to_string()))?;
        let goals = benchmark_goals();
        Ok(BenchmarkCase { kind, trial, maps, start: BENCH_START, goal: goals[trial % goals.len()] })
    }

    pub fn model(&self, cfg: &BenchConfig) -> Result<CostModel, ConfigError> {
        let prims = PrimitiveSet::default_set(&cfg.geometry, &cfg.regions);
        CostModel::new(&self.maps, prims, cfg.geometry.clone(), cfg.cost.clone())
    }

    pub fn endpoints(&self, model: &CostModel) -> (BodyState, BodyState) {
        (model.lattice.discretize(&self.start), model.lattice.discretize(&self.goal))
    }
}

/// Result of one planner on one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub terrain: BenchmarkKind,
    pub planner: PlannerKind,
    pub trial: usize,
    pub goal: Pose2,
    pub success: bool,
    pub cost: Option<f64>,
    pub expansions: u64,
    pub time_s: f64,
    pub actions: usize,
    pub footsteps: usize,
    pub error: Option<String>,
}

/// Plan and footsteps of a trial, for callers that inspect more than the row.
#[derive(Debug)]
pub struct TrialOutcome {
    pub row: TrialRow,
    pub plan: Option<BodyActionPlan>,
    pub footsteps: Option<FootstepPlan>,
}

/// Runs `planner` on `case` with a freshly built model.
pub fn run_trial(
    case: &BenchmarkCase,
    planner: PlannerKind,
    cfg: &BenchConfig,
) -> Result<(CostModel, TrialOutcome), ConfigError> {
    let model = case.model(cfg)?;
    let (start, goal) = case.endpoints(&model);
    let started = Instant::now();
    let result = ara_star(&model, &start, &goal, &cfg.schedule(planner), cfg.heuristic, &cfg.budget, |_| {});
    let elapsed = started.elapsed().as_secs_f64();
    let mut row = TrialRow {
        terrain: case.kind,
        planner,
        trial: case.trial,
        goal: case.goal,
        success: false,
        cost: None,
        expansions: 0,
        time_s: elapsed,
        actions: 0,
        footsteps: 0,
        error: None,
    };
    let outcome = match result {
        Ok(mut plans) => {
            let plan = plans.pop().expect("non-empty");
            row.cost = Some(plan.cost);
            row.expansions = plan.expansions;
            row.actions = plan.len();
            let footsteps = if plan.is_empty() {
                None
            } else {
                match footstep_sequence(&model, &plan, plan.len(), None) {
                    Ok(f) => Some(f),
                    Err(e) => {
                        row.error = Some(e.to_string());
                        None
                    }
                }
            };
            if let Some(f) = &footsteps {
                row.footsteps = f.footsteps.len();
                if let Some(e) = &f.infeasible {
                    row.error = Some(e.to_string());
                }
            }
            row.success = row.error.is_none();
            TrialOutcome { row, plan: Some(plan), footsteps }
        }
        Err(e) => {
            if let PlanError::NoPlan { expansions, .. } = e {
                row.expansions = expansions;
            }
            row.error = Some(e.to_string());
            TrialOutcome { row, plan: None, footsteps: None }
        }
    };
    Ok((model, outcome))
}

/// Per-trial rows of a benchmark run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<TrialRow>,
}

/// Mean over the successful trials of one terrain and planner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub terrain: BenchmarkKind,
    pub planner: PlannerKind,
    pub trials: usize,
    pub successes: usize,
    pub cost: f64,
    pub expansions: f64,
    pub time_s: f64,
}

impl RunReport {
    /// Aggregates in first-appearance order of (terrain, planner).
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut keys: Vec<(BenchmarkKind, PlannerKind)> = Vec::new();
        for r in &self.rows {
            if !keys.contains(&(r.terrain, r.planner)) {
                keys.push((r.terrain, r.planner));
            }
        }
        keys.into_iter()
            .map(|(terrain, planner)| {
                let rows: Vec<&TrialRow> =
                    self.rows.iter().filter(|r| r.terrain == terrain && r.planner == planner).collect();
                let ok: Vec<&&TrialRow> = rows.iter().filter(|r| r.success).collect();
                let n = ok.len().max(1) as f64;
                Aggregate {
                    terrain,
                    planner,
                    trials: rows.len(),
                    successes: ok.len(),
                    cost: ok.iter().map(|r| r.cost.unwrap_or(0.0)).sum::<f64>() / n,
                    expansions: ok.iter().map(|r| r.expansions as f64).sum::<f64>() / n,
                    time_s: ok.iter().map(|r| r.time_s).sum::<f64>() / n,
                }
            })
            .collect()
    }

    /// Comparison table with columns `terrain,planner,cost,expansions,time_s`.
    /// `time_s` stays empty unless `timing` is set, so untimed tables are reproducible.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from("terrain,planner,cost,expansions,time_s\n");
        for a in self.aggregates() {
            let time = if timing { format!("{:.4}", a.time_s) } else { String::new() };
            let _ = writeln!(out, "{},{},{:.4},{:.1},{}", a.terrain, a.planner.label(), a.cost, a.expansions, time);
        }
        out
    }
}

/// Runs every planner on `trials` trials of every terrain. Trial `i` uses goal
/// `i mod 9`; failures are recorded and the run continues.
pub fn run_benchmark(
    kinds: &[BenchmarkKind],
    planners: &[PlannerKind],
    trials: usize,
    seed: u64,
    cfg: &BenchConfig,
) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    let mut report = RunReport::default();
    if planners.is_empty() {
        return Ok(report);
    }
    for &kind in kinds {
        for trial in 0..trials {
            let case = BenchmarkCase::new(kind, trial, seed, cfg)?;
            for &planner in planners {
                let (_, outcome) = run_trial(&case, planner, cfg)?;
                report.rows.push(outcome.row);
            }
        }
    }
    Ok(report)
}
