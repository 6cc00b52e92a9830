//! Perceive, plan and step in a partially observed world.
//!
//! Each cycle reveals the true terrain within the sensor radius into the belief
//! map, refreshes the reward map around the changed cells, replans with ARA*
//! from the current body state, executes the first action and its footsteps
//! kinematically, then applies scheduled terrain events.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{CostMaps, CostModel, CostParams, Stance};
use crate::error::ConfigError;
use crate::footstep::{footstep_sequence, nominal_stance, Footstep};
use crate::geometry::{Point2, Pose2, Rect};
use crate::grid::GridSpec;
use crate::lattice::{body_collision_check, BodyState, Collision, PrimitiveSet, RegionParams, StanceGeometry};
use crate::search::{ara_star, AnytimeSchedule, Budget, GoalRegion, HeuristicKind};
use crate::terrain::{HeightMap, TerrainMaps, TerrainParams};

/// Terrain change applied to the true world at simulated time `time`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicEvent {
    pub time: f64,
    pub rect: Rect,
    pub height_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub start: Pose2,
    pub goal: Pose2,
    /// Radius of the circular sensor footprint (m).
    pub sensor_radius: f64,
    /// Simulated time per perceive-plan-step cycle (s).
    pub replan_period: f64,
    pub schedule: AnytimeSchedule,
    pub budget: Budget,
    pub heuristic: HeuristicKind,
    /// Body actions covered by each footstep plan.
    pub horizon: usize,
    /// Consecutive cycles without a plan before the run aborts.
    pub max_failures: usize,
    pub step_limit: usize,
    /// Start with the whole world already known.
    pub prior_known: bool,
    pub events: Vec<DynamicEvent>,
    pub maps: TerrainParams,
    pub geometry: StanceGeometry,
    pub regions: RegionParams,
    pub cost: CostParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            start: Pose2::new(0.6, 1.2, 0.0),
            goal: Pose2::new(4.1, 1.2, 0.0),
            sensor_radius: 2.0,
            replan_period: 2.0,
            schedule: AnytimeSchedule::default(),
            budget: Budget::expansions(400_000),
            heuristic: HeuristicKind::default(),
            horizon: 3,
            max_failures: 5,
            step_limit: 200,
            prior_known: false,
            events: Vec::new(),
            maps: TerrainParams::default(),
            geometry: StanceGeometry::default(),
            regions: RegionParams::default(),
            cost: CostParams::default(),
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.sensor_radius.is_finite() && self.sensor_radius > 0.0) {
            return Err(ConfigError::invalid("sensor_radius must be positive"));
        }
        if !(self.replan_period.is_finite() && self.replan_period > 0.0) {
            return Err(ConfigError::invalid("replan_period must be positive"));
        }
        if self.horizon == 0 || self.max_failures == 0 {
            return Err(ConfigError::invalid("horizon and max_failures must be at least 1"));
        }
        self.schedule.validate()?;
        self.cost.validate()?;
        self.geometry.validate()
    }
}

/// World, start and goal of the reveal-an-obstacle scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub world: HeightMap,
    pub start: Pose2,
    pub goal: Pose2,
}

/// Flat 4.8 m × 2.4 m floor with a 0.5 m box across the straight route,
/// initially beyond sensor range. Box size, box position and goal depend on `seed`.
pub fn reveal_obstacle_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = GridSpec::new(Point2::new(0.0, 0.0), 0.02, 240, 120).expect("fixed size");
    let mut world = HeightMap::flat(spec, 0.0);
    let box_x = rng.gen_range(2.7..2.8);
    let box_len = rng.gen_range(0.2..0.3);
    let box_w = rng.gen_range(0.4..0.7);
    let box_y = rng.gen_range(0.9..1.5);
    let rect = Rect::from_center(Point2::new(box_x + 0.5 * box_len, box_y), 0.5 * box_len, 0.5 * box_w);
    raise(&mut world, &rect, 0.5);
    let goal = Pose2::new(rng.gen_range(4.0..4.2), 1.2, 0.0);
    Scenario { world, start: Pose2::new(0.6, 1.2, 0.0), goal }
}

/// Adds `dz` to every known cell whose center lies in `rect`; returns the touched bounds.
fn raise(hm: &mut HeightMap, rect: &Rect, dz: f64) -> Option<Rect> {
    let spec = *hm.spec();
    let ((x0, y0), (x1, y1)) = spec.index_range(rect)?;
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            if let Some(z) = hm.elevation(ix, iy) {
                hm.set_elevation(ix, iy, z + dz);
            }
        }
    }
    Some(spec.cell_rect(x0, y0).union(&spec.cell_rect(x1, y1)))
}

/// Copies true-world cells within `radius` of `center` into `belief`.
/// Returns the number of changed cells and their bounding box.
pub fn sense(world: &HeightMap, belief: &mut HeightMap, center: Point2, radius: f64) -> (usize, Option<Rect>) {
    let spec = *world.spec();
    let Some(((x0, y0), (x1, y1))) = spec.index_range(&Rect::from_center(center, radius, radius)) else {
        return (0, None);
    };
    let mut changed = 0;
    let mut bounds: Option<Rect> = None;
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            if spec.cell_center(ix, iy).distance(center) > radius {
                continue;
            }
            let truth = world.elevation(ix, iy);
            let old = belief.elevation(ix, iy);
            if truth == old {
                continue;
            }
            match truth {
                Some(z) => belief.set_elevation(ix, iy, z),
                None => belief.clear(ix, iy),
            }
            changed += 1;
            let cell = spec.cell_rect(ix, iy);
            bounds = Some(bounds.map_or(cell, |b| b.union(&cell)));
        }
    }
    (changed, bounds)
}

/// One perceive-plan-step cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    pub time: f64,
    pub state: BodyState,
    pub pose: Pose2,
    pub revealed_cells: usize,
    pub dirty: Option<Rect>,
    pub reward_cells_updated: usize,
    pub update_s: f64,
    pub plan_s: f64,
    pub cycle_s: f64,
    pub plan_cost: Option<f64>,
    pub plan_actions: usize,
    pub plan_poses: Vec<Pose2>,
    pub epsilon: Option<f64>,
    pub expansions: u64,
    pub executed_action: Option<String>,
    pub footsteps: Vec<Footstep>,
    pub events_applied: usize,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimOutcome {
    ReachedGoal,
    StepLimit,
    NoPlan,
    /// An executed pose or foothold was infeasible in the true world.
    Unsafe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub outcome: SimOutcome,
    pub success: bool,
    pub executed: Vec<BodyState>,
    pub executed_poses: Vec<Pose2>,
    pub footsteps: Vec<Footstep>,
    pub collisions: usize,
    pub bad_footholds: usize,
    pub trace: Vec<CycleRecord>,
}

impl SimReport {
    pub fn cycle_times(&self) -> Vec<f64> {
        self.trace.iter().map(|c| c.cycle_s).collect()
    }

    pub fn update_times(&self) -> Vec<f64> {
        self.trace.iter().filter(|c| c.dirty.is_some()).map(|c| c.update_s).collect()
    }

    /// Seconds to the first published plan of each cycle that planned.
    pub fn plan_times(&self) -> Vec<f64> {
        self.trace.iter().filter(|c| c.plan_cost.is_some()).map(|c| c.plan_s).collect()
    }
}

fn terrain_err(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::invalid(format!("terrain: {e}"))
}

/// Runs the closed loop on `world` until the goal, the step limit, or
/// `max_failures` consecutive cycles without a plan.
pub fn run_closed_loop(world: &HeightMap, cfg: &SimConfig) -> Result<SimReport, ConfigError> {
    cfg.validate()?;
    let mut world = world.clone();
    let prims = PrimitiveSet::default_set(&cfg.geometry, &cfg.regions);
    let mut truth = TerrainMaps::build(world.clone(), cfg.maps.clone()).map_err(terrain_err)?;
    let truth_model = CostModel::new(&truth, prims.clone(), cfg.geometry.clone(), cfg.cost.clone())?;
    let lattice = &truth_model.lattice;
    let mut state = lattice.discretize(&cfg.start);
    let goal = lattice.discretize(&cfg.goal);
    if lattice.index(&state).is_none()
        || body_collision_check(lattice, &state, &truth.obstacle, &cfg.geometry, truth_model.policy)
            == Collision::Colliding
    {
        return Err(ConfigError::invalid("start pose collides in the true world"));
    }
    let region = GoalRegion::new(goal);

    let mut belief_hm = if cfg.prior_known { world.clone() } else { HeightMap::unknown(*world.spec()) };
    sense(&world, &mut belief_hm, lattice.pose(&state).position(), cfg.sensor_radius);
    let mut belief = TerrainMaps::build(belief_hm, cfg.maps.clone()).map_err(terrain_err)?;
    let mut truth_maps = CostMaps::new(&truth);

    let mut report = SimReport {
        outcome: SimOutcome::StepLimit,
        success: false,
        executed: vec![state],
        executed_poses: vec![lattice.pose(&state)],
        footsteps: Vec::new(),
        collisions: 0,
        bad_footholds: 0,
        trace: Vec::new(),
    };
    let mut stance: Option<Stance> = None;
    let mut failures = 0;
    let mut next_event = 0;
    let mut events: Vec<DynamicEvent> = cfg.events.clone();
    events.sort_by(|a, b| a.time.total_cmp(&b.time));

    for cycle in 0..cfg.step_limit {
        let cycle_start = Instant::now();
        let time = cycle as f64 * cfg.replan_period;
        let pose = lattice.pose(&state);
        let mut rec = CycleRecord {
            cycle,
            time,
            state,
            pose,
            revealed_cells: 0,
            dirty: None,
            reward_cells_updated: 0,
            update_s: 0.0,
            plan_s: 0.0,
            cycle_s: 0.0,
            plan_cost: None,
            plan_actions: 0,
            plan_poses: Vec::new(),
            epsilon: None,
            expansions: 0,
            executed_action: None,
            footsteps: Vec::new(),
            events_applied: 0,
            note: None,
        };
        if region.contains(&state) {
            report.outcome = SimOutcome::ReachedGoal;
            report.success = true;
            rec.note = Some("goal reached".into());
            rec.cycle_s = cycle_start.elapsed().as_secs_f64();
            report.trace.push(rec);
            break;
        }

        let (changed, dirty) = sense(&world, &mut belief.height, pose.position(), cfg.sensor_radius);
        rec.revealed_cells = changed;
        if let Some(d) = dirty {
            let t = Instant::now();
            rec.reward_cells_updated = belief.refresh(&d).map_err(terrain_err)?;
            rec.update_s = t.elapsed().as_secs_f64();
            rec.dirty = Some(d);
        }

        let model = CostModel::new(&belief, prims.clone(), cfg.geometry.clone(), cfg.cost.clone())?;
        let plan_start = Instant::now();
        let mut first_plan_s = None;
        let plans = ara_star(&model, &state, &goal, &cfg.schedule, cfg.heuristic, &cfg.budget, |_| {
            first_plan_s.get_or_insert(plan_start.elapsed().as_secs_f64());
        });
        rec.plan_s = first_plan_s.unwrap_or_else(|| plan_start.elapsed().as_secs_f64());
        let plan = match plans {
            Ok(mut p) => p.pop().expect("non-empty"),
            Err(e) => {
                rec.note = Some(e.to_string());
                failures += 1;
                finish_cycle(
                    &mut rec,
                    cycle_start,
                    &mut world,
                    &mut truth,
                    &mut truth_maps,
                    &events,
                    &mut next_event,
                    cfg,
                    time,
                )?;
                report.trace.push(rec);
                if failures >= cfg.max_failures {
                    report.outcome = SimOutcome::NoPlan;
                    break;
                }
                continue;
            }
        };
        rec.plan_cost = Some(plan.cost);
        rec.plan_actions = plan.len();
        rec.plan_poses = plan.poses(&model);
        rec.epsilon = Some(plan.epsilon);
        rec.expansions = plan.expansions;

        let steps = match footstep_sequence(&model, &plan, cfg.horizon, stance) {
            Ok(f) if f.actions_covered > 0 => f,
            Ok(f) => {
                rec.note = f.infeasible.map(|e| e.to_string());
                failures += 1;
                finish_cycle(
                    &mut rec,
                    cycle_start,
                    &mut world,
                    &mut truth,
                    &mut truth_maps,
                    &events,
                    &mut next_event,
                    cfg,
                    time,
                )?;
                report.trace.push(rec);
                if failures >= cfg.max_failures {
                    report.outcome = SimOutcome::NoPlan;
                    break;
                }
                continue;
            }
            Err(e) => {
                rec.note = Some(e.to_string());
                finish_cycle(
                    &mut rec,
                    cycle_start,
                    &mut world,
                    &mut truth,
                    &mut truth_maps,
                    &events,
                    &mut next_event,
                    cfg,
                    time,
                )?;
                report.trace.push(rec);
                continue;
            }
        };
        failures = 0;

        let next = plan.states[1];
        let executed: Vec<Footstep> = steps.action_steps(0).to_vec();
        let mut unsafe_step = false;
        if body_collision_check(lattice, &next, &truth.obstacle, &cfg.geometry, truth_model.policy)
            == Collision::Colliding
        {
            report.collisions += 1;
            unsafe_step = true;
        }
        for f in &executed {
            let (ix, iy) = truth_maps.spec().cell_coords(f.position.xy());
            if !truth_maps.is_steppable(ix, iy) || truth_maps.cell_elevation(ix, iy).is_none() {
                report.bad_footholds += 1;
                unsafe_step = true;
            }
        }
        let mut working = stance.unwrap_or_else(|| nominal_stance(&model, &plan.states[0]));
        for f in &executed {
            working = working.with(f.leg, f.position);
        }
        stance = Some(working);
        state = next;
        rec.executed_action = Some(model.prims.get(plan.actions[0]).label.clone());
        rec.footsteps = executed.clone();
        report.executed.push(state);
        report.executed_poses.push(lattice.pose(&state));
        report.footsteps.extend(executed);
        finish_cycle(
            &mut rec,
            cycle_start,
            &mut world,
            &mut truth,
            &mut truth_maps,
            &events,
            &mut next_event,
            cfg,
            time,
        )?;
        report.trace.push(rec);
        if unsafe_step {
            report.outcome = SimOutcome::Unsafe;
            break;
        }
    }
    if report.outcome == SimOutcome::StepLimit && region.contains(&state) {
        report.outcome = SimOutcome::ReachedGoal;
        report.success = true;
    }
    Ok(report)
}

/// Applies events due by the end of this cycle and stamps the cycle time.
#[allow(clippy::too_many_arguments)]
fn finish_cycle(
    rec: &mut CycleRecord,
    started: Instant,
    world: &mut HeightMap,
    truth: &mut TerrainMaps,
    truth_maps: &mut CostMaps,
    events: &[DynamicEvent],
    next_event: &mut usize,
    cfg: &SimConfig,
    time: f64,
) -> Result<(), ConfigError> {
    rec.cycle_s = started.elapsed().as_secs_f64();
    let horizon = time + cfg.replan_period;
    while *next_event < events.len() && events[*next_event].time < horizon {
        let e = events[*next_event];
        if let Some(d) = raise(world, &e.rect, e.height_delta) {
            truth.height = world.clone();
            truth.refresh(&d).map_err(terrain_err)?;
            *truth_maps = CostMaps::new(truth);
        }
        rec.events_applied += 1;
        *next_event += 1;
    }
    Ok(())
}
