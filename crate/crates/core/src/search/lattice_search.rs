//! Body-lattice search: graph adapter, goal region, heuristics and plans.

use serde::{Deserialize, Serialize};

use super::dijkstra::{dijkstra_from, CostTable};
use super::engine::{anytime_search, Solution};
use super::{AnytimeSchedule, Budget, Edge, Graph, Heuristic, ReverseGraph};
use crate::cost::{bound_to_units, cost_to_units, units_to_cost, CostModel};
use crate::error::PlanError;
use crate::geometry::{Point2, Pose2};
use crate::lattice::{BodyState, HEADING_BINS};

/// The body-state graph: primitives whose successor is in bounds, collision-free
/// and has a steppable cell in every leg region.
#[derive(Clone, Copy, Debug)]
pub struct LatticeGraph<'a> {
    pub model: &'a CostModel,
}

impl<'a> LatticeGraph<'a> {
    pub fn new(model: &'a CostModel) -> Self {
        LatticeGraph { model }
    }
}

impl Graph for LatticeGraph<'_> {
    fn num_states(&self) -> usize {
        self.model.lattice.num_states()
    }

    fn successors(&self, from: u32, out: &mut Vec<Edge>) {
        let s = self.model.lattice.state(from);
        for p in 0..self.model.prims.len() {
            if let Some((to, cost)) = self.model.edge(&s, p) {
                out.push(Edge { to, cost, action: p as u8 });
            }
        }
    }

    fn edge(&self, from: u32, action: u8) -> Option<Edge> {
        let s = self.model.lattice.state(from);
        self.model.edge(&s, action as usize).map(|(to, cost)| Edge { to, cost, action })
    }
}

impl ReverseGraph for LatticeGraph<'_> {
    fn predecessors(&self, to: u32, out: &mut Vec<Edge>) {
        let m = self.model;
        let t = m.lattice.state(to);
        let e = m.eval_index(to);
        if !e.valid {
            return;
        }
        for p in 0..m.prims.len() {
            if !e.allows(p) {
                continue;
            }
            let dtheta = m.lattice.lattice_move(0, p).dtheta;
            let src = m.lattice.predecessor(&t, p, dtheta);
            let Some(si) = m.lattice.index(&src) else { continue };
            if !m.eval_index(si).valid {
                continue;
            }
            debug_assert_eq!(m.lattice.apply(&src, p), t);
            let cost = cost_to_units(e.state_cost + m.move_cost(src.itheta, p));
            out.push(Edge { to: si, cost, action: p as u8 });
        }
    }
}

/// Goal tolerance: one lattice cell in x and y, one heading bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalRegion {
    pub center: BodyState,
    pub cell_tolerance: i32,
    pub heading_tolerance: i32,
}

impl GoalRegion {
    pub fn new(center: BodyState) -> Self {
        GoalRegion { center, cell_tolerance: 1, heading_tolerance: 1 }
    }

    pub fn contains(&self, s: &BodyState) -> bool {
        let bins = HEADING_BINS as i32;
        let dt = (s.itheta as i32 - self.center.itheta as i32).rem_euclid(bins);
        let dt = dt.min(bins - dt);
        (s.ix - self.center.ix).abs() <= self.cell_tolerance
            && (s.iy - self.center.iy).abs() <= self.cell_tolerance
            && dt <= self.heading_tolerance
    }

    /// Every lattice state of the region, including out-of-bounds ones.
    pub fn states(&self) -> Vec<BodyState> {
        let (c, h) = (self.cell_tolerance, self.heading_tolerance);
        let mut out = Vec::new();
        for dy in -c..=c {
            for dx in -c..=c {
                for dt in -h..=h {
                    out.push(BodyState::new(self.center.ix + dx, self.center.iy + dy, self.center.itheta as i32 + dt));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    /// Admissible and consistent: the most optimistic reward in the map and
    /// straight-line distance to the goal region.
    #[default]
    Guarded,
    /// Local mean reward times the estimated number of strides to the goal.
    Faithful,
    Zero,
}

/// Terrain-aware heuristic toward a goal region.
#[derive(Clone, Copy, Debug)]
pub struct LatticeHeuristic<'a> {
    pub model: &'a CostModel,
    pub kind: HeuristicKind,
    pub goal: Point2,
    /// Step length used to count strides; defaults to the forward primitive length.
    pub stride: f64,
    /// Distance slack covering the goal tolerance (m).
    pub slack: f64,
    reward_bound: f64,
    max_step: f64,
}

impl<'a> LatticeHeuristic<'a> {
    pub fn new(model: &'a CostModel, goal: &GoalRegion, kind: HeuristicKind) -> Self {
        let res = model.lattice.spec().resolution;
        let reward_bound = model.maps().max_reward().max(model.unknown_reward()).min(0.0);
        LatticeHeuristic {
            model,
            kind,
            goal: model.lattice.pose(&goal.center).position(),
            stride: model.stride(),
            slack: goal.cell_tolerance as f64 * res * std::f64::consts::SQRT_2,
            reward_bound,
            max_step: model.lattice.max_move_length().max(1e-9),
        }
    }

    /// Heuristic value in cost units (not quantized).
    pub fn value(&self, s: &BodyState) -> f64 {
        let m = self.model;
        let d = m.lattice.pose(s).position().distance(self.goal);
        let base = m.params.step_base_cost;
        let w_t = m.params.body.terrain;
        match self.kind {
            HeuristicKind::Zero => 0.0,
            HeuristicKind::Guarded => {
                let d_eff = (d - self.slack).max(0.0);
                d_eff * (base / self.stride + w_t * (-self.reward_bound) / self.max_step.max(self.stride))
            }
            HeuristicKind::Faithful => {
                let r = m.eval(s).map_or(self.reward_bound, |e| e.local_reward);
                let strides = (d / self.stride - 1e-9).ceil().max(0.0);
                (w_t * (-r) + base) * strides
            }
        }
    }
}

impl Heuristic for LatticeHeuristic<'_> {
    fn h(&self, state: u32) -> u64 {
        if self.kind == HeuristicKind::Zero {
            return 0;
        }
        bound_to_units(self.value(&self.model.lattice.state(state)))
    }
}

/// One row of an exported plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub ix: i32,
    pub iy: i32,
    pub itheta: u16,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    /// Action that reached this state; absent for the start.
    pub action: Option<String>,
    pub step_cost: f64,
}

/// A body pose sequence with the actions between consecutive poses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyActionPlan {
    pub states: Vec<BodyState>,
    /// Primitive indices; `actions[i]` leads from `states[i]` to `states[i + 1]`.
    pub actions: Vec<usize>,
    pub step_costs: Vec<f64>,
    pub cost: f64,
    pub cost_units: u64,
    pub epsilon: f64,
    pub expansions: u64,
    pub elapsed_s: f64,
}

impl BodyActionPlan {
    fn from_solution(model: &CostModel, sol: &Solution) -> Self {
        BodyActionPlan {
            states: sol.path.states.iter().map(|&i| model.lattice.state(i)).collect(),
            actions: sol.path.actions.iter().map(|&a| a as usize).collect(),
            step_costs: sol.path.step_costs.iter().map(|&c| units_to_cost(c)).collect(),
            cost: units_to_cost(sol.path.cost),
            cost_units: sol.path.cost,
            epsilon: sol.epsilon,
            expansions: sol.expansions,
            elapsed_s: sol.elapsed_s,
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn poses(&self, model: &CostModel) -> Vec<Pose2> {
        self.states.iter().map(|s| model.lattice.pose(s)).collect()
    }

    pub fn steps(&self, model: &CostModel) -> Vec<PlanStep> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let pose = model.lattice.pose(s);
                let (action, step_cost) = if i == 0 {
                    (None, 0.0)
                } else {
                    (Some(model.prims.get(self.actions[i - 1]).label.clone()), self.step_costs[i - 1])
                };
                PlanStep {
                    ix: s.ix,
                    iy: s.iy,
                    itheta: s.itheta,
                    x: pose.x,
                    y: pose.y,
                    theta: pose.theta,
                    action,
                    step_cost,
                }
            })
            .collect()
    }

    /// JSON record with states, actions, per-step costs and search statistics.
    pub fn to_json(&self, model: &CostModel) -> serde_json::Value {
        serde_json::json!({
            "steps": self.steps(model),
            "cost": self.cost,
            "epsilon": self.epsilon,
            "expansions": self.expansions,
            "elapsed_s": self.elapsed_s,
        })
    }

    /// Single machine-parsable stats line.
    pub fn stats_line(&self) -> String {
        format!(
            "cost={:.4} steps={} epsilon={:.1} expansions={} time_s={:.4}",
            self.cost,
            self.len(),
            self.epsilon,
            self.expansions,
            self.elapsed_s
        )
    }
}

fn check_endpoints(model: &CostModel, start: &BodyState, goal: &BodyState) -> Result<(u32, GoalRegion), PlanError> {
    let si = model.lattice.index(start).ok_or(PlanError::StartInvalid)?;
    if !model.eval_index(si).valid {
        return Err(PlanError::StartInvalid);
    }
    let gi = model.lattice.index(goal).ok_or(PlanError::GoalOutOfBounds)?;
    if !model.eval_index(gi).valid {
        return Err(PlanError::GoalColliding);
    }
    Ok((si, GoalRegion::new(*goal)))
}

/// Anytime repairing A* on the body lattice. `on_plan` sees each improved plan
/// as soon as it is published; all plans are also returned, best last.
pub fn ara_star(
    model: &CostModel,
    start: &BodyState,
    goal: &BodyState,
    schedule: &AnytimeSchedule,
    heuristic: HeuristicKind,
    budget: &Budget,
    mut on_plan: impl FnMut(&BodyActionPlan),
) -> Result<Vec<BodyActionPlan>, PlanError> {
    let (si, region) = check_endpoints(model, start, goal)?;
    let graph = LatticeGraph::new(model);
    let h = LatticeHeuristic::new(model, &region, heuristic);
    let is_goal = |i: u32| region.contains(&model.lattice.state(i));
    let mut plans = Vec::new();
    let out = anytime_search(&graph, si, &is_goal, &h, schedule, budget, |sol| {
        let plan = BodyActionPlan::from_solution(model, sol);
        on_plan(&plan);
        plans.push(plan);
    });
    if plans.is_empty() {
        return Err(PlanError::NoPlan { expansions: out.expansions, elapsed_s: out.elapsed_s });
    }
    Ok(plans)
}

/// A* (a single ε = 1 pass).
pub fn a_star(
    model: &CostModel,
    start: &BodyState,
    goal: &BodyState,
    heuristic: HeuristicKind,
    budget: &Budget,
) -> Result<BodyActionPlan, PlanError> {
    let plans = ara_star(model, start, goal, &AnytimeSchedule::optimal(), heuristic, budget, |_| {})?;
    Ok(plans.into_iter().next_back().expect("non-empty"))
}

/// Exact cost-to-go into the goal region for every state (reverse Dijkstra).
pub fn cost_to_go(model: &CostModel, goal: &BodyState) -> CostTable {
    let region = GoalRegion::new(*goal);
    let sources: Vec<u32> =
        region.states().iter().filter_map(|s| model.lattice.index(s)).filter(|&i| model.eval_index(i).valid).collect();
    dijkstra_from(&LatticeGraph::new(model), &sources, true)
}
