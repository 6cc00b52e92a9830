//! Best-first search over integer-cost graphs: anytime repairing A*, A*, and a
//! Dijkstra oracle, plus the lattice-specific graph, heuristics and plans.

mod audit;
mod dijkstra;
mod engine;
mod lattice_search;

pub use audit::{check_admissibility, AdmissibilityReport};
pub use dijkstra::{dijkstra_from, dijkstra_oracle, dijkstra_to_goal, CostTable};
pub use engine::{anytime_search, SearchOutcome, SearchPath, Solution};
pub use lattice_search::{
    a_star, ara_star, cost_to_go, BodyActionPlan, GoalRegion, HeuristicKind, LatticeGraph, LatticeHeuristic, PlanStep,
};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Outgoing edge of a search graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub to: u32,
    pub cost: u64,
    pub action: u8,
}

/// A directed graph with dense `u32` state indices and positive integer costs.
pub trait Graph {
    fn num_states(&self) -> usize;

    /// Appends the outgoing edges of `from` to `out`.
    fn successors(&self, from: u32, out: &mut Vec<Edge>);

    /// The edge leaving `from` with `action`, if present.
    fn edge(&self, from: u32, action: u8) -> Option<Edge> {
        let mut out = Vec::new();
        self.successors(from, &mut out);
        out.into_iter().find(|e| e.action == action)
    }
}

/// A graph that can also enumerate incoming edges; `Edge::to` then names the source.
pub trait ReverseGraph: Graph {
    fn predecessors(&self, to: u32, out: &mut Vec<Edge>);
}

/// Adjacency-list graph, mostly for tests and small examples.
#[derive(Clone, Debug, Default)]
pub struct ExplicitGraph {
    adj: Vec<Vec<Edge>>,
}

impl ExplicitGraph {
    pub fn new(n: usize) -> Self {
        ExplicitGraph { adj: vec![Vec::new(); n] }
    }

    pub fn add_edge(&mut self, from: u32, to: u32, cost: u64) {
        let action = self.adj[from as usize].len() as u8;
        self.adj[from as usize].push(Edge { to, cost, action });
    }
}

impl Graph for ExplicitGraph {
    fn num_states(&self) -> usize {
        self.adj.len()
    }

    fn successors(&self, from: u32, out: &mut Vec<Edge>) {
        out.extend_from_slice(&self.adj[from as usize]);
    }
}

impl ReverseGraph for ExplicitGraph {
    fn predecessors(&self, to: u32, out: &mut Vec<Edge>) {
        for (from, edges) in self.adj.iter().enumerate() {
            for e in edges.iter().filter(|e| e.to == to) {
                out.push(Edge { to: from as u32, cost: e.cost, action: e.action });
            }
        }
    }
}

/// Inflation schedule of the anytime search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnytimeSchedule {
    pub epsilon_0: f64,
    pub epsilon_step: f64,
    /// The search stops after the pass at or below this ε (at least 1).
    pub final_epsilon: f64,
}

impl Default for AnytimeSchedule {
    fn default() -> Self {
        AnytimeSchedule { epsilon_0: 3.0, epsilon_step: 0.2, final_epsilon: 1.0 }
    }
}

impl AnytimeSchedule {
    /// A single pass at ε = 1.
    pub fn optimal() -> Self {
        AnytimeSchedule { epsilon_0: 1.0, epsilon_step: 1.0, final_epsilon: 1.0 }
    }

    /// Stops after the first solution at `epsilon_0`.
    pub fn first_solution(epsilon_0: f64) -> Self {
        AnytimeSchedule { epsilon_0, epsilon_step: 0.2, final_epsilon: epsilon_0 }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.epsilon_0.is_finite() && self.epsilon_0 >= 1.0) {
            return Err(ConfigError::invalid("epsilon_0 must be at least 1"));
        }
        if !(self.epsilon_step.is_finite() && self.epsilon_step > 0.0) {
            return Err(ConfigError::invalid("epsilon_step must be positive"));
        }
        if !(self.final_epsilon >= 1.0 && self.final_epsilon <= self.epsilon_0) {
            return Err(ConfigError::invalid("final_epsilon must lie in [1, epsilon_0]"));
        }
        Ok(())
    }

    /// ε_0, step and final ε in thousandths.
    pub(crate) fn milli(&self) -> (u64, u64, u64) {
        let e0 = (self.epsilon_0 * 1000.0).round().max(1000.0) as u64;
        let step = (self.epsilon_step * 1000.0).round().max(1.0) as u64;
        let last = ((self.final_epsilon * 1000.0).round() as u64).clamp(1000, e0);
        (e0, step, last)
    }
}

/// Search limits, checked between expansions. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub time_s: Option<f64>,
    pub expansions: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn expansions(n: u64) -> Self {
        Budget { time_s: None, expansions: Some(n) }
    }

    pub fn seconds(t: f64) -> Self {
        Budget { time_s: Some(t), expansions: None }
    }
}

/// Heuristic over dense state indices.
pub trait Heuristic {
    fn h(&self, state: u32) -> u64;
}

impl<F: Fn(u32) -> u64> Heuristic for F {
    fn h(&self, state: u32) -> u64 {
        self(state)
    }
}

/// The zero heuristic.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroHeuristic;

impl Heuristic for ZeroHeuristic {
    fn h(&self, _: u32) -> u64 {
        0
    }
}
