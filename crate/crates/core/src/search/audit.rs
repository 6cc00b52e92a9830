//! Empirical admissibility and consistency audit of a lattice heuristic.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lattice_search::{cost_to_go, GoalRegion, LatticeGraph, LatticeHeuristic};
use super::{Graph, Heuristic};
use crate::cost::{units_to_cost, CostModel};
use crate::lattice::BodyState;

/// Violation counts of `h(s) <= h*(s)` and `h(s) <= c(s, s') + h(s')`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `h(s) - h*(s)` over violations (cost units).
    pub max_violation: f64,
    pub edge_samples: usize,
    pub edge_violations: usize,
    pub max_edge_violation: f64,
}

impl AdmissibilityReport {
    pub fn violation_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.violations as f64 / self.samples as f64
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations == 0 && self.edge_violations == 0
    }

    pub fn merge(&mut self, other: &AdmissibilityReport) {
        self.samples += other.samples;
        self.violations += other.violations;
        self.max_violation = self.max_violation.max(other.max_violation);
        self.edge_samples += other.edge_samples;
        self.edge_violations += other.edge_violations;
        self.max_edge_violation = self.max_edge_violation.max(other.max_edge_violation);
    }
}

/// Samples up to `samples` states that can reach `goal`, compares the
/// heuristic with the exact cost-to-go, and checks one random outgoing edge of
/// each sample for consistency. Never fails; it only reports.
pub fn check_admissibility(
    model: &CostModel,
    heuristic: &LatticeHeuristic<'_>,
    goal: &BodyState,
    samples: usize,
    seed: u64,
) -> AdmissibilityReport {
    let mut report = AdmissibilityReport::default();
    let table = cost_to_go(model, goal);
    let mut reachable: Vec<u32> = (0..table.cost.len() as u32).filter(|&i| table.get(i).is_some()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    reachable.shuffle(&mut rng);
    let graph = LatticeGraph::new(model);
    let region = GoalRegion::new(*goal);
    let mut edges = Vec::new();
    for &s in reachable.iter().take(samples) {
        let h = heuristic.h(s);
        let truth = table.get(s).expect("reachable");
        report.samples += 1;
        if h > truth {
            report.violations += 1;
            report.max_violation = report.max_violation.max(units_to_cost(h - truth));
        }
        if region.contains(&model.lattice.state(s)) {
            continue;
        }
        edges.clear();
        graph.successors(s, &mut edges);
        if let Some(e) = edges.choose(&mut rng) {
            report.edge_samples += 1;
            let bound = e.cost + heuristic.h(e.to);
            if h > bound {
                report.edge_violations += 1;
                report.max_edge_violation = report.max_edge_violation.max(units_to_cost(h - bound));
            }
        }
    }
    report
}
