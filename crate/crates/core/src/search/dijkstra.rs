//! Plain Dijkstra, kept independent of the anytime engine so it can serve as
//! its test oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Edge, Graph, ReverseGraph};

/// Optimal costs from (or to) a source set; `u64::MAX` marks unreachable states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostTable {
    pub cost: Vec<u64>,
}

impl CostTable {
    pub fn get(&self, state: u32) -> Option<u64> {
        let c = self.cost[state as usize];
        (c != u64::MAX).then_some(c)
    }

    pub fn reachable(&self) -> usize {
        self.cost.iter().filter(|&&c| c != u64::MAX).count()
    }

    /// Smallest cost over `states`.
    pub fn min_over(&self, states: impl IntoIterator<Item = u32>) -> Option<u64> {
        states.into_iter().filter_map(|s| self.get(s)).min()
    }
}

/// Exact cost-to-come from `start` for every reachable state.
pub fn dijkstra_oracle<G: Graph>(graph: &G, start: u32) -> CostTable {
    run(graph.num_states(), &[start], |s, out| graph.successors(s, out))
}

/// Exact optimal cost from `start` to the nearest state satisfying `is_goal`,
/// stopping as soon as that state is settled.
pub fn dijkstra_to_goal<G: Graph>(graph: &G, start: u32, is_goal: impl Fn(u32) -> bool) -> Option<u64> {
    let mut cost = vec![u64::MAX; graph.num_states()];
    let mut heap = BinaryHeap::new();
    cost[start as usize] = 0;
    heap.push(Reverse((0u64, start)));
    let mut edges = Vec::with_capacity(16);
    while let Some(Reverse((c, s))) = heap.pop() {
        if c > cost[s as usize] {
            continue;
        }
        if is_goal(s) {
            return Some(c);
        }
        edges.clear();
        graph.successors(s, &mut edges);
        for e in &edges {
            let nc = c + e.cost;
            if nc < cost[e.to as usize] {
                cost[e.to as usize] = nc;
                heap.push(Reverse((nc, e.to)));
            }
        }
    }
    None
}

/// Exact costs from a set of zero-cost sources, following edges forward or,
/// with `reverse`, backward (giving cost-to-go into the sources).
pub fn dijkstra_from<G: ReverseGraph>(graph: &G, sources: &[u32], reverse: bool) -> CostTable {
    if reverse {
        run(graph.num_states(), sources, |s, out| graph.predecessors(s, out))
    } else {
        run(graph.num_states(), sources, |s, out| graph.successors(s, out))
    }
}

fn run(n: usize, sources: &[u32], mut expand: impl FnMut(u32, &mut Vec<Edge>)) -> CostTable {
    let mut cost = vec![u64::MAX; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        cost[s as usize] = 0;
        heap.push(Reverse((0u64, s)));
    }
    let mut edges = Vec::with_capacity(16);
    while let Some(Reverse((c, s))) = heap.pop() {
        if c > cost[s as usize] {
            continue;
        }
        edges.clear();
        expand(s, &mut edges);
        for e in &edges {
            let nc = c + e.cost;
            if nc < cost[e.to as usize] {
                cost[e.to as usize] = nc;
                heap.push(Reverse((nc, e.to)));
            }
        }
    }
    CostTable { cost }
}
