//! Anytime repairing A* over a [`Graph`] with a virtual goal node.
//!
//! Each pass runs weighted A* with `fval = g + ε·h` until the goal's cost is no
//! larger than the smallest key in OPEN. States improved after being closed in
//! the current pass wait in INCONS and rejoin OPEN when ε decreases; OPEN is
//! then fully re-keyed. A* is the single pass at ε = 1.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{AnytimeSchedule, Budget, Edge, Graph, Heuristic};

const NO_PARENT: u32 = u32::MAX;
const UNSEEN: u64 = u64::MAX;

const OPEN: u8 = 1;
const CLOSED: u8 = 2;
const INCONS: u8 = 4;

/// A path through the graph with its per-edge costs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchPath {
    pub states: Vec<u32>,
    pub actions: Vec<u8>,
    pub step_costs: Vec<u64>,
    pub cost: u64,
}

/// One published solution of the anytime search.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub path: SearchPath,
    /// Inflation of the pass that produced it; the cost is within this factor of optimal.
    pub epsilon: f64,
    /// Total expansions so far, including earlier passes.
    pub expansions: u64,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution>,
    pub expansions: u64,
    pub elapsed_s: f64,
    /// The budget ran out before the schedule reached ε = 1.
    pub budget_exhausted: bool,
}

impl SearchOutcome {
    pub fn best(&self) -> Option<&Solution> {
        self.solutions.last()
    }
}

/// Heap key: smaller fval first, then larger g, then smaller index.
type Key = Reverse<(u64, Reverse<u64>, u32)>;

struct Search<'a, G, H, T> {
    graph: &'a G,
    h: &'a H,
    is_goal: &'a T,
    g: Vec<u64>,
    parent: Vec<u32>,
    action: Vec<u8>,
    flags: Vec<u8>,
    heap: BinaryHeap<Key>,
    incons: Vec<u32>,
    closed: Vec<u32>,
    goal_g: u64,
    goal_parent: u32,
    eps_milli: u64,
    expansions: u64,
}

impl<G: Graph, H: Heuristic, T: Fn(u32) -> bool> Search<'_, G, H, T> {
    #[inline]
    fn key(&self, s: u32) -> Key {
        let g = self.g[s as usize];
        let f = g.saturating_mul(1000).saturating_add(self.eps_milli.saturating_mul(self.h.h(s)));
        Reverse((f, Reverse(g), s))
    }

    /// Drops stale heap entries and returns the smallest live key.
    fn peek(&mut self) -> Option<u64> {
        while let Some(&Reverse((f, Reverse(g), s))) = self.heap.peek() {
            if self.flags[s as usize] & OPEN != 0 && self.g[s as usize] == g {
                return Some(f);
            }
            self.heap.pop();
        }
        None
    }

    /// Runs one pass. Returns `false` if the budget stopped it early.
    fn improve_path(&mut self, budget: &Budget, started: Instant, edges: &mut Vec<Edge>) -> bool {
        loop {
            let Some(min_f) = self.peek() else { return true };
            if self.goal_g != UNSEEN && self.goal_g.saturating_mul(1000) <= min_f {
                return true;
            }
            if budget.expansions.is_some_and(|n| self.expansions >= n)
                || budget.time_s.is_some_and(|t| started.elapsed().as_secs_f64() >= t)
            {
                return false;
            }
            let Reverse((_, _, s)) = self.heap.pop().expect("peeked");
            let si = s as usize;
            self.flags[si] = (self.flags[si] & !OPEN) | CLOSED;
            self.closed.push(s);
            self.expansions += 1;
            let gs = self.g[si];
            if (self.is_goal)(s) && gs < self.goal_g {
                self.goal_g = gs;
                self.goal_parent = s;
            }
            edges.clear();
            self.graph.successors(s, edges);
            for e in edges.iter() {
                let t = e.to as usize;
                let ng = gs + e.cost;
                if ng < self.g[t] {
                    self.g[t] = ng;
                    self.parent[t] = s;
                    self.action[t] = e.action;
                    if self.flags[t] & CLOSED == 0 {
                        self.flags[t] |= OPEN;
                        let k = self.key(e.to);
                        self.heap.push(k);
                    } else if self.flags[t] & INCONS == 0 {
                        self.flags[t] |= INCONS;
                        self.incons.push(e.to);
                    }
                }
            }
        }
    }

    /// Moves INCONS into OPEN, clears CLOSED and re-keys OPEN for the new ε.
    fn next_pass(&mut self, eps_milli: u64) {
        self.eps_milli = eps_milli;
        let mut live: Vec<u32> = self
            .heap
            .drain()
            .filter_map(|Reverse((_, Reverse(g), s))| {
                let open = self.flags[s as usize] & OPEN != 0 && self.g[s as usize] == g;
                open.then_some(s)
            })
            .collect();
        for s in self.incons.drain(..) {
            self.flags[s as usize] = (self.flags[s as usize] & !INCONS) | OPEN;
            live.push(s);
        }
        for s in self.closed.drain(..) {
            self.flags[s as usize] &= !CLOSED;
        }
        live.sort_unstable();
        live.dedup();
        let keys: Vec<Key> = live.iter().map(|&s| self.key(s)).collect();
        self.heap = BinaryHeap::from(keys);
    }

    fn reconstruct(&self) -> SearchPath {
        let mut states = vec![self.goal_parent];
        let mut actions = Vec::new();
        let mut cur = self.goal_parent;
        while self.parent[cur as usize] != NO_PARENT {
            actions.push(self.action[cur as usize]);
            cur = self.parent[cur as usize];
            states.push(cur);
        }
        states.reverse();
        actions.reverse();
        let step_costs: Vec<u64> = states
            .windows(2)
            .zip(&actions)
            .map(|(w, &a)| {
                let e = self.graph.edge(w[0], a).expect("backpointer edge exists");
                debug_assert_eq!(e.to, w[1]);
                e.cost
            })
            .collect();
        let cost = step_costs.iter().sum();
        SearchPath { states, actions, step_costs, cost }
    }
}

/// Anytime repairing A* from `start` to any state satisfying `is_goal`.
///
/// `on_solution` is called as soon as each pass publishes a plan. The run ends
/// after the pass at the schedule's final ε, when OPEN empties without a solution, or when the
/// budget runs out (only completed passes publish).
pub fn anytime_search<G, H, T>(
    graph: &G,
    start: u32,
    is_goal: &T,
    h: &H,
    schedule: &AnytimeSchedule,
    budget: &Budget,
    mut on_solution: impl FnMut(&Solution),
) -> SearchOutcome
where
    G: Graph,
    H: Heuristic,
    T: Fn(u32) -> bool,
{
    let started = Instant::now();
    let n = graph.num_states();
    let (eps0, step, last) = schedule.milli();
    let mut search = Search {
        graph,
        h,
        is_goal,
        g: vec![UNSEEN; n],
        parent: vec![NO_PARENT; n],
        action: vec![0; n],
        flags: vec![0; n],
        heap: BinaryHeap::new(),
        incons: Vec::new(),
        closed: Vec::new(),
        goal_g: UNSEEN,
        goal_parent: NO_PARENT,
        eps_milli: eps0,
        expansions: 0,
    };
    search.g[start as usize] = 0;
    search.flags[start as usize] = OPEN;
    let k = search.key(start);
    search.heap.push(k);

    let mut outcome = SearchOutcome::default();
    let mut edges = Vec::with_capacity(16);
    let mut eps = eps0;
    loop {
        let finished = search.improve_path(budget, started, &mut edges);
        if !finished {
            outcome.budget_exhausted = true;
            break;
        }
        if search.goal_g == UNSEEN {
            break;
        }
        let sol = Solution {
            path: search.reconstruct(),
            epsilon: eps as f64 / 1000.0,
            expansions: search.expansions,
            elapsed_s: started.elapsed().as_secs_f64(),
        };
        on_solution(&sol);
        outcome.solutions.push(sol);
        if eps <= last {
            break;
        }
        eps = eps.saturating_sub(step).max(1000);
        search.next_pass(eps);
    }
    outcome.expansions = search.expansions;
    outcome.elapsed_s = started.elapsed().as_secs_f64();
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{dijkstra_oracle, ExplicitGraph, ZeroHeuristic};

    fn line(n: u32) -> ExplicitGraph {
        let mut g = ExplicitGraph::new(n as usize);
        for i in 0..n - 1 {
            g.add_edge(i, i + 1, 3);
        }
        g
    }

    #[test]
    fn start_is_goal_gives_empty_path() {
        let g = line(3);
        let out = anytime_search(
            &g,
            1,
            &|s| s == 1,
            &ZeroHeuristic,
            &AnytimeSchedule::default(),
            &Budget::unlimited(),
            |_| {},
        );
        let best = out.best().unwrap();
        assert_eq!(best.path.states, vec![1]);
        assert_eq!(best.path.cost, 0);
    }

    #[test]
    fn unreachable_goal_gives_no_solution() {
        let g = line(3);
        let out = anytime_search(
            &g,
            2,
            &|s| s == 0,
            &ZeroHeuristic,
            &AnytimeSchedule::default(),
            &Budget::unlimited(),
            |_| {},
        );
        assert!(out.solutions.is_empty());
        assert!(!out.budget_exhausted);
    }

    #[test]
    fn inflated_heuristic_is_repaired_to_optimal() {
        // 0 -> 1 -> 3 is cheap, 0 -> 2 -> 3 looks better to a misleading h.
        let mut g = ExplicitGraph::new(4);
        g.add_edge(0, 1, 5);
        g.add_edge(0, 2, 1);
        g.add_edge(1, 3, 1);
        g.add_edge(2, 3, 9);
        let h = |s: u32| [5u64, 1, 0, 0][s as usize];
        let mut costs = Vec::new();
        let out = anytime_search(&g, 0, &|s| s == 3, &h, &AnytimeSchedule::default(), &Budget::unlimited(), |s| {
            costs.push((s.epsilon, s.path.cost))
        });
        assert_eq!(out.best().unwrap().path.cost, dijkstra_oracle(&g, 0).get(3).unwrap());
        assert!(costs.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 < w[0].0));
        assert_eq!(costs.last().unwrap().0, 1.0);
    }

    #[test]
    fn expansion_budget_stops_search() {
        let g = line(50);
        let out = anytime_search(
            &g,
            0,
            &|s| s == 49,
            &ZeroHeuristic,
            &AnytimeSchedule::default(),
            &Budget::expansions(10),
            |_| {},
        );
        assert!(out.budget_exhausted);
        assert!(out.solutions.is_empty());
        assert_eq!(out.expansions, 10);
    }
}
