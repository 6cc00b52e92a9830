//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::time::Instant;

use common::{feasibility_violations, height_map, incremental_mismatches, maps, median, model};
use legplan::search::{check_admissibility, dijkstra_to_goal, GoalRegion, LatticeGraph, LatticeHeuristic};
use legplan::sim::{
    reveal_obstacle_scenario, run_benchmark, run_closed_loop, run_trial, BenchConfig, BenchmarkCase, BenchmarkKind,
    PlannerKind, SimConfig, TrialRow,
};
use legplan::{ara_star, AnytimeSchedule, BodyState, Budget, HeuristicKind, PlanError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;
const TRIALS: usize = 9;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Rows and timings gathered once over the 36 benchmark trials.
#[derive(Default)]
struct BenchData {
    astar: Vec<TrialRow>,
    ara: Vec<TrialRow>,
    mismatches: Vec<String>,
    feasibility: Vec<String>,
    plans_checked: usize,
    optimality_s: f64,
}

fn run_bench_trials() -> BenchData {
    let cfg = BenchConfig::default();
    let mut data = BenchData::default();
    for kind in BenchmarkKind::ALL {
        for trial in 0..TRIALS {
            let case = BenchmarkCase::new(kind, trial, SEED, &cfg).unwrap();
            let t = Instant::now();
            let (model, astar) = run_trial(&case, PlannerKind::AStar, &cfg).unwrap();
            let (start, goal) = case.endpoints(&model);
            let full = ara_star(&model, &start, &goal, &AnytimeSchedule::default(), cfg.heuristic, &cfg.budget, |_| {});
            let region = GoalRegion::new(goal);
            let graph = LatticeGraph::new(&model);
            let si = model.lattice.index(&start).unwrap();
            let truth = dijkstra_to_goal(&graph, si, |i| region.contains(&model.lattice.state(i)));
            data.optimality_s += t.elapsed().as_secs_f64();

            let a_units = astar.plan.as_ref().map(|p| p.cost_units);
            let ara_last = full.as_ref().ok().and_then(|p| p.last()).map(|p| (p.cost_units, p.epsilon));
            let ok = match (truth, a_units, ara_last) {
                (Some(t), Some(a), Some((r, eps))) => t == a && a == r && eps == 1.0,
                (None, None, None) => true,
                _ => false,
            };
            if !ok {
                data.mismatches.push(format!("{kind}/{trial}: dijkstra {truth:?} a* {a_units:?} ara* {ara_last:?}"));
            }

            let (_, ara) = run_trial(&case, PlannerKind::AraStar, &cfg).unwrap();
            for out in [&astar, &ara] {
                if let (Some(plan), Some(steps)) = (&out.plan, &out.footsteps) {
                    data.plans_checked += 1;
                    for v in feasibility_violations(&model, plan, steps) {
                        data.feasibility.push(format!("{kind}/{trial}/{}: {v}", out.row.planner.label()));
                    }
                } else {
                    data.feasibility.push(format!("{kind}/{trial}/{}: no plan", out.row.planner.label()));
                }
            }
            data.astar.push(astar.row);
            data.ara.push(ara.row);
        }
    }
    data
}

fn optimality(data: &BenchData) -> Verdict {
    let n = data.astar.len();
    let pass = data.mismatches.is_empty() && n == 36 && data.optimality_s < 60.0;
    let mut detail = format!("{n} trials, {} mismatches, {:.1} s", data.mismatches.len(), data.optimality_s);
    if let Some(m) = data.mismatches.first() {
        detail += &format!(" (first: {m})");
    }
    verdict(pass, detail)
}

/// Random 1.6 m square maps: rough floor with a few tall blocks on obstacle cells.
fn random_obstacle_map(seed: u64) -> legplan::TerrainMaps {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = vec![false; 400];
    for _ in 0..rng.gen_range(1..5) {
        let (bx, by) = (rng.gen_range(0..19), rng.gen_range(0..19));
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            if rng.gen_bool(0.6) {
                blocks[(by + dy) * 20 + bx + dx] = true;
            }
        }
    }
    let noise: Vec<f64> = (0..6400).map(|_| rng.gen_range(-0.02..0.02)).collect();
    maps(height_map(80, 80, |x, y| {
        let (bx, by) = ((x / 0.08) as usize, (y / 0.08) as usize);
        let (hx, hy) = ((x / 0.02) as usize, (y / 0.02) as usize);
        if blocks[by * 20 + bx] {
            0.5
        } else {
            noise[hy * 80 + hx]
        }
    }))
}

fn random_valid_state(model: &legplan::CostModel, rng: &mut ChaCha8Rng) -> Option<BodyState> {
    let valid: Vec<u32> = (0..model.lattice.num_states() as u32).filter(|&i| model.eval_index(i).valid).collect();
    (!valid.is_empty()).then(|| model.lattice.state(valid[rng.gen_range(0..valid.len())]))
}

fn bounded_suboptimality() -> Verdict {
    let t = Instant::now();
    let (mut solutions, mut reachable, mut violations) = (0, 0, Vec::new());
    for seed in 0..50u64 {
        let m = random_obstacle_map(seed);
        let model = model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        let (Some(start), Some(goal)) = (random_valid_state(&model, &mut rng), random_valid_state(&model, &mut rng))
        else {
            violations.push(format!("seed {seed}: no valid state"));
            continue;
        };
        let region = GoalRegion::new(goal);
        let graph = LatticeGraph::new(&model);
        let si = model.lattice.index(&start).unwrap();
        let truth = dijkstra_to_goal(&graph, si, |i| region.contains(&model.lattice.state(i)));
        let plans = ara_star(
            &model,
            &start,
            &goal,
            &AnytimeSchedule::default(),
            HeuristicKind::Guarded,
            &Budget::unlimited(),
            |_| {},
        );
        match (truth, plans) {
            (Some(opt), Ok(plans)) => {
                reachable += 1;
                for p in &plans {
                    solutions += 1;
                    let eps_milli = (p.epsilon * 1000.0).round() as u64;
                    if p.cost_units * 1000 > eps_milli * opt {
                        violations.push(format!("seed {seed}: cost {} > {} x {opt}", p.cost_units, p.epsilon));
                    }
                }
                if plans.last().map(|p| p.cost_units) != Some(opt) {
                    violations.push(format!("seed {seed}: final plan is not optimal"));
                }
            }
            (None, Err(PlanError::NoPlan { .. })) => {}
            (truth, plans) => violations.push(format!("seed {seed}: dijkstra {truth:?} vs ara* {:?}", plans.err())),
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = violations.is_empty() && reachable >= 25 && secs < 120.0;
    let mut detail =
        format!("{solutions} solutions on {reachable}/50 reachable maps, {} violations, {secs:.1} s", violations.len());
    if let Some(v) = violations.first() {
        detail += &format!(" (first: {v})");
    }
    verdict(pass, detail)
}

fn expansion_trend(data: &BenchData) -> Verdict {
    let mut ratios: Vec<f64> = Vec::new();
    let mut fewer = 0;
    for (a, r) in data.astar.iter().zip(&data.ara) {
        if a.success && r.success && r.expansions < a.expansions {
            fewer += 1;
        }
        ratios.push(a.expansions as f64 / r.expansions.max(1) as f64);
    }
    let n = ratios.len();
    let med = median(&mut ratios);
    let pass = n == 36 && fewer as f64 >= 0.9 * n as f64 && med >= 5.0;
    verdict(pass, format!("ARA* expands fewer nodes in {fewer}/{n} trials, median reduction {med:.1}x"))
}

struct SimData {
    successes: usize,
    collisions: usize,
    bad_footholds: usize,
    runs: usize,
    cycle_times: Vec<f64>,
    update_times: Vec<f64>,
}

fn run_closed_loop_seeds() -> SimData {
    let mut data =
        SimData { successes: 0, collisions: 0, bad_footholds: 0, runs: 0, cycle_times: vec![], update_times: vec![] };
    for seed in 0..20 {
        let scenario = reveal_obstacle_scenario(seed);
        let cfg = SimConfig { start: scenario.start, goal: scenario.goal, ..SimConfig::default() };
        let report = run_closed_loop(&scenario.world, &cfg).unwrap();
        data.runs += 1;
        data.successes += report.success as usize;
        data.collisions += report.collisions;
        data.bad_footholds += report.bad_footholds;
        data.cycle_times.extend(report.cycle_times());
        data.update_times.extend(report.update_times());
    }
    data
}

fn timing(bench: &BenchData, sim: &mut SimData) -> Verdict {
    let mut plan_times: Vec<f64> = bench.ara.iter().map(|r| r.time_s).collect();
    let plan = median(&mut plan_times);
    let cycle = median(&mut sim.cycle_times);
    let update = median(&mut sim.update_times);
    let runs = plan_times.len().min(sim.cycle_times.len()).min(sim.update_times.len());
    let pass = runs >= 5 && plan <= 2.0 && cycle <= 2.0 && update <= 0.5;
    verdict(
        pass,
        format!(
            "median initial plan {plan:.3} s, cycle {cycle:.3} s, reward update {update:.4} s (>= {runs} runs each)"
        ),
    )
}

fn incremental_updates() -> Verdict {
    let t = Instant::now();
    let mismatches: usize = (0..200).map(|seed| incremental_mismatches(seed, 10)).sum();
    let secs = t.elapsed().as_secs_f64();
    verdict(mismatches == 0 && secs < 30.0, format!("200 sequences, {mismatches} mismatched cells, {secs:.1} s"))
}

fn feasibility(data: &BenchData) -> Verdict {
    let mut detail = format!("{} plans checked, {} violations", data.plans_checked, data.feasibility.len());
    if let Some(v) = data.feasibility.first() {
        detail += &format!(" (first: {v})");
    }
    verdict(data.feasibility.is_empty() && data.plans_checked == 72, detail)
}

fn heuristic_audit() -> Verdict {
    let cfg = BenchConfig::default();
    let mut guarded_violations = 0;
    let mut faithful = legplan::search::AdmissibilityReport::default();
    let mut samples = 0;
    for kind in BenchmarkKind::ALL {
        // Trial 4 aims at the straight-ahead goal.
        let case = BenchmarkCase::new(kind, 4, SEED, &cfg).unwrap();
        let model = case.model(&cfg).unwrap();
        let (_, goal) = case.endpoints(&model);
        let region = GoalRegion::new(goal);
        let guarded = check_admissibility(
            &model,
            &LatticeHeuristic::new(&model, &region, HeuristicKind::Guarded),
            &goal,
            500,
            11,
        );
        samples += guarded.samples;
        guarded_violations += guarded.violations + guarded.edge_violations;
        let f = check_admissibility(
            &model,
            &LatticeHeuristic::new(&model, &region, HeuristicKind::Faithful),
            &goal,
            500,
            11,
        );
        faithful.merge(&f);
    }
    verdict(
        guarded_violations == 0 && samples == 2000,
        format!(
            "guarded: {guarded_violations} violations in {samples} samples; local-mean variant (informational): violation rate {:.3}",
            faithful.violation_rate()
        ),
    )
}

fn closed_loop(sim: &SimData) -> Verdict {
    let rate = sim.successes as f64 / sim.runs as f64;
    let pass = sim.collisions == 0 && sim.bad_footholds == 0 && rate >= 0.95;
    verdict(
        pass,
        format!(
            "{}/{} seeds reached the goal, {} collisions, {} bad footholds",
            sim.successes, sim.runs, sim.collisions, sim.bad_footholds
        ),
    )
}

fn determinism() -> Verdict {
    let cfg = BenchConfig::default();
    let planners = [PlannerKind::AStar, PlannerKind::AraStar];
    let first = run_benchmark(&BenchmarkKind::ALL, &planners, TRIALS, SEED, &cfg).unwrap().to_csv(false);
    let second = run_benchmark(&BenchmarkKind::ALL, &planners, TRIALS, SEED, &cfg).unwrap().to_csv(false);
    verdict(
        first == second && first.lines().count() == 9,
        format!("{} CSV bytes, identical: {}", first.len(), first == second),
    )
}

fn main() {
    let started = Instant::now();
    let bench = run_bench_trials();
    eprintln!("benchmark trials: {:.1} s", started.elapsed().as_secs_f64());
    let mut sim = run_closed_loop_seeds();
    eprintln!("closed loop: {:.1} s", started.elapsed().as_secs_f64());
    let results = [
        ("1 optimality equivalence", optimality(&bench)),
        ("2 bounded sub-optimality", bounded_suboptimality()),
        ("3 expansion trend", expansion_trend(&bench)),
        ("4 timing", timing(&bench, &mut sim)),
        ("5 incremental map updates", incremental_updates()),
        ("6 feasibility suite", feasibility(&bench)),
        ("7 heuristic audit", heuristic_audit()),
        ("8 closed-loop robustness", closed_loop(&sim)),
        ("9 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, v) in &results {
        println!("criterion {name}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += !v.pass as usize;
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
