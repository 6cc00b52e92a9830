//! Benchmark terrains, the planner comparison and the closed-loop simulation.

pub mod bench;
pub mod closed_loop;
pub mod render;
pub mod terrain;

pub use bench::{
    benchmark_goals, run_benchmark, run_trial, trial_seed, Aggregate, BenchConfig, BenchmarkCase, PlannerKind,
    RunReport, TrialOutcome, TrialRow, BENCH_START,
};
pub use closed_loop::{
    reveal_obstacle_scenario, run_closed_loop, sense, CycleRecord, DynamicEvent, Scenario, SimConfig, SimOutcome,
    SimReport,
};
pub use render::{leg_color, render_scene, scene_svg, Scene};
pub use terrain::{generate_benchmark_terrain, BenchmarkKind, BenchmarkParams};
