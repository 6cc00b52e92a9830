//! Fixtures shared by the criterion benches.

use legplan::sim::{BenchConfig, BenchmarkCase, BenchmarkKind};
use legplan::{BodyState, CostModel, Rect};

/// Seed used for every fixture.
pub const SEED: u64 = 7;

/// Straight-ahead benchmark trial on `kind` with the default configuration.
pub fn case(kind: BenchmarkKind) -> (BenchConfig, BenchmarkCase) {
    let cfg = BenchConfig::default();
    let case = BenchmarkCase::new(kind, 4, SEED, &cfg).expect("default benchmark config is valid");
    (cfg, case)
}

/// Cost model plus start and goal states for `case`.
pub fn model(cfg: &BenchConfig, case: &BenchmarkCase) -> (CostModel, BodyState, BodyState) {
    let model = case.model(cfg).expect("default cost config is valid");
    let (start, goal) = case.endpoints(&model);
    (model, start, goal)
}

/// A 0.4 m square dirty region in the middle of the benchmark map.
pub fn dirty_region(case: &BenchmarkCase) -> Rect {
    let e = case.maps.height.spec().extent();
    let c = (e.min + e.max) * 0.5;
    Rect::from_center(c, 0.2, 0.2)
}
