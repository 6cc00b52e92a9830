mod common;

use common::{feasibility_violations, flat_maps, model};
use legplan::cost::{footstep_cost, FootstepContext};
use legplan::footstep::{candidate_footholds, nominal_stance};
use legplan::geometry::inradius;
use legplan::sim::{run_trial, BenchConfig, BenchmarkCase, BenchmarkKind, PlannerKind};
use legplan::{
    a_star, footstep_sequence, BodyActionPlan, Budget, CostModel, FootstepError, FootstepPlan, HeuristicKind, Pose2,
};

fn flat_plan() -> (CostModel, BodyActionPlan) {
    let m = flat_maps(150, 100);
    let model = model(&m);
    let start = model.lattice.discretize(&Pose2::new(0.7, 1.0, 0.0));
    let goal = model.lattice.discretize(&Pose2::new(1.5, 1.2, 0.2));
    let plan = a_star(&model, &start, &goal, HeuristicKind::Guarded, &Budget::unlimited()).unwrap();
    (model, plan)
}

fn assert_feasible(model: &CostModel, plan: &BodyActionPlan, steps: &FootstepPlan) {
    let violations = feasibility_violations(model, plan, steps);
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn flat_plan_footholds_are_feasible() {
    let (model, plan) = flat_plan();
    let steps = footstep_sequence(&model, &plan, plan.len(), None).unwrap();
    assert_eq!(steps.actions_covered, plan.len());
    assert_feasible(&model, &plan, &steps);
}

#[test]
fn horizon_limits_the_sequence() {
    let (model, plan) = flat_plan();
    assert!(plan.len() > 3);
    let one = footstep_sequence(&model, &plan, 1, None).unwrap();
    assert_eq!(one.footsteps.len(), 4);
    assert_eq!(one.actions_covered, 1);
    let long = footstep_sequence(&model, &plan, plan.len() + 50, None).unwrap();
    assert_eq!(long.footsteps.len(), 4 * plan.len());
    assert_eq!(footstep_sequence(&model, &plan, 0, None).unwrap_err(), FootstepError::ZeroHorizon);
    let mut empty = plan.clone();
    empty.states.truncate(1);
    empty.actions.clear();
    assert_eq!(footstep_sequence(&model, &empty, 3, None).unwrap_err(), FootstepError::EmptyPlan);
}

#[test]
fn each_foothold_is_the_cheapest_candidate() {
    let (model, plan) = flat_plan();
    let steps = footstep_sequence(&model, &plan, plan.len(), None).unwrap();
    let mut stance = nominal_stance(&model, &plan.states[0]);
    for i in 0..steps.actions_covered {
        let prim = model.prims.get(plan.actions[i]);
        let regions = model.regions(plan.actions[i], &plan.states[i + 1]);
        for (k, f) in steps.action_steps(i).iter().enumerate() {
            let ctx = FootstepContext {
                leg: f.leg,
                next_leg: prim.leg_order[(k + 1) % 4],
                stance: &stance,
                heading: plan.states[i + 1].theta(),
                weights: &model.params.footstep,
                params: &model.params,
                maps: model.maps(),
            };
            let best = candidate_footholds(&regions[f.leg.index()], model.maps())
                .iter()
                .filter_map(|c| footstep_cost(&ctx, c.ix, c.iy))
                .map(|b| b.total)
                .fold(f64::INFINITY, f64::min);
            assert!((f.cost.total - best).abs() < 1e-12);
            stance = stance.with(f.leg, f.position);
        }
    }
    assert_eq!(stance, steps.final_stance);
}

#[test]
fn greedy_support_beats_inner_corner_placement() {
    let (model, plan) = flat_plan();
    let steps = footstep_sequence(&model, &plan, plan.len(), None).unwrap();
    let mut greedy = 0.0;
    let mut inner = 0.0;
    let mut stance = nominal_stance(&model, &plan.states[0]);
    let mut corner_stance = stance;
    for i in 0..steps.actions_covered {
        let prim = model.prims.get(plan.actions[i]);
        let pose = model.lattice.pose(&plan.states[i + 1]);
        let regions = model.regions(plan.actions[i], &plan.states[i + 1]);
        for (k, f) in steps.action_steps(i).iter().enumerate() {
            let [a, b] = legplan::cost::support_partners(f.leg, prim.leg_order[(k + 1) % 4]);
            greedy += inradius(f.position.xy(), stance.foot(a).xy(), stance.foot(b).xy());
            stance = stance.with(f.leg, f.position);
            // Baseline: the candidate closest to the body center.
            let c = candidate_footholds(&regions[f.leg.index()], model.maps())
                .into_iter()
                .min_by(|p, q| {
                    p.position.xy().distance(pose.position()).total_cmp(&q.position.xy().distance(pose.position()))
                })
                .unwrap();
            inner += inradius(c.position.xy(), corner_stance.foot(a).xy(), corner_stance.foot(b).xy());
            corner_stance = corner_stance.with(f.leg, c.position);
        }
    }
    assert!(greedy > 1.1 * inner, "greedy {greedy} vs inner corner {inner}");
}

#[test]
fn stepping_stone_footholds_land_on_stones() {
    let cfg = BenchConfig::default();
    let case = BenchmarkCase::new(BenchmarkKind::SteppingStones, 4, 7, &cfg).unwrap();
    let (model, out) = run_trial(&case, PlannerKind::AraStar, &cfg).unwrap();
    assert!(out.row.success, "{:?}", out.row.error);
    let plan = out.plan.unwrap();
    let steps = out.footsteps.unwrap();
    assert_feasible(&model, &plan, &steps);
    let (x0, x1) = cfg.terrain.stones_x;
    let on_field: Vec<_> =
        steps.footsteps.iter().filter(|f| f.position.x > x0 + 0.05 && f.position.x < x1 - 0.05).collect();
    assert!(on_field.len() >= 8);
    for f in on_field {
        assert!(f.position.z > cfg.terrain.stone_floor + 0.05, "foot in a gap at {:?}", f.position);
    }
}
