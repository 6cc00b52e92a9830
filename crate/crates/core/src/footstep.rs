//! Greedy footstep selection along a body action plan.
//!
//! For each of the first `F` actions, legs step in the primitive's leg order;
//! each leg takes the cheapest steppable cell of its search region, and the
//! working stance is updated before the next leg is chosen.

use serde::{Deserialize, Serialize};

use crate::cost::{contains_tol, footstep_cost, CostMaps, CostModel, FootstepContext, FootstepCostBreakdown, Stance};
use crate::error::FootstepError;
use crate::geometry::{Point2, Point3, RotRect};
use crate::lattice::{BodyState, Leg};
use crate::search::BodyActionPlan;

/// A reward cell usable as a foothold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub ix: i64,
    pub iy: i64,
    pub position: Point3,
    pub reward: f64,
}

/// Every known, steppable reward cell whose center lies in `region`.
pub fn candidate_footholds(region: &RotRect, maps: &CostMaps) -> Vec<Candidate> {
    let spec = maps.spec();
    let ((x0, y0), (x1, y1)) = spec.covering_range(&region.bounding_box());
    let mut out = Vec::new();
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            let c = spec.cell_center_signed(ix, iy);
            if contains_tol(region, c) {
                out.extend(candidate_at(maps, ix, iy));
            }
        }
    }
    out
}

fn candidate_at(maps: &CostMaps, ix: i64, iy: i64) -> Option<Candidate> {
    if !maps.is_steppable(ix, iy) {
        return None;
    }
    let z = maps.cell_elevation(ix, iy)?;
    let c = maps.spec().cell_center_signed(ix, iy);
    Some(Candidate { ix, iy, position: Point3::new(c.x, c.y, z), reward: maps.effective_reward(ix, iy)? })
}

/// The candidate with the lowest footstep cost. Ties prefer a larger swing
/// triangle, then the region center, then the lower cell index (x, then y).
pub fn greedy_select(
    candidates: &[Candidate],
    ctx: &FootstepContext<'_>,
    region_center: Point2,
) -> Option<(Candidate, FootstepCostBreakdown)> {
    candidates.iter().filter_map(|c| footstep_cost(ctx, c.ix, c.iy).map(|b| (*c, b))).min_by(|(ca, a), (cb, b)| {
        let da = ca.position.xy().distance(region_center);
        let db = cb.position.xy().distance(region_center);
        a.total
            .total_cmp(&b.total)
            .then(b.inradius.total_cmp(&a.inradius))
            .then(da.total_cmp(&db))
            .then(ca.ix.cmp(&cb.ix))
            .then(ca.iy.cmp(&cb.iy))
    })
}

/// One selected foothold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Footstep {
    pub leg: Leg,
    pub position: Point3,
    /// Index of the body action this step belongs to.
    pub action_index: usize,
    pub cost: FootstepCostBreakdown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootstepPlan {
    pub footsteps: Vec<Footstep>,
    /// Number of body actions fully covered (4 steps each).
    pub actions_covered: usize,
    pub horizon: usize,
    /// Stance after the last covered action.
    pub final_stance: Stance,
    /// Set when an action could not be completed; the footsteps before it are valid.
    pub infeasible: Option<FootstepError>,
}

impl FootstepPlan {
    pub fn is_feasible(&self) -> bool {
        self.infeasible.is_none()
    }

    /// Footsteps of body action `i`.
    pub fn action_steps(&self, i: usize) -> &[Footstep] {
        let lo = (4 * i).min(self.footsteps.len());
        let hi = (4 * i + 4).min(self.footsteps.len());
        &self.footsteps[lo..hi]
    }
}

/// Nominal stance of the body at `s`, with elevations from the map (0 where unknown).
pub fn nominal_stance(model: &CostModel, s: &BodyState) -> Stance {
    let pose = model.lattice.pose(s);
    let spec = *model.maps().spec();
    let feet = Leg::ALL.map(|leg| {
        let p = pose.transform(model.geom.nominal_offset(leg));
        let (ix, iy) = spec.cell_coords(p);
        let z = model.maps().cell_elevation(ix, iy).unwrap_or(0.0);
        Point3::new(p.x, p.y, z)
    });
    Stance { feet }
}

/// Greedy footstep sequence for the first `horizon` actions of `plan`.
/// `stance` defaults to the nominal stance at the plan start.
pub fn footstep_sequence(
    model: &CostModel,
    plan: &BodyActionPlan,
    horizon: usize,
    stance: Option<Stance>,
) -> Result<FootstepPlan, FootstepError> {
    if horizon == 0 {
        return Err(FootstepError::ZeroHorizon);
    }
    if plan.is_empty() {
        return Err(FootstepError::EmptyPlan);
    }
    let mut stance = stance.unwrap_or_else(|| nominal_stance(model, &plan.states[0]));
    let weights = model.params.footstep;
    let mut footsteps = Vec::new();
    let mut covered = 0;
    let mut infeasible = None;
    'actions: for i in 0..horizon.min(plan.len()) {
        let prim_idx = plan.actions[i];
        let prim = model.prims.get(prim_idx);
        let s_next = plan.states[i + 1];
        let heading = s_next.theta();
        let regions = model.regions(prim_idx, &s_next);
        let mut working = stance;
        let mut steps = Vec::with_capacity(4);
        for (k, &leg) in prim.leg_order.iter().enumerate() {
            let candidates: Vec<Candidate> = model
                .region_cells(prim_idx, &s_next, leg)
                .filter_map(|(ix, iy)| candidate_at(model.maps(), ix, iy))
                .collect();
            let ctx = FootstepContext {
                leg,
                next_leg: prim.leg_order[(k + 1) % 4],
                stance: &working,
                heading,
                weights: &weights,
                params: &model.params,
                maps: model.maps(),
            };
            let Some((best, cost)) = greedy_select(&candidates, &ctx, regions[leg.index()].center) else {
                infeasible = Some(FootstepError::EmptyRegion { leg, action_index: i });
                break 'actions;
            };
            working = working.with(leg, best.position);
            steps.push(Footstep { leg, position: best.position, action_index: i, cost });
        }
        stance = working;
        footsteps.extend(steps);
        covered += 1;
    }
    Ok(FootstepPlan { footsteps, actions_covered: covered, horizon, final_stance: stance, infeasible })
}

/// Checks that `f` lies in the search region of `leg` for action `i` of `plan`.
pub fn check_containment(model: &CostModel, plan: &BodyActionPlan, step: &Footstep) -> Result<(), FootstepError> {
    let regions = model.regions(plan.actions[step.action_index], &plan.states[step.action_index + 1]);
    if contains_tol(&regions[step.leg.index()], step.position.xy()) {
        Ok(())
    } else {
        Err(FootstepError::OutsideRegion { leg: step.leg, x: step.position.x, y: step.position.y })
    }
}
