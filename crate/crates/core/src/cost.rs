//! Body-transition and footstep costs.
//!
//! The body cost of a transition `s -> s'` under primitive `p` splits into a
//! part that depends only on `s'` (terrain, potential shin collision and body
//! orientation, all evaluated on the nominal-stance windows) and a move part
//! (action rank and per-step base cost). The state part is evaluated lazily and
//! cached per lattice state; search costs are quantized to integer units.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::geometry::{inradius, Point2, Point3, Pose2, RotRect};
use crate::grid::GridSpec;
use crate::lattice::{
    ActionClass, BodyState, Collision, FootprintStencil, Lattice, Leg, MotionPrimitive, OutOfMapPolicy, PrimitiveSet,
    StanceGeometry, HEADING_BINS, HEADING_RESOLUTION,
};
use crate::terrain::{HeightMap, ObstacleMap, TerrainMaps, REWARD_FACTOR};

/// Search costs are integers in units of `1 / COST_SCALE`.
pub const COST_SCALE: f64 = 1e4;

/// Rounds a transition cost up to search units.
#[inline]
pub fn cost_to_units(c: f64) -> u64 {
    (c * COST_SCALE).ceil() as u64
}

/// Rounds a lower bound down to search units.
#[inline]
pub fn bound_to_units(c: f64) -> u64 {
    (c * COST_SCALE * (1.0 - 1e-12)).floor().max(0.0) as u64
}

pub fn units_to_cost(u: u64) -> f64 {
    u as f64 / COST_SCALE
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BodyCostWeights {
    pub terrain: f64,
    pub action: f64,
    pub shin: f64,
    pub orientation: f64,
}

impl Default for BodyCostWeights {
    fn default() -> Self {
        BodyCostWeights { terrain: 1.0, action: 0.3, shin: 0.8, orientation: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FootstepCostWeights {
    pub terrain: f64,
    pub support: f64,
    pub shin: f64,
    pub orientation: f64,
}

impl Default for FootstepCostWeights {
    fn default() -> Self {
        FootstepCostWeights { terrain: 1.0, support: 0.7, shin: 0.8, orientation: 0.4 }
    }
}

impl FootstepCostWeights {
    pub fn scaled(&self, k: f64) -> Self {
        FootstepCostWeights {
            terrain: self.terrain * k,
            support: self.support * k,
            shin: self.shin * k,
            orientation: self.orientation * k,
        }
    }
}

/// Shin collision rectangle: `length` along the heading, ahead of front feet
/// and behind hind feet, `width` across it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShinCollisionParams {
    pub length: f64,
    pub width: f64,
    /// Height above the footstep plane that is tolerated (m).
    pub tolerance: f64,
}

impl Default for ShinCollisionParams {
    fn default() -> Self {
        ShinCollisionParams { length: 0.12, width: 0.08, tolerance: 0.05 }
    }
}

impl ShinCollisionParams {
    /// Body-frame offset of the rectangle center from the foothold.
    pub fn offset(&self, leg: Leg) -> Point2 {
        let x = 0.5 * self.length;
        Point2::new(if leg.is_front() { x } else { -x }, 0.0)
    }

    pub fn rect(&self, foothold: Point2, heading: f64, leg: Leg) -> RotRect {
        RotRect::new(foothold + self.offset(leg).rotated(heading), 0.5 * self.length, 0.5 * self.width, heading)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostParams {
    pub body: BodyCostWeights,
    pub footstep: FootstepCostWeights,
    pub shin: ShinCollisionParams,
    /// Best cells averaged per leg for the body terrain cost.
    pub best_n: usize,
    /// Support inradius at which the support cost vanishes (m).
    pub r_target: f64,
    /// Base cost of one stride-length step.
    pub step_base_cost: f64,
    /// Orientation cost when fewer than three legs have known terrain.
    pub max_orientation_cost: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            body: BodyCostWeights::default(),
            footstep: FootstepCostWeights::default(),
            shin: ShinCollisionParams::default(),
            best_n: 5,
            r_target: 0.08,
            step_base_cost: 0.1,
            max_orientation_cost: 1.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.body;
        let f = &self.footstep;
        let weights = [b.terrain, b.action, b.shin, b.orientation, f.terrain, f.support, f.shin, f.orientation];
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(ConfigError::invalid("cost weights must be finite and non-negative"));
        }
        if self.best_n == 0 {
            return Err(ConfigError::invalid("best_n must be at least 1"));
        }
        if !(self.step_base_cost.is_finite() && self.step_base_cost > 0.0) {
            return Err(ConfigError::invalid("step_base_cost must be positive"));
        }
        if !(self.r_target > 0.0 && self.shin.tolerance >= 0.0 && self.shin.length > 0.0 && self.shin.width > 0.0) {
            return Err(ConfigError::invalid("r_target and shin rectangle must be positive, tolerance non-negative"));
        }
        if !(self.max_orientation_cost.is_finite() && self.max_orientation_cost >= 0.0) {
            return Err(ConfigError::invalid("max_orientation_cost must be non-negative"));
        }
        Ok(())
    }
}

/// Planner-facing snapshot of the terrain on the reward grid.
#[derive(Clone, Debug)]
pub struct CostMaps {
    spec: GridSpec,
    /// Reward used by planners; occupied cells read -1, unknown the default.
    effective_reward: Vec<f64>,
    /// Not occupied in the obstacle map (unknown counts as steppable).
    steppable: Vec<bool>,
    /// Mean known elevation of the 2×2 height cells; NaN if none known.
    elevation: Vec<f64>,
    max_reward: f64,
    height: HeightMap,
    obstacle: ObstacleMap,
}

impl CostMaps {
    pub fn new(maps: &TerrainMaps) -> Self {
        let spec = *maps.reward.spec();
        let hspec = *maps.height.spec();
        let n = spec.len();
        let mut effective_reward = Vec::with_capacity(n);
        let mut steppable = Vec::with_capacity(n);
        let mut elevation = Vec::with_capacity(n);
        for iy in 0..spec.height {
            for ix in 0..spec.width {
                effective_reward.push(maps.effective_reward(ix, iy));
                steppable.push(!maps.is_occupied_reward_cell(ix, iy));
                let (mut sum, mut cnt) = (0.0, 0usize);
                for hy in iy * REWARD_FACTOR..((iy + 1) * REWARD_FACTOR).min(hspec.height) {
                    for hx in ix * REWARD_FACTOR..((ix + 1) * REWARD_FACTOR).min(hspec.width) {
                        if let Some(z) = maps.height.elevation(hx, hy) {
                            sum += z;
                            cnt += 1;
                        }
                    }
                }
                elevation.push(if cnt > 0 { sum / cnt as f64 } else { f64::NAN });
            }
        }
        let max_reward = effective_reward.iter().copied().fold(-1.0, f64::max).min(0.0);
        CostMaps {
            spec,
            effective_reward,
            steppable,
            elevation,
            max_reward,
            height: maps.height.clone(),
            obstacle: maps.obstacle.clone(),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn height(&self) -> &HeightMap {
        &self.height
    }

    pub fn obstacle(&self) -> &ObstacleMap {
        &self.obstacle
    }

    /// Largest effective reward in the map.
    pub fn max_reward(&self) -> f64 {
        self.max_reward
    }

    #[inline]
    fn flat(&self, ix: i64, iy: i64) -> Option<usize> {
        self.spec.in_bounds(ix, iy).then(|| self.spec.index(ix as usize, iy as usize))
    }

    pub fn effective_reward(&self, ix: i64, iy: i64) -> Option<f64> {
        self.flat(ix, iy).map(|i| self.effective_reward[i])
    }

    pub fn is_steppable(&self, ix: i64, iy: i64) -> bool {
        self.flat(ix, iy).is_some_and(|i| self.steppable[i])
    }

    /// Elevation of a reward cell; `None` when none of its height cells is known.
    pub fn cell_elevation(&self, ix: i64, iy: i64) -> Option<f64> {
        self.flat(ix, iy).map(|i| self.elevation[i]).filter(|z| !z.is_nan())
    }
}

/// Reward-cell offsets, relative to the body cell, whose centers lie in `rect`.
/// `rect` is given relative to the body center. Row-major order.
pub(crate) fn reward_cell_offsets(res: f64, rect: &RotRect) -> Vec<(i32, i32)> {
    let bb = rect.bounding_box();
    let x0 = (bb.min.x / res).floor() as i32 - 1;
    let x1 = (bb.max.x / res).ceil() as i32 + 1;
    let y0 = (bb.min.y / res).floor() as i32 - 1;
    let y1 = (bb.max.y / res).ceil() as i32 + 1;
    let mut out = Vec::new();
    for dy in y0..=y1 {
        for dx in x0..=x1 {
            if contains_tol(rect, Point2::new(dx as f64 * res, dy as f64 * res)) {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Height-cell offsets `k` such that height cell `2·ix + 1 + k.x` (and the same
/// in y) has its center in `rect`, relative to the body center.
pub(crate) fn height_cell_offsets(hres: f64, rect: &RotRect) -> Vec<(i32, i32)> {
    let bb = rect.bounding_box();
    let x0 = (bb.min.x / hres).floor() as i32 - 1;
    let x1 = (bb.max.x / hres).ceil() as i32 + 1;
    let y0 = (bb.min.y / hres).floor() as i32 - 1;
    let y1 = (bb.max.y / hres).ceil() as i32 + 1;
    let mut out = Vec::new();
    for ky in y0..=y1 {
        for kx in x0..=x1 {
            let p = Point2::new((kx as f64 + 0.5) * hres, (ky as f64 + 0.5) * hres);
            if contains_tol(rect, p) {
                out.push((kx, ky));
            }
        }
    }
    out
}

/// Closed containment with a 1e-9 m tolerance.
#[inline]
pub fn contains_tol(rect: &RotRect, p: Point2) -> bool {
    let l = rect.to_local(p);
    l.x.abs() <= rect.half_x + 1e-9 && l.y.abs() <= rect.half_y + 1e-9
}

/// Region rect relative to the body center for a heading bin.
fn local_region(geom: &StanceGeometry, p: &MotionPrimitive, leg: Leg, itheta: u16) -> RotRect {
    let pose = Pose2::new(0.0, 0.0, itheta as f64 * HEADING_RESOLUTION);
    p.region(leg).world_rect(geom, &pose)
}

/// Precomputed cell offsets for every heading bin.
#[derive(Clone, Debug)]
pub struct Stencils {
    n_prims: usize,
    /// `[itheta][prim][leg]` reward-cell offsets of the search regions.
    regions: Vec<Vec<(i32, i32)>>,
    /// `[itheta][leg]` height-cell offsets of the nominal-window shin rectangles.
    shin: Vec<Vec<(i32, i32)>>,
    /// Index of the primitive whose regions serve as nominal-stance windows.
    nominal: usize,
}

impl Stencils {
    pub fn new(lattice: &Lattice, prims: &PrimitiveSet, geom: &StanceGeometry, params: &CostParams, hres: f64) -> Self {
        let res = lattice.spec().resolution;
        let n_prims = prims.len();
        let nominal = nominal_primitive(prims);
        let mut regions = Vec::with_capacity(HEADING_BINS as usize * n_prims * 4);
        let mut shin = Vec::with_capacity(HEADING_BINS as usize * 4);
        for itheta in 0..HEADING_BINS {
            for p in prims.iter() {
                for leg in Leg::ALL {
                    regions.push(reward_cell_offsets(res, &local_region(geom, p, leg, itheta)));
                }
            }
            let theta = itheta as f64 * HEADING_RESOLUTION;
            for leg in Leg::ALL {
                let c = local_region(geom, prims.get(nominal), leg, itheta).center;
                shin.push(height_cell_offsets(hres, &params.shin.rect(c, theta, leg)));
            }
        }
        Stencils { n_prims, regions, shin, nominal }
    }

    #[inline]
    pub fn region(&self, itheta: u16, prim: usize, leg: Leg) -> &[(i32, i32)] {
        &self.regions[(itheta as usize * self.n_prims + prim) * 4 + leg.index()]
    }

    #[inline]
    pub fn window(&self, itheta: u16, leg: Leg) -> &[(i32, i32)] {
        self.region(itheta, self.nominal, leg)
    }

    #[inline]
    pub fn shin(&self, itheta: u16, leg: Leg) -> &[(i32, i32)] {
        &self.shin[itheta as usize * 4 + leg.index()]
    }
}

/// The forward primitive, or the first one if the set has none.
pub fn nominal_primitive(prims: &PrimitiveSet) -> usize {
    prims.index_of(ActionClass::Forward).unwrap_or(0)
}

/// Cached evaluation of one lattice state as a successor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateEval {
    /// `w_t·c_t + w_pc·c_pc + w_po·c_po` at this state.
    pub state_cost: f64,
    /// Mean effective reward over the nominal windows.
    pub local_reward: f64,
    /// Bit `p`: every leg region of primitive `p` holds a steppable cell.
    pub region_mask: u16,
    /// In bounds and collision-free.
    pub valid: bool,
}

impl StateEval {
    pub fn allows(&self, prim: usize) -> bool {
        self.valid && self.region_mask & (1 << prim) != 0
    }
}

/// Individual body cost terms at a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BodyTerms {
    pub terrain: f64,
    pub shin: f64,
    pub orientation: f64,
    pub local_reward: f64,
}

/// Everything needed to cost body transitions on one map snapshot.
#[derive(Debug)]
pub struct CostModel {
    pub lattice: Lattice,
    pub prims: PrimitiveSet,
    pub geom: StanceGeometry,
    pub params: CostParams,
    pub policy: OutOfMapPolicy,
    maps: CostMaps,
    stencils: Stencils,
    footprint: FootprintStencil,
    /// `[itheta][prim]` move part of the cost.
    move_cost: Vec<f64>,
    stride: f64,
    /// Reward assumed where a window has no cell in the map.
    unknown_reward: f64,
    cache: Vec<OnceLock<StateEval>>,
}

impl CostModel {
    pub fn new(
        maps: &TerrainMaps,
        prims: PrimitiveSet,
        geom: StanceGeometry,
        params: CostParams,
    ) -> Result<Self, ConfigError> {
        geom.validate()?;
        prims.validate(&geom)?;
        params.validate()?;
        let cmaps = CostMaps::new(maps);
        let lattice = Lattice::new(*cmaps.spec(), &prims)?;
        let stencils = Stencils::new(&lattice, &prims, &geom, &params, maps.height.spec().resolution);
        let footprint = FootprintStencil::new(&lattice, &geom, maps.obstacle.spec());
        let stride = prims.get(nominal_primitive(&prims)).length().max(1e-9);
        let mut move_cost = Vec::with_capacity(HEADING_BINS as usize * prims.len());
        for itheta in 0..HEADING_BINS {
            for (i, p) in prims.iter().enumerate() {
                let len = lattice.lattice_move(itheta, i).length;
                move_cost.push(params.body.action * p.action_cost + params.step_base_cost * (len / stride).max(1.0));
            }
        }
        let mut cache = Vec::new();
        cache.resize_with(lattice.num_states(), OnceLock::new);
        Ok(CostModel {
            lattice,
            prims,
            geom,
            params,
            policy: OutOfMapPolicy::default(),
            maps: cmaps,
            stencils,
            footprint,
            move_cost,
            stride,
            unknown_reward: maps.params.unknown_reward,
            cache,
        })
    }

    pub fn maps(&self) -> &CostMaps {
        &self.maps
    }

    pub fn stencils(&self) -> &Stencils {
        &self.stencils
    }

    /// Reward assumed for windows with no cell in the map.
    pub fn unknown_reward(&self) -> f64 {
        self.unknown_reward
    }

    /// Length of the nominal (forward) primitive.
    pub fn stride(&self) -> f64 {
        self.stride
    }

    /// Move part of the cost of primitive `prim` taken from heading `itheta`.
    #[inline]
    pub fn move_cost(&self, itheta: u16, prim: usize) -> f64 {
        self.move_cost[itheta as usize * self.prims.len() + prim]
    }

    /// Cached state evaluation by lattice index.
    #[inline]
    pub fn eval_index(&self, idx: u32) -> &StateEval {
        self.cache[idx as usize].get_or_init(|| self.evaluate(&self.lattice.state(idx)))
    }

    /// State evaluation; `None` out of bounds.
    pub fn eval(&self, s: &BodyState) -> Option<&StateEval> {
        self.lattice.index(s).map(|i| self.eval_index(i))
    }

    /// Number of states evaluated so far.
    pub fn evaluated_count(&self) -> usize {
        self.cache.iter().filter(|c| c.get().is_some()).count()
    }

    fn evaluate(&self, s: &BodyState) -> StateEval {
        let valid =
            self.lattice.in_bounds(s) && self.footprint.check(s, &self.maps.obstacle, self.policy) == Collision::Free;
        let terms =
            self.terms_with(s, |leg| self.stencils.window(s.itheta, leg), |leg| self.stencils.shin(s.itheta, leg));
        let mut region_mask = 0u16;
        for prim in 0..self.prims.len() {
            if Leg::ALL.iter().all(|&leg| self.any_steppable(s, self.stencils.region(s.itheta, prim, leg))) {
                region_mask |= 1 << prim;
            }
        }
        StateEval { state_cost: self.combine(&terms), local_reward: terms.local_reward, region_mask, valid }
    }

    fn combine(&self, t: &BodyTerms) -> f64 {
        let w = &self.params.body;
        w.terrain * t.terrain + w.shin * t.shin + w.orientation * t.orientation
    }

    fn any_steppable(&self, s: &BodyState, cells: &[(i32, i32)]) -> bool {
        cells.iter().any(|&(dx, dy)| self.maps.is_steppable((s.ix + dx) as i64, (s.iy + dy) as i64))
    }

    /// Body terms computed from per-leg window and shin cell lists.
    fn terms_with<'a>(
        &'a self,
        s: &BodyState,
        window: impl Fn(Leg) -> &'a [(i32, i32)],
        shin: impl Fn(Leg) -> &'a [(i32, i32)],
    ) -> BodyTerms {
        let res = self.maps.spec.resolution;
        let theta = s.theta();
        let default_reward = self.unknown_reward;
        let n = self.params.best_n;

        let (mut best_sum, mut best_cnt) = (0.0, 0usize);
        let (mut all_sum, mut all_cnt) = (0.0, 0usize);
        let mut supports: Vec<(f64, f64, f64)> = Vec::with_capacity(4);
        let mut shin_sum = 0.0;
        let mut rewards: Vec<f64> = Vec::with_capacity(32);
        for leg in Leg::ALL {
            rewards.clear();
            let (mut px, mut py, mut pz, mut pc) = (0.0, 0.0, 0.0, 0usize);
            for &(dx, dy) in window(leg) {
                let (cx, cy) = ((s.ix + dx) as i64, (s.iy + dy) as i64);
                let Some(r) = self.maps.effective_reward(cx, cy) else { continue };
                rewards.push(r);
                if let Some(z) = self.maps.cell_elevation(cx, cy) {
                    px += dx as f64 * res;
                    py += dy as f64 * res;
                    pz += z;
                    pc += 1;
                }
            }
            all_sum += rewards.iter().sum::<f64>();
            all_cnt += rewards.len();
            rewards.sort_by(|a, b| b.total_cmp(a));
            best_sum += rewards.iter().take(n).sum::<f64>();
            best_cnt += rewards.len().min(n);

            if pc > 0 {
                let k = pc as f64;
                let z_plane = pz / k;
                let local = Point2::new(px / k, py / k).rotated(-theta);
                supports.push((local.x, local.y, z_plane));
                shin_sum += self.shin_from_offsets(s, shin(leg), z_plane);
            }
        }
        let terrain = if best_cnt > 0 { -(best_sum / best_cnt as f64) } else { -default_reward };
        let local_reward = if all_cnt > 0 { all_sum / all_cnt as f64 } else { default_reward };
        let orientation = plane_tilt(&supports).unwrap_or(self.params.max_orientation_cost);
        BodyTerms { terrain: terrain.max(0.0), shin: shin_sum / 4.0, orientation, local_reward }
    }

    fn shin_from_offsets(&self, s: &BodyState, cells: &[(i32, i32)], z_plane: f64) -> f64 {
        let tol = self.params.shin.tolerance;
        let (bx, by) = (2 * s.ix as i64 + 1, 2 * s.iy as i64 + 1);
        let hspec = self.maps.height.spec();
        let (mut sum, mut cnt) = (0.0, 0usize);
        for &(kx, ky) in cells {
            let (hx, hy) = (bx + kx as i64, by + ky as i64);
            if !hspec.in_bounds(hx, hy) {
                continue;
            }
            if let Some(z) = self.maps.height.elevation(hx as usize, hy as usize) {
                sum += (z - z_plane - tol).max(0.0);
                cnt += 1;
            }
        }
        if cnt > 0 {
            sum / cnt as f64
        } else {
            0.0
        }
    }

    /// Body terms at `s`, computed directly from the geometry (no stencil cache).
    pub fn body_terms(&self, s: &BodyState) -> BodyTerms {
        let res = self.maps.spec.resolution;
        let hres = self.maps.height.spec().resolution;
        let nominal = self.prims.get(nominal_primitive(&self.prims));
        let theta = s.theta();
        let windows: Vec<Vec<(i32, i32)>> = Leg::ALL
            .iter()
            .map(|&leg| reward_cell_offsets(res, &local_region(&self.geom, nominal, leg, s.itheta)))
            .collect();
        let shins: Vec<Vec<(i32, i32)>> = Leg::ALL
            .iter()
            .map(|&leg| {
                let c = local_region(&self.geom, nominal, leg, s.itheta).center;
                height_cell_offsets(hres, &self.params.shin.rect(c, theta, leg))
            })
            .collect();
        self.terms_with(s, |leg| windows[leg.index()].as_slice(), |leg| shins[leg.index()].as_slice())
    }

    /// `w_t·c_t + w_pc·c_pc + w_po·c_po` at `s`, computed directly.
    pub fn state_cost(&self, s: &BodyState) -> f64 {
        self.combine(&self.body_terms(s))
    }

    /// Full body cost of taking primitive `prim` from `s`.
    pub fn body_cost(&self, s: &BodyState, prim: usize) -> f64 {
        let next = self.lattice.apply(s, prim);
        self.state_cost(&next) + self.move_cost(s.itheta, prim)
    }

    /// Quantized edge cost through the cache, or `None` when the edge is not in the graph.
    #[inline]
    pub fn edge(&self, s: &BodyState, prim: usize) -> Option<(u32, u64)> {
        let next = self.lattice.apply(s, prim);
        let idx = self.lattice.index(&next)?;
        let e = self.eval_index(idx);
        e.allows(prim).then(|| (idx, cost_to_units(e.state_cost + self.move_cost(s.itheta, prim))))
    }

    /// Whether `s` is in bounds and collision-free.
    pub fn is_valid(&self, s: &BodyState) -> bool {
        self.eval(s).is_some_and(|e| e.valid)
    }

    /// World-frame search regions of primitive `prim` arriving at `s_next`.
    pub fn regions(&self, prim: usize, s_next: &BodyState) -> [RotRect; 4] {
        crate::lattice::footstep_regions_for_action(&self.lattice, &self.geom, self.prims.get(prim), s_next)
    }

    /// Reward cells of one leg region, as absolute reward-grid indices (may be out of map).
    pub fn region_cells(&self, prim: usize, s_next: &BodyState, leg: Leg) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (ix, iy) = (s_next.ix as i64, s_next.iy as i64);
        self.stencils.region(s_next.itheta, prim, leg).iter().map(move |&(dx, dy)| (ix + dx as i64, iy + dy as i64))
    }
}

/// `|roll| + |pitch|` of the least-squares plane through body-frame points
/// `(x, y, z)`; `None` with fewer than three points or a degenerate layout.
pub fn plane_tilt(points: &[(f64, f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let (mx, my, mz) = points.iter().fold((0.0, 0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2));
    let (mx, my, mz) = (mx / n, my / n, mz / n);
    let (mut sxx, mut syy, mut sxy, mut sxz, mut syz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, z) in points {
        let (x, y, z) = (x - mx, y - my, z - mz);
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        sxz += x * z;
        syz += y * z;
    }
    let det = sxx * syy - sxy * sxy;
    let scale = (sxx + syy).powi(2);
    if scale <= 0.0 || det <= 1e-9 * scale {
        return None;
    }
    let gx = (sxz * syy - syz * sxy) / det;
    let gy = (syz * sxx - sxz * sxy) / det;
    Some(gx.atan().abs() + gy.atan().abs())
}

/// Best-`n` terrain cost over explicit per-leg reward lists.
pub fn best_n_terrain_cost(per_leg: &[Vec<f64>], n: usize, default_reward: f64) -> f64 {
    let (mut sum, mut cnt) = (0.0, 0usize);
    for rewards in per_leg {
        let mut r = rewards.clone();
        r.sort_by(|a, b| b.total_cmp(a));
        sum += r.iter().take(n).sum::<f64>();
        cnt += r.len().min(n);
    }
    if cnt == 0 {
        -default_reward
    } else {
        (-(sum / cnt as f64)).max(0.0)
    }
}

/// Terrain cost of the body at `s`: minus the mean of the best `n` rewards per leg
/// over the nominal-stance windows.
pub fn terrain_cost_body(model: &CostModel, s: &BodyState) -> f64 {
    model.body_terms(s).terrain
}

/// Body orientation cost at `s`: `|roll| + |pitch|` of the plane through the
/// four nominal-window mean elevations.
pub fn body_orientation_cost(model: &CostModel, s: &BodyState) -> f64 {
    model.body_terms(s).orientation
}

/// The configured rank of a primitive.
pub fn action_cost(p: &MotionPrimitive) -> f64 {
    p.action_cost
}

/// Shin collision cost for a foothold: mean over height cells in the leg's
/// shin rectangle of the height above `plane_z + tolerance`. Unknown cells are skipped.
pub fn shin_collision_cost(
    hm: &HeightMap,
    foothold: Point2,
    plane_z: f64,
    heading: f64,
    leg: Leg,
    params: &ShinCollisionParams,
) -> f64 {
    let rect = params.rect(foothold, heading, leg);
    let spec = hm.spec();
    let ((x0, y0), (x1, y1)) = spec.covering_range(&rect.bounding_box());
    let (mut sum, mut cnt) = (0.0, 0usize);
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            if !spec.in_bounds(ix, iy) || !contains_tol(&rect, spec.cell_center_signed(ix, iy)) {
                continue;
            }
            if let Some(z) = hm.elevation(ix as usize, iy as usize) {
                sum += (z - plane_z - params.tolerance).max(0.0);
                cnt += 1;
            }
        }
    }
    if cnt > 0 {
        sum / cnt as f64
    } else {
        0.0
    }
}

/// Support cost of the swing triangle: `max(0, r_target - inradius) / r_target`;
/// degenerate triangles cost 1.
pub fn support_triangle_cost(a: Point2, b: Point2, c: Point2, r_target: f64) -> f64 {
    let r = inradius(a, b, c);
    if r <= 1e-12 {
        return 1.0;
    }
    ((r_target - r) / r_target).clamp(0.0, 1.0)
}

/// The two legs that stay on the ground with `leg`'s new foothold while `next` swings.
pub fn support_partners(leg: Leg, next: Leg) -> [Leg; 2] {
    let mut out = [Leg::LF; 2];
    let mut k = 0;
    for l in Leg::ALL {
        if l != leg && l != next {
            out[k] = l;
            k += 1;
        }
    }
    if k == 1 {
        // leg == next: only one swing leg; keep the diagonal partner pair.
        out[1] = out[0];
    }
    out
}

/// Four footholds indexed by [`Leg::index`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stance {
    pub feet: [Point3; 4],
}

impl Stance {
    pub fn foot(&self, leg: Leg) -> Point3 {
        self.feet[leg.index()]
    }

    pub fn with(&self, leg: Leg, f: Point3) -> Stance {
        let mut s = *self;
        s.feet[leg.index()] = f;
        s
    }
}

/// Per-term footstep cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FootstepCostBreakdown {
    pub terrain: f64,
    pub support: f64,
    pub shin: f64,
    pub orientation: f64,
    pub total: f64,
    /// Swing-triangle inradius (m).
    pub inradius: f64,
}

/// Inputs shared by every candidate of one leg step.
#[derive(Clone, Copy, Debug)]
pub struct FootstepContext<'a> {
    pub leg: Leg,
    /// Leg that swings after this one.
    pub next_leg: Leg,
    pub stance: &'a Stance,
    /// Body heading of the action's successor pose.
    pub heading: f64,
    pub weights: &'a FootstepCostWeights,
    pub params: &'a CostParams,
    pub maps: &'a CostMaps,
}

/// Footstep cost of placing `ctx.leg` on the center of reward cell `(ix, iy)`.
pub fn footstep_cost(ctx: &FootstepContext<'_>, ix: i64, iy: i64) -> Option<FootstepCostBreakdown> {
    let maps = ctx.maps;
    let z = maps.cell_elevation(ix, iy)?;
    let p = maps.spec().cell_center_signed(ix, iy);
    let terrain = -maps.effective_reward(ix, iy)?;
    let [a, b] = support_partners(ctx.leg, ctx.next_leg);
    let (fa, fb) = (ctx.stance.foot(a).xy(), ctx.stance.foot(b).xy());
    let r = inradius(p, fa, fb);
    let support = support_triangle_cost(p, fa, fb, ctx.params.r_target);
    let shin = shin_collision_cost(maps.height(), p, z, ctx.heading, ctx.leg, &ctx.params.shin);
    let stance = ctx.stance.with(ctx.leg, Point3::new(p.x, p.y, z));
    let pts: Vec<(f64, f64, f64)> = stance
        .feet
        .iter()
        .map(|f| {
            let l = f.xy().rotated(-ctx.heading);
            (l.x, l.y, f.z)
        })
        .collect();
    let orientation = plane_tilt(&pts).unwrap_or(ctx.params.max_orientation_cost);
    let w = ctx.weights;
    let total = w.terrain * terrain + w.support * support + w.shin * shin + w.orientation * orientation;
    Some(FootstepCostBreakdown { terrain, support, shin, orientation, total, inradius: r })
}
