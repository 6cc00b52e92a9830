//! Body-state lattice, motion primitives, footstep search regions and body
//! collision checking.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::geometry::{wrap_angle, Point2, Pose2, RotRect};
use crate::grid::GridSpec;
use crate::terrain::ObstacleMap;

pub const HEADING_BINS: u16 = 200;
/// 1.8°.
pub const HEADING_RESOLUTION: f64 = TAU / HEADING_BINS as f64;

/// Lattice pose: reward-grid cell indices and a heading bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BodyState {
    pub ix: i32,
    pub iy: i32,
    pub itheta: u16,
}

impl BodyState {
    pub fn new(ix: i32, iy: i32, itheta: i32) -> Self {
        BodyState { ix, iy, itheta: itheta.rem_euclid(HEADING_BINS as i32) as u16 }
    }

    pub fn theta(&self) -> f64 {
        self.itheta as f64 * HEADING_RESOLUTION
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Leg {
    LF,
    RF,
    LH,
    RH,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::LF, Leg::RF, Leg::LH, Leg::RH];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_front(self) -> bool {
        matches!(self, Leg::LF | Leg::RF)
    }

    pub fn is_left(self) -> bool {
        matches!(self, Leg::LF | Leg::LH)
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Leg::LF => "LF",
            Leg::RF => "RF",
            Leg::LH => "LH",
            Leg::RH => "RH",
        };
        f.write_str(s)
    }
}

/// Nominal stance and body size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StanceGeometry {
    /// Longitudinal hip offset `a` (m).
    pub half_length: f64,
    /// Lateral hip offset `b` (m).
    pub half_width: f64,
    pub reach_radius: f64,
    pub footprint_length: f64,
    pub footprint_width: f64,
}

impl Default for StanceGeometry {
    fn default() -> Self {
        StanceGeometry {
            half_length: 0.42,
            half_width: 0.33,
            reach_radius: 0.20,
            footprint_length: 1.0,
            footprint_width: 0.6,
        }
    }
}

impl StanceGeometry {
    pub fn nominal_offset(&self, leg: Leg) -> Point2 {
        let x = if leg.is_front() { self.half_length } else { -self.half_length };
        let y = if leg.is_left() { self.half_width } else { -self.half_width };
        Point2::new(x, y)
    }

    pub fn footprint(&self, pose: &Pose2) -> RotRect {
        RotRect::new(pose.position(), 0.5 * self.footprint_length, 0.5 * self.footprint_width, pose.theta)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive =
            [self.half_length, self.half_width, self.reach_radius, self.footprint_length, self.footprint_width];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ConfigError::invalid("stance geometry values must be positive"));
        }
        // Feet sit slightly outside the trunk laterally, so only the length is checked.
        if self.footprint_length < 2.0 * self.half_length {
            return Err(ConfigError::invalid("body footprint must span the hip offsets lengthwise"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionClass {
    Forward,
    Backward,
    LateralLeft,
    LateralRight,
    DiagonalForwardLeft,
    DiagonalForwardRight,
    DiagonalBackwardLeft,
    DiagonalBackwardRight,
    YawLeft,
    YawRight,
}

impl ActionClass {
    pub const ALL: [ActionClass; 10] = [
        ActionClass::Forward,
        ActionClass::Backward,
        ActionClass::LateralLeft,
        ActionClass::LateralRight,
        ActionClass::DiagonalForwardLeft,
        ActionClass::DiagonalForwardRight,
        ActionClass::DiagonalBackwardLeft,
        ActionClass::DiagonalBackwardRight,
        ActionClass::YawLeft,
        ActionClass::YawRight,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ActionClass::Forward => "forward",
            ActionClass::Backward => "backward",
            ActionClass::LateralLeft => "lateral_left",
            ActionClass::LateralRight => "lateral_right",
            ActionClass::DiagonalForwardLeft => "diagonal_forward_left",
            ActionClass::DiagonalForwardRight => "diagonal_forward_right",
            ActionClass::DiagonalBackwardLeft => "diagonal_backward_left",
            ActionClass::DiagonalBackwardRight => "diagonal_backward_right",
            ActionClass::YawLeft => "yaw_left",
            ActionClass::YawRight => "yaw_right",
        }
    }

    /// Hind before front on each side when moving forward, front before hind
    /// backward; sideways and turning moves step the trailing side first.
    pub fn default_leg_order(self) -> [Leg; 4] {
        use ActionClass::*;
        use Leg::*;
        match self {
            Forward | DiagonalForwardLeft | DiagonalForwardRight => [LH, LF, RH, RF],
            Backward | DiagonalBackwardLeft | DiagonalBackwardRight => [LF, LH, RF, RH],
            LateralLeft | YawLeft => [RH, RF, LH, LF],
            LateralRight | YawRight => [LH, LF, RH, RF],
        }
    }

    /// Default rank: forward is free, diagonal beats lateral.
    pub fn default_action_cost(self) -> f64 {
        use ActionClass::*;
        match self {
            Forward => 0.0,
            DiagonalForwardLeft | DiagonalForwardRight => 0.2,
            YawLeft | YawRight => 0.3,
            Backward => 0.5,
            DiagonalBackwardLeft | DiagonalBackwardRight => 0.6,
            LateralLeft | LateralRight => 0.8,
        }
    }
}

/// Per-leg search rectangle in the successor body frame, placed relative to
/// the leg's nominal offset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootholdRegion {
    pub leg: Leg,
    pub shift_x: f64,
    pub shift_y: f64,
    pub size_x: f64,
    pub size_y: f64,
}

impl FootholdRegion {
    /// Region center in the body frame.
    pub fn center(&self, geom: &StanceGeometry) -> Point2 {
        geom.nominal_offset(self.leg) + Point2::new(self.shift_x, self.shift_y)
    }

    pub fn world_rect(&self, geom: &StanceGeometry, pose: &Pose2) -> RotRect {
        RotRect::new(pose.transform(self.center(geom)), 0.5 * self.size_x, 0.5 * self.size_y, pose.theta)
    }

    /// Farthest distance from the nominal offset to any point of the region.
    pub fn max_reach(&self) -> f64 {
        let (hx, hy) = (0.5 * self.size_x, 0.5 * self.size_y);
        (self.shift_x.abs() + hx).hypot(self.shift_y.abs() + hy)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionPrimitive {
    pub label: String,
    pub class: ActionClass,
    /// Body-frame displacement (m).
    pub dx: f64,
    pub dy: f64,
    /// Heading change (rad).
    pub dtheta: f64,
    pub action_cost: f64,
    pub leg_order: [Leg; 4],
    /// Indexed by [`Leg::index`].
    pub regions: [FootholdRegion; 4],
}

impl MotionPrimitive {
    pub fn region(&self, leg: Leg) -> &FootholdRegion {
        &self.regions[leg.index()]
    }

    pub fn length(&self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn heading_bins(&self) -> i32 {
        (self.dtheta / HEADING_RESOLUTION).round() as i32
    }
}

/// Shapes of the default search regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegionParams {
    pub size: f64,
    /// Regions move by this fraction of the body translation.
    pub translation_gain: f64,
    /// Tangential region shift for turning moves (m).
    pub yaw_shift: f64,
}

impl Default for RegionParams {
    fn default() -> Self {
        RegionParams { size: 0.16, translation_gain: 0.6, yaw_shift: 0.06 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveSet {
    #[serde(rename = "primitive")]
    pub primitives: Vec<MotionPrimitive>,
}

impl PrimitiveSet {
    /// The ten default moves: ±0.08 m forward/lateral, four 0.08 m diagonals and ±1.8° turns.
    pub fn default_set(geom: &StanceGeometry, rp: &RegionParams) -> Self {
        let step = 0.08;
        let primitives = ActionClass::ALL
            .iter()
            .map(|&class| {
                use ActionClass::*;
                let (dx, dy, dtheta) = match class {
                    Forward => (step, 0.0, 0.0),
                    Backward => (-step, 0.0, 0.0),
                    LateralLeft => (0.0, step, 0.0),
                    LateralRight => (0.0, -step, 0.0),
                    DiagonalForwardLeft => (step, step, 0.0),
                    DiagonalForwardRight => (step, -step, 0.0),
                    DiagonalBackwardLeft => (-step, step, 0.0),
                    DiagonalBackwardRight => (-step, -step, 0.0),
                    YawLeft => (0.0, 0.0, HEADING_RESOLUTION),
                    YawRight => (0.0, 0.0, -HEADING_RESOLUTION),
                };
                let regions = Leg::ALL.map(|leg| {
                    let shift = if dtheta != 0.0 {
                        let o = geom.nominal_offset(leg);
                        let tangent = Point2::new(-o.y, o.x) * (1.0 / o.norm());
                        tangent * (rp.yaw_shift * dtheta.signum())
                    } else {
                        Point2::new(dx, dy) * rp.translation_gain
                    };
                    FootholdRegion { leg, shift_x: shift.x, shift_y: shift.y, size_x: rp.size, size_y: rp.size }
                });
                MotionPrimitive {
                    label: class.label().to_string(),
                    class,
                    dx,
                    dy,
                    dtheta,
                    action_cost: class.default_action_cost(),
                    leg_order: class.default_leg_order(),
                    regions,
                }
            })
            .collect();
        PrimitiveSet { primitives }
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn get(&self, i: usize) -> &MotionPrimitive {
        &self.primitives[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &MotionPrimitive> {
        self.primitives.iter()
    }

    pub fn index_of(&self, class: ActionClass) -> Option<usize> {
        self.primitives.iter().position(|p| p.class == class)
    }

    pub fn validate(&self, geom: &StanceGeometry) -> Result<(), ConfigError> {
        if self.primitives.is_empty() || self.primitives.len() > 16 {
            return Err(ConfigError::invalid("primitive set must hold between 1 and 16 primitives"));
        }
        for p in &self.primitives {
            let mut seen = [false; 4];
            for leg in p.leg_order {
                seen[leg.index()] = true;
            }
            if seen.contains(&false) {
                return Err(ConfigError::invalid(format!(
                    "{}: leg_order is not a permutation of the four legs",
                    p.label
                )));
            }
            for (i, r) in p.regions.iter().enumerate() {
                if r.leg.index() != i {
                    return Err(ConfigError::invalid(format!("{}: regions must be listed LF, RF, LH, RH", p.label)));
                }
                if !(r.size_x > 0.0 && r.size_y > 0.0) {
                    return Err(ConfigError::invalid(format!("{}: {} region has no area", p.label, r.leg)));
                }
                if r.max_reach() > geom.reach_radius + 1e-12 {
                    return Err(ConfigError::invalid(format!(
                        "{}: {} region leaves the reach disc ({:.3} > {:.3})",
                        p.label,
                        r.leg,
                        r.max_reach(),
                        geom.reach_radius
                    )));
                }
            }
            if !(p.action_cost.is_finite() && p.action_cost >= 0.0) {
                return Err(ConfigError::invalid(format!("{}: action cost must be non-negative", p.label)));
            }
        }
        Ok(())
    }
}

/// Precomputed lattice displacement of one primitive at one heading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeMove {
    pub dix: i32,
    pub diy: i32,
    pub dtheta: i32,
    /// Planar length of the discretized displacement (m).
    pub length: f64,
}

/// The discretized body-state space over a reward grid.
#[derive(Clone, Debug)]
pub struct Lattice {
    spec: GridSpec,
    n_prims: usize,
    moves: Vec<LatticeMove>,
}

impl Lattice {
    pub fn new(spec: GridSpec, prims: &PrimitiveSet) -> Result<Self, ConfigError> {
        let n_prims = prims.len();
        let mut moves = Vec::with_capacity(HEADING_BINS as usize * n_prims);
        for itheta in 0..HEADING_BINS {
            for p in prims.iter() {
                let m = discretized_move(spec.resolution, itheta, p);
                if m.dix == 0 && m.diy == 0 && m.dtheta.rem_euclid(HEADING_BINS as i32) == 0 {
                    return Err(ConfigError::invalid(format!(
                        "primitive {} does not leave its lattice cell at heading bin {itheta}",
                        p.label
                    )));
                }
                moves.push(m);
            }
        }
        Ok(Lattice { spec, n_prims, moves })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn num_primitives(&self) -> usize {
        self.n_prims
    }

    pub fn num_states(&self) -> usize {
        self.spec.len() * HEADING_BINS as usize
    }

    pub fn in_bounds(&self, s: &BodyState) -> bool {
        self.spec.in_bounds(s.ix as i64, s.iy as i64)
    }

    #[inline]
    pub fn index(&self, s: &BodyState) -> Option<u32> {
        self.in_bounds(s).then(|| {
            ((s.iy as usize * self.spec.width + s.ix as usize) * HEADING_BINS as usize + s.itheta as usize) as u32
        })
    }

    #[inline]
    pub fn state(&self, idx: u32) -> BodyState {
        let idx = idx as usize;
        let itheta = (idx % HEADING_BINS as usize) as u16;
        let cell = idx / HEADING_BINS as usize;
        BodyState { ix: (cell % self.spec.width) as i32, iy: (cell / self.spec.width) as i32, itheta }
    }

    pub fn pose(&self, s: &BodyState) -> Pose2 {
        let c = self.spec.cell_center_signed(s.ix as i64, s.iy as i64);
        Pose2::new(c.x, c.y, s.theta())
    }

    /// Nearest lattice state to a continuous pose.
    pub fn discretize(&self, pose: &Pose2) -> BodyState {
        let fx = (pose.x - self.spec.origin.x) / self.spec.resolution - 0.5;
        let fy = (pose.y - self.spec.origin.y) / self.spec.resolution - 0.5;
        let it = (wrap_angle(pose.theta) / HEADING_RESOLUTION).round() as i32;
        BodyState::new(fx.round() as i32, fy.round() as i32, it)
    }

    #[inline]
    pub fn lattice_move(&self, itheta: u16, prim: usize) -> &LatticeMove {
        &self.moves[itheta as usize * self.n_prims + prim]
    }

    /// Successor of `s` under primitive `prim` (no bounds or collision check).
    #[inline]
    pub fn apply(&self, s: &BodyState, prim: usize) -> BodyState {
        let m = self.lattice_move(s.itheta, prim);
        BodyState::new(s.ix + m.dix, s.iy + m.diy, s.itheta as i32 + m.dtheta)
    }

    /// State that reaches `t` through primitive `prim`.
    #[inline]
    pub fn predecessor(&self, t: &BodyState, prim: usize, prims_dtheta_bins: i32) -> BodyState {
        let src_theta = (t.itheta as i32 - prims_dtheta_bins).rem_euclid(HEADING_BINS as i32) as u16;
        let m = self.lattice_move(src_theta, prim);
        debug_assert_eq!(m.dtheta, prims_dtheta_bins);
        BodyState { ix: t.ix - m.dix, iy: t.iy - m.diy, itheta: src_theta }
    }

    /// Longest planar displacement of any move at any heading.
    pub fn max_move_length(&self) -> f64 {
        self.moves.iter().map(|m| m.length).fold(0.0, f64::max)
    }
}

fn discretized_move(resolution: f64, itheta: u16, p: &MotionPrimitive) -> LatticeMove {
    let theta = itheta as f64 * HEADING_RESOLUTION;
    let d = Point2::new(p.dx, p.dy).rotated(theta);
    let dix = (d.x / resolution).round() as i32;
    let diy = (d.y / resolution).round() as i32;
    LatticeMove { dix, diy, dtheta: p.heading_bins(), length: (dix as f64 * resolution).hypot(diy as f64 * resolution) }
}

/// Applies a primitive to a lattice state: the body-frame displacement is
/// rotated into the world by the current heading, then rounded to the lattice.
pub fn apply_primitive(lattice: &Lattice, s: &BodyState, p: &MotionPrimitive) -> BodyState {
    let m = discretized_move(lattice.spec().resolution, s.itheta, p);
    BodyState::new(s.ix + m.dix, s.iy + m.diy, s.itheta as i32 + m.dtheta)
}

/// World-frame search rectangles of the four legs (LF, RF, LH, RH) after
/// executing `p` and arriving at `s_next`.
pub fn footstep_regions_for_action(
    lattice: &Lattice,
    geom: &StanceGeometry,
    p: &MotionPrimitive,
    s_next: &BodyState,
) -> [RotRect; 4] {
    let pose = lattice.pose(s_next);
    p.regions.map(|r| r.world_rect(geom, &pose))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutOfMapPolicy {
    #[default]
    Colliding,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Collision {
    Free,
    Colliding,
}

/// Checks the body footprint at `s` against body-blocking obstacle cells.
/// Footprint cells outside the map follow `policy`; unknown cells are free.
pub fn body_collision_check(
    lattice: &Lattice,
    s: &BodyState,
    om: &ObstacleMap,
    geom: &StanceGeometry,
    policy: OutOfMapPolicy,
) -> Collision {
    let rect = geom.footprint(&lattice.pose(s));
    let ospec = om.spec();
    let ((x0, y0), (x1, y1)) = ospec.covering_range(&rect.bounding_box());
    for oy in y0..=y1 {
        for ox in x0..=x1 {
            if !rect.overlaps_cell(&ospec.cell_rect_signed(ox, oy)) {
                continue;
            }
            match om.cell_signed(ox, oy) {
                Some(c) if c.blocks_body() => return Collision::Colliding,
                Some(_) => {}
                None if policy == OutOfMapPolicy::Colliding => return Collision::Colliding,
                None => {}
            }
        }
    }
    Collision::Free
}

/// Obstacle-cell offsets covered by the footprint, per heading and per
/// sub-cell parity of the body position. Offsets are relative to the obstacle
/// cell holding the body center.
#[derive(Clone, Debug)]
pub struct FootprintStencil {
    ratio: i32,
    cells: Vec<Vec<(i32, i32)>>,
}

impl FootprintStencil {
    pub fn new(lattice: &Lattice, geom: &StanceGeometry, obstacle_spec: &GridSpec) -> Self {
        let ratio = (obstacle_spec.resolution / lattice.spec().resolution).round().max(1.0) as i32;
        let mut cells = Vec::with_capacity((ratio * ratio) as usize * HEADING_BINS as usize);
        for itheta in 0..HEADING_BINS {
            for py in 0..ratio {
                for px in 0..ratio {
                    let s = BodyState { ix: px, iy: py, itheta };
                    let rect = geom.footprint(&lattice.pose(&s));
                    let ((x0, y0), (x1, y1)) = obstacle_spec.covering_range(&rect.bounding_box());
                    let mut list = Vec::new();
                    for oy in y0..=y1 {
                        for ox in x0..=x1 {
                            if rect.overlaps_cell(&obstacle_spec.cell_rect_signed(ox, oy)) {
                                list.push((ox as i32, oy as i32));
                            }
                        }
                    }
                    cells.push(list);
                }
            }
        }
        FootprintStencil { ratio, cells }
    }

    /// Same answer as [`body_collision_check`] for in-bounds lattice states.
    pub fn check(&self, s: &BodyState, om: &ObstacleMap, policy: OutOfMapPolicy) -> Collision {
        let r = self.ratio;
        let (bx, px) = (s.ix.div_euclid(r), s.ix.rem_euclid(r));
        let (by, py) = (s.iy.div_euclid(r), s.iy.rem_euclid(r));
        let list = &self.cells[(s.itheta as usize * (r * r) as usize) + (py * r + px) as usize];
        for &(dx, dy) in list {
            match om.cell_signed((bx + dx) as i64, (by + dy) as i64) {
                Some(c) if c.blocks_body() => return Collision::Colliding,
                Some(_) => {}
                None if policy == OutOfMapPolicy::Colliding => return Collision::Colliding,
                None => {}
            }
        }
        Collision::Free
    }
}
