//! Height, reward and obstacle maps.
//!
//! Three aligned grids share one origin: heights at 2 cm, rewards at 4 cm
//! (each covering 2×2 height cells) and obstacles at 8 cm (4×4 height cells).
//! Rewards lie in `[-1, 0]`, with 0 for ideal flat ground; terrain cost is the
//! negated reward.

mod features;
mod io;

pub use features::{compute_features, FeatureVector};
pub use io::{load_heightmap, parse_grid_text, save_heightmap, write_grid_file, GridText};

use serde::{Deserialize, Serialize};

use crate::error::TerrainError;
use crate::geometry::{Point2, Pose2, Rect, RotRect};
use crate::grid::{Grid, GridSpec};

/// Reward cells are this many height cells wide.
pub const REWARD_FACTOR: usize = 2;
/// Obstacle cells are this many height cells wide.
pub const OBSTACLE_FACTOR: usize = 4;

pub const AREA_OF_INTEREST_LENGTH: f64 = 5.5;
pub const AREA_OF_INTEREST_WIDTH: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureWeights {
    pub height_stddev: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl Default for FeatureWeights {
    fn default() -> Self {
        FeatureWeights { height_stddev: -0.5, slope: -0.3, curvature: -0.2 }
    }
}

impl FeatureWeights {
    pub fn as_array(&self) -> [f64; 3] {
        [self.height_stddev, self.slope, self.curvature]
    }
}

/// Per-feature normalization: each feature is divided by its scale and capped at 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureScales {
    pub height_stddev: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl Default for FeatureScales {
    fn default() -> Self {
        FeatureScales { height_stddev: 0.03, slope: std::f64::consts::FRAC_PI_4, curvature: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerrainParams {
    /// Side of the square regression window (m).
    pub feature_window: f64,
    pub weights: FeatureWeights,
    pub scales: FeatureScales,
    /// Height deviation from the ground plane beyond which a cell is an obstacle (m).
    pub obstacle_threshold: f64,
    /// Reward planners assume for cells that were never observed.
    pub unknown_reward: f64,
}

impl Default for TerrainParams {
    fn default() -> Self {
        TerrainParams {
            feature_window: 0.06,
            weights: FeatureWeights::default(),
            scales: FeatureScales::default(),
            obstacle_threshold: 0.25,
            unknown_reward: -0.2,
        }
    }
}

/// `wᵀr` over normalized features, clamped to `[-1, 0]`.
pub fn compute_reward(f: &FeatureVector, w: &FeatureWeights, scales: &FeatureScales) -> f64 {
    let normalized = [
        (f.height_stddev / scales.height_stddev).min(1.0),
        (f.slope / scales.slope).min(1.0),
        (f.curvature / scales.curvature).min(1.0),
    ];
    let r: f64 = w.as_array().iter().zip(normalized).map(|(w, r)| w * r).sum();
    r.clamp(-1.0, 0.0)
}

/// Elevation grid; unknown cells are stored as NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightMap {
    grid: Grid<f64>,
}

impl HeightMap {
    pub fn unknown(spec: GridSpec) -> Self {
        HeightMap { grid: Grid::filled(spec, f64::NAN) }
    }

    pub fn flat(spec: GridSpec, z: f64) -> Self {
        HeightMap { grid: Grid::filled(spec, z) }
    }

    /// Builds a map from raw values; NaN marks unknown, other non-finite values are rejected.
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self, crate::error::GridError> {
        let mut grid = Grid::from_cells(spec, values)?;
        for v in grid.cells_mut() {
            if v.is_infinite() {
                *v = f64::NAN;
            }
        }
        Ok(HeightMap { grid })
    }

    pub fn spec(&self) -> &GridSpec {
        self.grid.spec()
    }

    pub fn raw(&self) -> &[f64] {
        self.grid.cells()
    }

    #[inline]
    pub fn elevation(&self, ix: usize, iy: usize) -> Option<f64> {
        let z = *self.grid.get(ix, iy);
        (!z.is_nan()).then_some(z)
    }

    pub fn elevation_at(&self, p: Point2) -> Option<f64> {
        self.grid.at(p).copied().filter(|z| !z.is_nan())
    }

    pub fn set_elevation(&mut self, ix: usize, iy: usize, z: f64) {
        debug_assert!(z.is_finite());
        self.grid.set(ix, iy, z);
    }

    pub fn clear(&mut self, ix: usize, iy: usize) {
        self.grid.set(ix, iy, f64::NAN);
    }

    pub fn known_count(&self) -> usize {
        self.grid.cells().iter().filter(|z| !z.is_nan()).count()
    }
}

/// Reward grid at twice the height-map cell size; NaN marks unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardMap {
    grid: Grid<f64>,
}

impl RewardMap {
    /// Full recomputation from a height map.
    pub fn compute(hm: &HeightMap, params: &TerrainParams) -> Self {
        let spec = hm.spec().coarsen(REWARD_FACTOR);
        let mut rm = RewardMap { grid: Grid::filled(spec, f64::NAN) };
        let mut buf = Vec::with_capacity(16);
        for iy in 0..spec.height {
            for ix in 0..spec.width {
                rm.recompute_cell(hm, params, ix, iy, &mut buf);
            }
        }
        rm
    }

    /// A map with every cell set to `reward`.
    pub fn uniform(spec: GridSpec, reward: f64) -> Self {
        RewardMap { grid: Grid::filled(spec, reward) }
    }

    fn recompute_cell(
        &mut self,
        hm: &HeightMap,
        params: &TerrainParams,
        ix: usize,
        iy: usize,
        buf: &mut Vec<(f64, f64, f64)>,
    ) {
        let center = self.grid.spec().cell_center(ix, iy);
        features::window_samples(hm, center, params.feature_window, buf);
        let r = match features::features_from_samples(buf, params.feature_window) {
            Ok(f) => compute_reward(&f, &params.weights, &params.scales),
            Err(_) => f64::NAN,
        };
        self.grid.set(ix, iy, r);
    }

    /// Recomputes every cell whose feature window can see a height cell inside
    /// `dirty`. Returns the number of recomputed cells; zero when `dirty`
    /// misses the map.
    pub fn update_region(&mut self, hm: &HeightMap, dirty: &Rect, params: &TerrainParams) -> usize {
        let spec = *self.grid.spec();
        let margin = 0.5 * params.feature_window + 0.01 * spec.resolution;
        let Some(((x0, y0), (x1, y1))) = spec.index_range(&dirty.dilate(margin)) else {
            return 0;
        };
        let mut buf = Vec::with_capacity(16);
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                self.recompute_cell(hm, params, ix, iy, &mut buf);
            }
        }
        (x1 - x0 + 1) * (y1 - y0 + 1)
    }

    pub fn spec(&self) -> &GridSpec {
        self.grid.spec()
    }

    pub fn raw(&self) -> &[f64] {
        self.grid.cells()
    }

    #[inline]
    pub fn reward(&self, ix: usize, iy: usize) -> Option<f64> {
        let r = *self.grid.get(ix, iy);
        (!r.is_nan()).then_some(r)
    }

    pub fn reward_at(&self, p: Point2) -> Option<f64> {
        self.grid.at(p).copied().filter(|r| !r.is_nan())
    }

    pub fn set_reward(&mut self, ix: usize, iy: usize, r: Option<f64>) {
        self.grid.set(ix, iy, r.unwrap_or(f64::NAN));
    }

    /// Largest known reward, or `None` for an all-unknown map.
    pub fn max_known(&self) -> Option<f64> {
        self.grid.cells().iter().copied().filter(|r| !r.is_nan()).reduce(f64::max)
    }

    pub fn has_unknown(&self) -> bool {
        self.grid.cells().iter().any(|r| r.is_nan())
    }
}

/// Functional form of [`RewardMap::update_region`].
pub fn update_reward_map(rm: &RewardMap, hm: &HeightMap, dirty: &Rect, params: &TerrainParams) -> RewardMap {
    let mut out = rm.clone();
    out.update_region(hm, dirty, params);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObstacleCell {
    Unknown,
    Free,
    /// Sticks out above the ground plane; blocks the body and the feet.
    Protrusion,
    /// Drops below the ground plane; blocks the feet only.
    Hole,
}

impl ObstacleCell {
    pub fn is_occupied(self) -> bool {
        matches!(self, ObstacleCell::Protrusion | ObstacleCell::Hole)
    }

    pub fn blocks_body(self) -> bool {
        self == ObstacleCell::Protrusion
    }
}

/// Least-squares ground plane `z = z0 + gx (x - cx) + gy (y - cy)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundPlane {
    pub center: Point2,
    pub z0: f64,
    pub gx: f64,
    pub gy: f64,
}

impl GroundPlane {
    pub fn height_at(&self, p: Point2) -> f64 {
        self.z0 + self.gx * (p.x - self.center.x) + self.gy * (p.y - self.center.y)
    }

    /// Fits the plane through every known cell. Degenerate layouts fall back to
    /// a level plane at the mean height.
    pub fn fit(hm: &HeightMap) -> Result<Self, TerrainError> {
        let spec = hm.spec();
        let mut pts = Vec::new();
        for iy in 0..spec.height {
            for ix in 0..spec.width {
                if let Some(z) = hm.elevation(ix, iy) {
                    pts.push((spec.cell_center(ix, iy), z));
                }
            }
        }
        if pts.is_empty() {
            return Err(TerrainError::NoGroundEstimate);
        }
        let n = pts.len() as f64;
        let (mut cx, mut cy, mut z0) = (0.0, 0.0, 0.0);
        for (p, z) in &pts {
            cx += p.x;
            cy += p.y;
            z0 += z;
        }
        let center = Point2::new(cx / n, cy / n);
        z0 /= n;
        let (mut sxx, mut syy, mut sxy, mut sxz, mut syz) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (p, z) in &pts {
            let (x, y, z) = (p.x - center.x, p.y - center.y, z - z0);
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            sxz += x * z;
            syz += y * z;
        }
        let det = sxx * syy - sxy * sxy;
        let scale = (sxx + syy).powi(2);
        let (gx, gy) = if scale > 0.0 && det > 1e-12 * scale {
            ((sxz * syy - syz * sxy) / det, (syz * sxx - sxz * sxy) / det)
        } else {
            (0.0, 0.0)
        };
        Ok(GroundPlane { center, z0, gx, gy })
    }
}

/// Obstacle grid at four times the height-map cell size.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstacleMap {
    grid: Grid<ObstacleCell>,
    ground: Option<GroundPlane>,
}

impl ObstacleMap {
    /// All cells free (mostly for tests).
    pub fn free(spec: GridSpec) -> Self {
        ObstacleMap { grid: Grid::filled(spec, ObstacleCell::Free), ground: None }
    }

    pub fn spec(&self) -> &GridSpec {
        self.grid.spec()
    }

    pub fn ground(&self) -> Option<&GroundPlane> {
        self.ground.as_ref()
    }

    #[inline]
    pub fn cell(&self, ix: usize, iy: usize) -> ObstacleCell {
        *self.grid.get(ix, iy)
    }

    pub fn cell_signed(&self, ix: i64, iy: i64) -> Option<ObstacleCell> {
        self.grid.get_signed(ix, iy).copied()
    }

    pub fn cell_at(&self, p: Point2) -> Option<ObstacleCell> {
        self.grid.at(p).copied()
    }

    pub fn set(&mut self, ix: usize, iy: usize, c: ObstacleCell) {
        self.grid.set(ix, iy, c);
    }

    pub fn cells(&self) -> &[ObstacleCell] {
        self.grid.cells()
    }

    pub fn occupied_count(&self) -> usize {
        self.grid.cells().iter().filter(|c| c.is_occupied()).count()
    }
}

/// Flags cells whose height deviates from the global ground plane by more than
/// `reachable_height`. A coarse cell is occupied if any height cell under it is.
pub fn compute_obstacle_map(hm: &HeightMap, reachable_height: f64) -> Result<ObstacleMap, TerrainError> {
    let ground = GroundPlane::fit(hm)?;
    let hspec = *hm.spec();
    let spec = hspec.coarsen(OBSTACLE_FACTOR);
    let mut grid = Grid::filled(spec, ObstacleCell::Unknown);
    for oy in 0..spec.height {
        for ox in 0..spec.width {
            let mut state = ObstacleCell::Unknown;
            let ys = oy * OBSTACLE_FACTOR..((oy + 1) * OBSTACLE_FACTOR).min(hspec.height);
            for iy in ys {
                let xs = ox * OBSTACLE_FACTOR..((ox + 1) * OBSTACLE_FACTOR).min(hspec.width);
                for ix in xs {
                    let Some(z) = hm.elevation(ix, iy) else { continue };
                    let dev = z - ground.height_at(hspec.cell_center(ix, iy));
                    let cell = if dev > reachable_height {
                        ObstacleCell::Protrusion
                    } else if dev < -reachable_height {
                        ObstacleCell::Hole
                    } else {
                        ObstacleCell::Free
                    };
                    state = merge_obstacle(state, cell);
                }
            }
            grid.set(ox, oy, state);
        }
    }
    Ok(ObstacleMap { grid, ground: Some(ground) })
}

fn merge_obstacle(a: ObstacleCell, b: ObstacleCell) -> ObstacleCell {
    use ObstacleCell::*;
    let rank = |c| match c {
        Unknown => 0,
        Free => 1,
        Hole => 2,
        Protrusion => 3,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

/// The 5.5 m × 2.5 m window around the robot, long side along its heading.
pub fn area_of_interest(pose: &Pose2) -> RotRect {
    RotRect::new(pose.position(), 0.5 * AREA_OF_INTEREST_LENGTH, 0.5 * AREA_OF_INTEREST_WIDTH, pose.theta)
}

/// The three maps planners read, kept in sync.
#[derive(Clone, Debug)]
pub struct TerrainMaps {
    pub height: HeightMap,
    pub reward: RewardMap,
    pub obstacle: ObstacleMap,
    pub params: TerrainParams,
}

impl TerrainMaps {
    pub fn build(height: HeightMap, params: TerrainParams) -> Result<Self, TerrainError> {
        let reward = RewardMap::compute(&height, &params);
        let obstacle = compute_obstacle_map(&height, params.obstacle_threshold)?;
        Ok(TerrainMaps { height, reward, obstacle, params })
    }

    /// Recomputes rewards locally around `dirty` and the obstacle map globally
    /// (the ground plane is global). Returns the number of reward cells touched.
    pub fn refresh(&mut self, dirty: &Rect) -> Result<usize, TerrainError> {
        let n = self.reward.update_region(&self.height, dirty, &self.params);
        self.obstacle = compute_obstacle_map(&self.height, self.params.obstacle_threshold)?;
        Ok(n)
    }

    /// Reward a planner should use for a reward cell: occupied ground reads as
    /// the minimum, unknown ground as the optimistic default.
    #[inline]
    pub fn effective_reward(&self, ix: usize, iy: usize) -> f64 {
        if self.is_occupied_reward_cell(ix, iy) {
            return -1.0;
        }
        self.reward.reward(ix, iy).unwrap_or(self.params.unknown_reward)
    }

    /// Whether the obstacle cell containing reward cell `(ix, iy)` is occupied.
    #[inline]
    pub fn is_occupied_reward_cell(&self, ix: usize, iy: usize) -> bool {
        let f = OBSTACLE_FACTOR / REWARD_FACTOR;
        self.obstacle.cell(ix / f, iy / f).is_occupied()
    }

    /// Upper bound on the effective reward anywhere in the map.
    pub fn max_effective_reward(&self) -> f64 {
        let known = self.reward.max_known();
        let unknown = self.reward.has_unknown().then_some(self.params.unknown_reward);
        match (known, unknown) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => 0.0,
        }
        .min(0.0)
    }
}
