//! Seeded benchmark terrains on a 5.6 m × 2.8 m corridor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::geometry::Point2;
use crate::grid::GridSpec;
use crate::terrain::HeightMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    SteppingStones,
    Pallet,
    Stair,
    Gap,
}

impl BenchmarkKind {
    pub const ALL: [BenchmarkKind; 4] =
        [BenchmarkKind::SteppingStones, BenchmarkKind::Pallet, BenchmarkKind::Stair, BenchmarkKind::Gap];

    pub fn label(self) -> &'static str {
        match self {
            BenchmarkKind::SteppingStones => "stepping_stones",
            BenchmarkKind::Pallet => "pallet",
            BenchmarkKind::Stair => "stair",
            BenchmarkKind::Gap => "gap",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        BenchmarkKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

impl std::fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Dimensions of every benchmark; each kind reads only its own fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkParams {
    pub length: f64,
    pub width: f64,
    pub resolution: f64,
    /// Stepping-stone field extent along x.
    pub stones_x: (f64, f64),
    pub stone_size: f64,
    pub stone_pitch: f64,
    /// Floor between stones, below the stone tops.
    pub stone_floor: f64,
    /// Uniform noise amplitude on the stone floor.
    pub stone_floor_noise: f64,
    pub pallet_height: f64,
    pub pallet_x: (f64, f64),
    pub pallet_y: (f64, f64),
    pub stair_start: f64,
    pub stair_run: f64,
    pub stair_rise: f64,
    pub stair_steps: usize,
    pub gap_start: f64,
    pub gap_width: f64,
    pub gap_depth: f64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        BenchmarkParams {
            length: 5.6,
            width: 2.8,
            resolution: 0.02,
            stones_x: (1.6, 2.6),
            stone_size: 0.16,
            stone_pitch: 0.24,
            stone_floor: -0.4,
            stone_floor_noise: 0.03,
            pallet_height: 0.1,
            pallet_x: (1.8, 2.4),
            pallet_y: (0.6, 2.2),
            stair_start: 1.7,
            stair_run: 0.25,
            stair_rise: 0.1,
            stair_steps: 3,
            gap_start: 2.0,
            gap_width: 0.16,
            gap_depth: -0.5,
        }
    }
}

impl BenchmarkParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(format!("{name} must be positive")))
            }
        };
        pos(self.length, "length")?;
        pos(self.width, "width")?;
        pos(self.resolution, "resolution")?;
        pos(self.stone_size, "stone_size")?;
        pos(self.stone_pitch, "stone_pitch")?;
        pos(self.stair_run, "stair_run")?;
        pos(self.gap_width, "gap_width")?;
        if self.stone_size > self.stone_pitch {
            return Err(ConfigError::invalid("stone_size must not exceed stone_pitch"));
        }
        if !(0.0..=0.1).contains(&self.stone_floor_noise) {
            return Err(ConfigError::invalid("stone_floor_noise must lie in [0, 0.1]"));
        }
        if !(self.pallet_height >= 0.0 && self.pallet_height <= 0.3) {
            return Err(ConfigError::invalid("pallet_height must lie in [0, 0.3]"));
        }
        if !(self.stair_rise.abs() <= 0.2 && (1..=10).contains(&self.stair_steps)) {
            return Err(ConfigError::invalid("stair needs 1..=10 steps with |rise| <= 0.2"));
        }
        if !(self.gap_depth < 0.0 && self.gap_depth.is_finite()) {
            return Err(ConfigError::invalid("gap_depth must be negative"));
        }
        for (lo, hi, name) in [
            (self.stones_x.0, self.stones_x.1, "stones_x"),
            (self.pallet_x.0, self.pallet_x.1, "pallet_x"),
            (self.pallet_y.0, self.pallet_y.1, "pallet_y"),
        ] {
            if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
                return Err(ConfigError::invalid(format!("{name} must be an increasing interval")));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> GridSpec {
        let w = (self.length / self.resolution).round() as usize;
        let h = (self.width / self.resolution).round() as usize;
        GridSpec::new(Point2::new(0.0, 0.0), self.resolution, w, h).expect("validated dimensions")
    }
}

/// Deterministic height map for `(kind, params, seed)`.
pub fn generate_benchmark_terrain(
    kind: BenchmarkKind,
    params: &BenchmarkParams,
    seed: u64,
) -> Result<HeightMap, ConfigError> {
    params.validate()?;
    let spec = params.spec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(spec.len());
    for iy in 0..spec.height {
        for ix in 0..spec.width {
            let c = spec.cell_center(ix, iy);
            let z = match kind {
                BenchmarkKind::SteppingStones => stepping_stone_height(params, c, &mut rng),
                BenchmarkKind::Pallet => {
                    let inside = (params.pallet_x.0..params.pallet_x.1).contains(&c.x)
                        && (params.pallet_y.0..params.pallet_y.1).contains(&c.y);
                    if inside {
                        params.pallet_height
                    } else {
                        0.0
                    }
                }
                BenchmarkKind::Stair => {
                    let k = ((c.x - params.stair_start) / params.stair_run).floor() + 1.0;
                    k.clamp(0.0, params.stair_steps as f64) * params.stair_rise
                }
                BenchmarkKind::Gap => {
                    if (params.gap_start..params.gap_start + params.gap_width).contains(&c.x) {
                        params.gap_depth
                    } else {
                        0.0
                    }
                }
            };
            values.push(z);
        }
    }
    Ok(HeightMap::from_values(spec, values).expect("sized to spec"))
}

fn stepping_stone_height(p: &BenchmarkParams, c: Point2, rng: &mut ChaCha8Rng) -> f64 {
    // Draw for every cell so the noise pattern does not depend on the stone layout.
    let noise = rng.gen_range(-1.0..=1.0) * p.stone_floor_noise;
    if !(p.stones_x.0..p.stones_x.1).contains(&c.x) {
        return 0.0;
    }
    // Stones start on the pitch lattice so that, with the default sizes, they
    // align with obstacle cells and the gaps read as holes.
    let u = (c.x - p.stones_x.0).rem_euclid(p.stone_pitch);
    let v = c.y.rem_euclid(p.stone_pitch);
    let on_stone = u < p.stone_size && v < p.stone_size;
    if on_stone {
        0.0
    } else {
        p.stone_floor + noise
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stair_tops_out_at_steps_times_rise() {
        let hm = generate_benchmark_terrain(BenchmarkKind::Stair, &BenchmarkParams::default(), 0).unwrap();
        let max = hm.raw().iter().copied().fold(f64::MIN, f64::max);
        assert!((max - 0.3).abs() < 1e-12);
    }

    #[test]
    fn gap_strip_has_requested_width() {
        let p = BenchmarkParams { gap_width: 0.3, ..BenchmarkParams::default() };
        let hm = generate_benchmark_terrain(BenchmarkKind::Gap, &p, 0).unwrap();
        let row: Vec<f64> = (0..hm.spec().width).map(|ix| hm.elevation(ix, 10).unwrap()).collect();
        let deep = row.iter().filter(|&&z| z == -0.5).count();
        assert_eq!(deep, 15);
    }

    #[test]
    fn same_seed_same_map() {
        let p = BenchmarkParams::default();
        for kind in BenchmarkKind::ALL {
            let a = generate_benchmark_terrain(kind, &p, 3).unwrap();
            let b = generate_benchmark_terrain(kind, &p, 3).unwrap();
            assert_eq!(a.raw(), b.raw());
        }
        let a = generate_benchmark_terrain(BenchmarkKind::SteppingStones, &p, 3).unwrap();
        let b = generate_benchmark_terrain(BenchmarkKind::SteppingStones, &p, 4).unwrap();
        assert_ne!(a.raw(), b.raw());
    }

    #[test]
    fn invalid_params_rejected() {
        let p = BenchmarkParams { gap_depth: 0.1, ..BenchmarkParams::default() };
        assert!(generate_benchmark_terrain(BenchmarkKind::Gap, &p, 0).is_err());
    }
}
