#![allow(dead_code)]

use legplan::geometry::{Point2, Rect, RotRect};
use legplan::lattice::RegionParams;
use legplan::{CostModel, CostParams, GridSpec, HeightMap, PrimitiveSet, StanceGeometry, TerrainMaps, TerrainParams};

/// Height map of `nx` × `ny` cells at 0.02 m filled by `z(x, y)`.
pub fn height_map(nx: usize, ny: usize, z: impl Fn(f64, f64) -> f64) -> HeightMap {
    let spec = GridSpec::new(Point2::new(0.0, 0.0), 0.02, nx, ny).unwrap();
    let mut values = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let c = spec.cell_center(ix, iy);
            values.push(z(c.x, c.y));
        }
    }
    HeightMap::from_values(spec, values).unwrap()
}

pub fn maps(hm: HeightMap) -> TerrainMaps {
    TerrainMaps::build(hm, TerrainParams::default()).unwrap()
}

pub fn flat_maps(nx: usize, ny: usize) -> TerrainMaps {
    maps(height_map(nx, ny, |_, _| 0.0))
}

pub fn model(maps: &TerrainMaps) -> CostModel {
    let geom = StanceGeometry::default();
    let prims = PrimitiveSet::default_set(&geom, &RegionParams::default());
    CostModel::new(maps, prims, geom, CostParams::default()).unwrap()
}

/// Area of the intersection of a rotated rectangle with an axis-aligned box,
/// by clipping the rectangle polygon against the four box half-planes.
pub fn overlap_area(rect: &RotRect, cell: &Rect) -> f64 {
    let mut poly: Vec<Point2> = rect.corners().to_vec();
    let planes: [(Point2, f64); 4] = [
        (Point2::new(1.0, 0.0), cell.min.x),
        (Point2::new(-1.0, 0.0), -cell.max.x),
        (Point2::new(0.0, 1.0), cell.min.y),
        (Point2::new(0.0, -1.0), -cell.max.y),
    ];
    for (n, d) in planes {
        let inside = |p: Point2| n.dot(p) >= d;
        let mut out = Vec::new();
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            if inside(a) {
                out.push(a);
            }
            if inside(a) != inside(b) {
                let t = (d - n.dot(a)) / (n.dot(b) - n.dot(a));
                out.push(a + (b - a) * t);
            }
        }
        poly = out;
        if poly.is_empty() {
            return 0.0;
        }
    }
    let mut twice = 0.0;
    for i in 0..poly.len() {
        twice += poly[i].cross(poly[(i + 1) % poly.len()]);
    }
    0.5 * twice.abs()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Applies `steps` random rectangular height edits to a random map, updating
/// rewards only inside each dirty rectangle, and returns the number of reward
/// cells that differ from a full recomputation after each step.
pub fn incremental_mismatches(seed: u64, steps: usize) -> usize {
    use legplan::RewardMap;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (nx, ny) = (rng.gen_range(20..60), rng.gen_range(20..60));
    let spec = GridSpec::new(Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), 0.02, nx, ny).unwrap();
    let mut values = Vec::with_capacity(nx * ny);
    for _ in 0..nx * ny {
        values.push(if rng.gen_bool(0.1) { f64::NAN } else { rng.gen_range(-0.05..0.05) });
    }
    let mut hm = HeightMap::from_values(spec, values).unwrap();
    let params = TerrainParams::default();
    let mut rm = RewardMap::compute(&hm, &params);
    let mut mismatches = 0;
    for _ in 0..steps {
        let (x0, y0) = (rng.gen_range(0..nx), rng.gen_range(0..ny));
        let (x1, y1) = ((x0 + rng.gen_range(1..8)).min(nx), (y0 + rng.gen_range(1..8)).min(ny));
        let dz = rng.gen_range(-0.2..0.2);
        let unknown = rng.gen_bool(0.2);
        for iy in y0..y1 {
            for ix in x0..x1 {
                match (unknown, hm.elevation(ix, iy)) {
                    (true, _) => hm.clear(ix, iy),
                    (false, Some(z)) => hm.set_elevation(ix, iy, z + dz),
                    (false, None) => hm.set_elevation(ix, iy, dz),
                }
            }
        }
        let dirty = spec.cell_rect(x0, y0).union(&spec.cell_rect(x1 - 1, y1 - 1));
        rm.update_region(&hm, &dirty, &params);
        let full = RewardMap::compute(&hm, &params);
        mismatches += rm
            .raw()
            .iter()
            .zip(full.raw())
            .filter(|(a, b)| a.to_bits() != b.to_bits() && !(a.is_nan() && b.is_nan()))
            .count();
    }
    mismatches
}

/// Every rule a footstep plan must satisfy: footholds inside their action's
/// region and within reach, body poses collision-free, non-degenerate
/// support, and the primitive's leg order. Returns one message per violation.
pub fn feasibility_violations(
    model: &CostModel,
    plan: &legplan::BodyActionPlan,
    steps: &legplan::FootstepPlan,
) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(e) = &steps.infeasible {
        out.push(format!("infeasible: {e}"));
    }
    if steps.footsteps.len() != 4 * steps.actions_covered {
        out.push(format!("{} footsteps for {} actions", steps.footsteps.len(), steps.actions_covered));
        return out;
    }
    for s in &plan.states {
        if !model.is_valid(s) {
            out.push(format!("body pose {s:?} collides"));
        }
    }
    for i in 0..steps.actions_covered {
        let prim = model.prims.get(plan.actions[i]);
        let pose = model.lattice.pose(&plan.states[i + 1]);
        let action = steps.action_steps(i);
        let legs: Vec<_> = action.iter().map(|f| f.leg).collect();
        if legs != prim.leg_order.to_vec() {
            out.push(format!("action {i}: leg order {legs:?}"));
        }
        for f in action {
            if f.action_index != i {
                out.push(format!("action {i}: foothold tagged {}", f.action_index));
            }
            if let Err(e) = legplan::footstep::check_containment(model, plan, f) {
                out.push(format!("action {i}: {e}"));
            }
            let nominal = pose.transform(model.geom.nominal_offset(f.leg));
            if f.position.xy().distance(nominal) > model.geom.reach_radius + 1e-9 {
                out.push(format!("action {i}: {} out of reach", f.leg));
            }
            if f.cost.inradius <= 1e-3 {
                out.push(format!("action {i}: degenerate support for {}", f.leg));
            }
        }
    }
    out
}
