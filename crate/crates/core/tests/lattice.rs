mod common;

use common::{flat_maps, height_map, maps, model, overlap_area};
use legplan::geometry::{Point2, Rect};
use legplan::lattice::{
    apply_primitive, body_collision_check, ActionClass, Collision, OutOfMapPolicy, HEADING_BINS, HEADING_RESOLUTION,
};
use legplan::search::{Graph, LatticeGraph};
use legplan::terrain::ObstacleCell;
use legplan::{BodyState, Lattice, PrimitiveSet, StanceGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lattice() -> (Lattice, PrimitiveSet) {
    let geom = StanceGeometry::default();
    let prims = PrimitiveSet::default_set(&geom, &Default::default());
    let spec = legplan::GridSpec::new(Point2::new(0.0, 0.0), 0.04, 100, 60).unwrap();
    (Lattice::new(spec, &prims).unwrap(), prims)
}

#[test]
fn opposite_primitives_undo_each_other_at_every_heading() {
    use ActionClass::*;
    let (lat, prims) = lattice();
    let pairs = [
        (Forward, Backward),
        (LateralLeft, LateralRight),
        (DiagonalForwardLeft, DiagonalBackwardRight),
        (DiagonalForwardRight, DiagonalBackwardLeft),
    ];
    for itheta in 0..HEADING_BINS as i32 {
        let s = BodyState::new(50, 30, itheta);
        for (a, b) in pairs {
            let (ia, ib) = (prims.index_of(a).unwrap(), prims.index_of(b).unwrap());
            assert_eq!(lat.apply(&lat.apply(&s, ia), ib), s, "{a:?} then {b:?} at bin {itheta}");
            assert_eq!(lat.apply(&lat.apply(&s, ib), ia), s);
        }
        let (yl, yr) = (prims.index_of(YawLeft).unwrap(), prims.index_of(YawRight).unwrap());
        let turned = lat.apply(&s, yl);
        assert_eq!((turned.ix, turned.iy), (s.ix, s.iy));
        assert_eq!(lat.apply(&turned, yr), s);
    }
}

#[test]
fn every_heading_has_nonzero_moves_close_to_the_continuous_displacement() {
    let (lat, prims) = lattice();
    let res = lat.spec().resolution;
    for itheta in 0..HEADING_BINS {
        let theta = itheta as f64 * HEADING_RESOLUTION;
        for (i, p) in prims.iter().enumerate() {
            let m = lat.lattice_move(itheta, i);
            assert!(m.dix != 0 || m.diy != 0 || m.dtheta != 0, "{} stalls at bin {itheta}", p.label);
            let d = Point2::new(p.dx, p.dy).rotated(theta);
            let err = Point2::new(m.dix as f64 * res - d.x, m.diy as f64 * res - d.y).norm();
            assert!(err <= 0.5 * res * std::f64::consts::SQRT_2 + 1e-12, "{} at bin {itheta}: error {err}", p.label);
            assert_eq!(
                apply_primitive(&lat, &BodyState::new(10, 10, itheta as i32), p),
                lat.apply(&BodyState::new(10, 10, itheta as i32), i)
            );
        }
    }
}

#[test]
fn successors_stay_local() {
    let (lat, prims) = lattice();
    let res = lat.spec().resolution;
    let max_len = prims.iter().map(|p| p.length()).fold(0.0, f64::max);
    let reach = ((max_len + 0.5 * res * std::f64::consts::SQRT_2) / res).ceil() as i32;
    for itheta in 0..HEADING_BINS as i32 {
        let s = BodyState::new(50, 30, itheta);
        for i in 0..prims.len() {
            let t = lat.apply(&s, i);
            assert!((t.ix - s.ix).abs() <= reach && (t.iy - s.iy).abs() <= reach);
            let dt = (t.itheta as i32 - s.itheta as i32).rem_euclid(HEADING_BINS as i32);
            assert!(dt <= 1 || dt == HEADING_BINS as i32 - 1);
        }
    }
}

#[test]
fn collision_check_matches_exact_overlap_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let geom = StanceGeometry::default();
    let mut checked = 0;
    let mut collisions = 0;
    for map_seed in 0..10 {
        let mut m = flat_maps(150, 100);
        let ospec = *m.obstacle.spec();
        let density = 0.001 * (map_seed + 1) as f64;
        for oy in 0..ospec.height {
            for ox in 0..ospec.width {
                if rng.gen_bool(density) {
                    m.obstacle.set(ox, oy, ObstacleCell::Protrusion);
                } else if rng.gen_bool(0.02) {
                    m.obstacle.set(ox, oy, ObstacleCell::Hole);
                }
            }
        }
        let model = model(&m);
        let lat = &model.lattice;
        let rspec = *lat.spec();
        for _ in 0..100 {
            let s = BodyState::new(
                rng.gen_range(-5..rspec.width as i32 + 5),
                rng.gen_range(-5..rspec.height as i32 + 5),
                rng.gen_range(0..HEADING_BINS as i32),
            );
            // Independent oracle: clip the footprint against every nearby cell.
            let rect = geom.footprint(&lat.pose(&s));
            let mut expected = false;
            let c = lat.pose(&s);
            let r = ((0.6f64 / ospec.resolution).ceil()) as i64 + 2;
            let (cx, cy) = ((c.x / ospec.resolution).floor() as i64, (c.y / ospec.resolution).floor() as i64);
            for oy in cy - r..=cy + r {
                for ox in cx - r..=cx + r {
                    let x0 = ox as f64 * ospec.resolution;
                    let y0 = oy as f64 * ospec.resolution;
                    let cell =
                        Rect::new(Point2::new(x0, y0), Point2::new(x0 + ospec.resolution, y0 + ospec.resolution));
                    if overlap_area(&rect, &cell) <= 1e-12 {
                        continue;
                    }
                    let inside = ox >= 0 && oy >= 0 && (ox as usize) < ospec.width && (oy as usize) < ospec.height;
                    if !inside || m.obstacle.cell(ox as usize, oy as usize) == ObstacleCell::Protrusion {
                        expected = true;
                    }
                }
            }
            let got =
                body_collision_check(lat, &s, &m.obstacle, &geom, OutOfMapPolicy::Colliding) == Collision::Colliding;
            assert_eq!(got, expected, "state {s:?}");
            if lat.in_bounds(&s) {
                assert_eq!(model.is_valid(&s), !expected, "cached check at {s:?}");
            }
            checked += 1;
            collisions += expected as usize;
        }
    }
    assert_eq!(checked, 1000);
    assert!(collisions > 100 && collisions < 900, "unbalanced sample: {collisions} collisions");
}

#[test]
fn out_of_map_policy_free_ignores_the_border() {
    let m = flat_maps(150, 100);
    let model = model(&m);
    let geom = StanceGeometry::default();
    let edge = BodyState::new(2, 30, 0);
    assert_eq!(
        body_collision_check(&model.lattice, &edge, &m.obstacle, &geom, OutOfMapPolicy::Colliding),
        Collision::Colliding
    );
    assert_eq!(body_collision_check(&model.lattice, &edge, &m.obstacle, &geom, OutOfMapPolicy::Free), Collision::Free);
}

#[test]
fn open_floor_has_every_successor() {
    let m = flat_maps(150, 100);
    let model = model(&m);
    let graph = LatticeGraph::new(&model);
    for itheta in [0, 17, 50, 133] {
        let s = BodyState::new(37, 25, itheta);
        let mut edges = Vec::new();
        graph.successors(model.lattice.index(&s).unwrap(), &mut edges);
        assert_eq!(edges.len(), 10, "heading bin {itheta}");
    }
}

#[test]
fn wall_ahead_removes_forward_moves() {
    // A 0.5 m wall from x = 1.52 m; the body front edge sits at 1.48 m.
    let m = maps(height_map(150, 100, |x, _| if (1.52..1.68).contains(&x) { 0.5 } else { 0.0 }));
    let model = model(&m);
    let graph = LatticeGraph::new(&model);
    let s = BodyState::new(24, 25, 0);
    assert!(model.is_valid(&s));
    let mut edges = Vec::new();
    graph.successors(model.lattice.index(&s).unwrap(), &mut edges);
    let labels: Vec<&str> = edges.iter().map(|e| model.prims.get(e.action as usize).label.as_str()).collect();
    assert_eq!(edges.len(), 7, "{labels:?}");
    for gone in ["forward", "diagonal_forward_left", "diagonal_forward_right"] {
        assert!(!labels.contains(&gone), "{gone} should collide");
    }
}
