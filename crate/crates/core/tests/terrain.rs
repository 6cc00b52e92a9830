mod common;

use common::{height_map, incremental_mismatches};
use legplan::geometry::{Point2, Rect};
use legplan::terrain::{area_of_interest, compute_obstacle_map, load_heightmap, save_heightmap, ObstacleCell};
use legplan::{GridSpec, HeightMap, RewardMap, TerrainMaps, TerrainParams};

#[test]
fn incremental_updates_match_full_recomputation() {
    for seed in 0..20 {
        assert_eq!(incremental_mismatches(seed, 10), 0, "seed {seed}");
    }
}

#[test]
fn refresh_keeps_obstacles_in_sync() {
    let hm = height_map(100, 60, |_, _| 0.0);
    let mut maps = TerrainMaps::build(hm, TerrainParams::default()).unwrap();
    let block = Rect::new(Point2::new(0.8, 0.4), Point2::new(1.04, 0.64));
    for iy in 0..60 {
        for ix in 0..100 {
            if block.contains(maps.height.spec().cell_center(ix, iy)) {
                maps.height.set_elevation(ix, iy, 0.6);
            }
        }
    }
    maps.refresh(&block).unwrap();
    let fresh = TerrainMaps::build(maps.height.clone(), TerrainParams::default()).unwrap();
    assert_eq!(maps.reward, fresh.reward);
    assert_eq!(maps.obstacle.cells(), fresh.obstacle.cells());
    assert_eq!(maps.obstacle.cell_at(Point2::new(0.9, 0.5)), Some(ObstacleCell::Protrusion));
    assert_eq!(maps.obstacle.cell_at(Point2::new(0.3, 0.5)), Some(ObstacleCell::Free));
}

#[test]
fn unknown_cells_stay_unknown_everywhere() {
    let spec = GridSpec::new(Point2::new(0.0, 0.0), 0.02, 40, 40).unwrap();
    let hm = HeightMap::unknown(spec);
    let rm = RewardMap::compute(&hm, &TerrainParams::default());
    assert!(rm.raw().iter().all(|r| r.is_nan()));
    assert!(compute_obstacle_map(&hm, 0.25).is_err());
    let flat = TerrainMaps::build(HeightMap::flat(spec, 0.0), TerrainParams::default()).unwrap();
    assert_eq!(flat.obstacle.occupied_count(), 0);
}

#[test]
fn heightmap_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.txt");
    let mut hm = height_map(30, 20, |x, y| (3.0 * x).sin() * 0.1 + y * 0.01);
    hm.clear(4, 7);
    save_heightmap(&hm, &path).unwrap();
    let back = load_heightmap(&path).unwrap();
    assert_eq!(back.spec(), hm.spec());
    for (a, b) in hm.raw().iter().zip(back.raw()) {
        assert!((a.is_nan() && b.is_nan()) || a == b);
    }
}

#[test]
fn area_of_interest_follows_heading() {
    let aoi = area_of_interest(&legplan::Pose2::new(1.0, 1.0, std::f64::consts::FRAC_PI_2));
    assert!(aoi.contains(Point2::new(1.0, 3.7)));
    assert!(!aoi.contains(Point2::new(3.7, 1.0)));
}
