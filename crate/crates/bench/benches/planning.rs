use criterion::{criterion_group, criterion_main, Criterion};
use legplan::footstep_sequence;
use legplan::sim::BenchmarkKind;
use legplan::{a_star, ara_star, AnytimeSchedule, Budget, HeuristicKind, RewardMap};
use legplan_bench::{case, dirty_region, model};

fn terrain_maps(c: &mut Criterion) {
    let (_, case) = case(BenchmarkKind::Pallet);
    let params = case.maps.params.clone();
    c.bench_function("reward_map_full", |b| b.iter(|| RewardMap::compute(&case.maps.height, &params)));
    let dirty = dirty_region(&case);
    c.bench_function("terrain_refresh_dirty_region", |b| {
        let mut maps = case.maps.clone();
        b.iter(|| maps.refresh(&dirty).unwrap())
    });
}

fn body_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("body_search");
    group.sample_size(10);
    for kind in [BenchmarkKind::Pallet, BenchmarkKind::SteppingStones] {
        let (cfg, case) = case(kind);
        let (m, start, goal) = model(&cfg, &case);
        group.bench_function(format!("a_star/{kind}"), |b| {
            b.iter(|| a_star(&m, &start, &goal, HeuristicKind::Guarded, &Budget::unlimited()).unwrap())
        });
        let first = AnytimeSchedule::first_solution(3.0);
        group.bench_function(format!("ara_star_first/{kind}"), |b| {
            b.iter(|| {
                ara_star(&m, &start, &goal, &first, HeuristicKind::Guarded, &Budget::unlimited(), |_| {}).unwrap()
            })
        });
    }
    group.finish();
}

fn footsteps(c: &mut Criterion) {
    let (cfg, case) = case(BenchmarkKind::Stair);
    let (m, start, goal) = model(&cfg, &case);
    let plan = a_star(&m, &start, &goal, HeuristicKind::Guarded, &Budget::unlimited()).unwrap();
    c.bench_function("footstep_sequence/stair", |b| b.iter(|| footstep_sequence(&m, &plan, plan.len(), None).unwrap()));
}

fn cost_model(c: &mut Criterion) {
    let (cfg, case) = case(BenchmarkKind::Gap);
    let mut group = c.benchmark_group("cost_model");
    group.sample_size(10);
    group.bench_function("build/gap", |b| b.iter(|| case.model(&cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, terrain_maps, body_search, footsteps, cost_model);
criterion_main!(benches);
