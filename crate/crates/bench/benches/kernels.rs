use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gptk::composite::{max_cone_contains, min_cone_contains, monoidality_check, pr_box, separability, BilinearRule};
use gptk::dacey::{dacey_cover, derandomize};
use gptk::logic::{indexed_fragment, complementarity_check, unit_chain};
use gptk::modj::{boolean_testspace, complete_catalog, completion_audit};
use gptk::sample;
use gptk::systems::{bit, enriched_bit_catalog, gbit, gbit_model, grid, realized_catalog, single_test, two_binary_tests};
use gptk::Model;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn polytopes(c: &mut Criterion) {
    c.bench_function("gbit state vertices", |b| b.iter(|| gbit().state_polytope_vertices().unwrap()));
    c.bench_function("grid weight vertices", |b| b.iter(|| grid().weight_polytope_vertices().unwrap()));
}

fn cones(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tensors: Vec<_> = (0..16).map(|_| sample::tensor(&mut rng, &gbit(), &gbit())).collect();
    c.bench_function("gbit min cone membership x16", |b| {
        b.iter(|| tensors.iter().filter(|t| min_cone_contains(&gbit(), &gbit(), t).unwrap()).count())
    });
    c.bench_function("gbit max cone membership x16", |b| {
        b.iter(|| tensors.iter().filter(|t| max_cone_contains(&gbit(), &gbit(), t).unwrap()).count())
    });
    let m = Model::full(two_binary_tests()).unwrap();
    c.bench_function("PR box separability", |b| b.iter(|| separability(&m, &m, black_box(&pr_box())).unwrap()));
}

fn checks(c: &mut Criterion) {
    let cat = realized_catalog(&gbit_model()).unwrap();
    let rule = BilinearRule::max_rule(&gbit(), &gbit()).unwrap();
    let mut group = c.benchmark_group("checks");
    group.sample_size(10);
    group.bench_function("gbit max monoidality", |b| b.iter(|| monoidality_check(&rule, &cat, &cat).unwrap()));
    let closed = complete_catalog(&enriched_bit_catalog()).unwrap();
    group.bench_function("closed catalog audit", |b| b.iter(|| completion_audit(&closed).unwrap()));
    let idx = boolean_testspace(2).unwrap();
    let effects = unit_chain(&bit(), 3);
    let frag = indexed_fragment(&bit(), &idx, &effects).unwrap();
    group.bench_function("complementarity brute force", |b| b.iter(|| complementarity_check(&bit(), &idx, &frag).unwrap()));
    group.finish();
}

fn dacey(c: &mut Criterion) {
    let ts = single_test(&["w", "x", "y", "z"]);
    c.bench_function("cover of a 4-outcome test", |b| b.iter(|| dacey_cover(black_box(&ts)).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = sample::valued_weight(&mut rng, &gbit(), &two_binary_tests());
    c.bench_function("derandomize a gbit weight", |b| b.iter(|| derandomize(black_box(&f)).unwrap()));
}

criterion_group!(benches, polytopes, cones, checks, dacey);
criterion_main!(benches);
