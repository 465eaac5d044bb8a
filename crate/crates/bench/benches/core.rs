use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use relalg::refute::refute_finite_candidate;
use relalg::search::{search_representation, SearchConfig};
use relalg::{check_ra_axioms, theta_construction, zoo, FiniteBase, Relation, Signature};

fn axioms(c: &mut Criterion) {
    let pa = zoo::point_algebra();
    let z6 = zoo::by_name("z6").unwrap();
    let z12 = zoo::by_name("z12").unwrap();
    c.bench_function("check_ra_axioms/point", |b| {
        b.iter(|| check_ra_axioms(black_box(&pa)))
    });
    c.bench_function("check_ra_axioms/z6", |b| {
        b.iter(|| check_ra_axioms(black_box(&z6)))
    });
    c.bench_function("check_ra_axioms/z12 (atom scope)", |b| {
        b.iter(|| check_ra_axioms(black_box(&z12)))
    });
}

fn relations(c: &mut Criterion) {
    let base = FiniteBase::new(32).unwrap();
    let r =
        Relation::from_pairs(base, base.pairs().filter(|(x, y)| (x * 7 + y * 3) % 5 == 0)).unwrap();
    let s = r.converse();
    c.bench_function("relation/compose 32", |b| {
        b.iter(|| black_box(&r).compose(black_box(&s)))
    });
}

fn representations(c: &mut Criterion) {
    let pa = zoo::point_algebra();
    c.bench_function("theta/point", |b| {
        b.iter(|| theta_construction(black_box(&pa)))
    });
    let theta = theta_construction(&pa).unwrap();
    c.bench_function("refute/point theta", |b| {
        b.iter(|| refute_finite_candidate(black_box(&theta)))
    });
}

fn search(c: &mut Criterion) {
    let pa = zoo::point_algebra();
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for (label, sig, n) in [
        ("-,; n=3", "-,;", 3),
        ("-,; n=4", "-,;", 4),
        ("below boundary n=3", "0,1,+,1',~,;", 3),
    ] {
        let cfg = SearchConfig::new(sig.parse::<Signature>().unwrap(), n);
        group.bench_function(label, |b| {
            b.iter(|| search_representation(black_box(&pa), &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, axioms, relations, representations, search);
criterion_main!(benches);
