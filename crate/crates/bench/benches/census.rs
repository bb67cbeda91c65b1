use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use funrep::{
    emergence_census, parse_text, reduce_chain, FamilyRule, FiniteDomain, FunctionRep, Network, Node, ParamFamily,
};

fn bench_census(c: &mut Criterion) {
    let mut group = c.benchmark_group("emergence_census");
    for n in [16usize, 32, 64] {
        let domain = FiniteDomain::plain("Z", n).unwrap();
        let poly = ParamFamily::new("poly", domain.clone(), FamilyRule::PolyMod { e: 3 }).unwrap();
        let add = ParamFamily::new("add", domain, FamilyRule::AffineMod { a: 1 }).unwrap();
        group.bench_with_input(BenchmarkId::new("poly_mod", n), &poly, |b, f| {
            b.iter(|| emergence_census(f))
        });
        group.bench_with_input(BenchmarkId::new("affine_mod", n), &add, |b, f| {
            b.iter(|| emergence_census(f))
        });
    }
    group.finish();
}

fn bench_reduce(c: &mut Criterion) {
    let domain = FiniteDomain::plain("Z", 32).unwrap();
    let mul = Arc::new(ParamFamily::new("mul", domain.clone(), FamilyRule::MulMod).unwrap());
    let nodes = (0..8)
        .map(|k| Node::new(format!("n{k}"), FunctionRep::new(mul.clone(), 2 * k + 1).unwrap()))
        .collect();
    let chain = Network::chain(domain, nodes).unwrap();
    c.bench_function("reduce_chain/mul_mod32x8", |b| b.iter(|| reduce_chain(&chain)));
}

fn bench_parse(c: &mut Criterion) {
    let source = include_str!("../../../corpus/demo.frd");
    c.bench_function("parse_text/demo", |b| b.iter(|| parse_text(source).unwrap()));
}

criterion_group!(benches, bench_census, bench_reduce, bench_parse);
criterion_main!(benches);
