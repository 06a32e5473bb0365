use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flaggraphs::flaggraph::relation_graph;
use flaggraphs::verify::invariants;
use flaggraphs::{AffineSpace, Exec, Field, LineRelation};

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("relation_graph");
    group.sample_size(10);
    for (n, q) in [(2, 9), (3, 4)] {
        let space = AffineSpace::new(n, Field::of_order(q).unwrap()).unwrap();
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, format!("AG({n},{q})")), &exec, |b, &exec| {
                b.iter(|| relation_graph(&space, LineRelation::Intersecting, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn invariant_pass(c: &mut Criterion) {
    let mut group = c.benchmark_group("invariants");
    group.sample_size(10);
    let space = AffineSpace::new(3, Field::of_order(4).unwrap()).unwrap();
    let graph = relation_graph(&space, LineRelation::Skew, Exec::Parallel).unwrap();
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::new(name, "skew AG(3,4)"), |b| b.iter(|| invariants(&graph, exec)));
    }
    group.finish();
}

criterion_group!(benches, construction, invariant_pass);
criterion_main!(benches);
