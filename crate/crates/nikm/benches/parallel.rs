//! Counting refuted sequents over a model space, frame by frame, with and
//! without rayon.

use criterion::{criterion_group, criterion_main, Criterion};
use nikm::semantics::ModelSpace;
use nikm::{parse_formula, AxiomSet, NestedSequent};

const GOALS: [&str; 8] = [
    "[a]p -> p",
    "<a>p -> [a]p",
    "[a](p | q) -> [a]p | [a]q",
    "<a>[a^]p -> p",
    "(<a>p -> [a]q) -> [a](p -> q)",
    "[a][a]p -> [a]p",
    "p -> [a]<a^>p",
    "<a>(p -> q) -> [a]p -> <a>q",
];

fn bench(c: &mut Criterion) {
    let forward = ["a".to_string()].into();
    let atoms = ["p".to_string(), "q".to_string()].into();
    let space = ModelSpace::new(&forward, &atoms, &AxiomSet::empty(), 3).expect("within bounds");
    let goals: Vec<NestedSequent> = GOALS.iter().map(|g| NestedSequent::flat(vec![], Some(parse_formula(g).expect("parses")))).collect();
    assert_eq!(space.count_refuted_seq(&goals), space.count_refuted_par(&goals));
    let mut group = c.benchmark_group("count_refuted");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| space.count_refuted_seq(&goals)));
    group.bench_function("parallel", |b| b.iter(|| space.count_refuted_par(&goals)));
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
