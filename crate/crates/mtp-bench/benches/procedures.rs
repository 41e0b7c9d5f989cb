use criterion::{criterion_group, criterion_main, Criterion};
use mtp_core::{
    datasets, fwer_test, kfwer_augmented, kfwer_generalised, parse_rational, GraphWeighting,
    ProcedureConfig,
};

fn bench_procedures(c: &mut Criterion) {
    let graph = datasets::pd_graph(false);
    let weighting = GraphWeighting::new(&graph).unwrap();
    let p = datasets::pvalues_for(&graph, datasets::PD_PVALS).unwrap();
    let alpha = parse_rational("0.05").unwrap();
    let config = ProcedureConfig::at_level(alpha.clone())
        .unwrap()
        .with_k(2)
        .unwrap();

    c.bench_function("fwer_15_hypotheses", |b| {
        b.iter(|| fwer_test(&weighting, &p, &alpha).unwrap())
    });
    c.bench_function("kfwer_augmented_15_hypotheses", |b| {
        b.iter(|| kfwer_augmented(&weighting, &p, &config).unwrap())
    });
    c.bench_function("kfwer_generalised_15_hypotheses", |b| {
        b.iter(|| kfwer_generalised(&weighting, &p, &config).unwrap())
    });

    let mut group = c.benchmark_group("subset_weights");
    group.bench_function("cold_table", |b| {
        b.iter(|| {
            let fresh = GraphWeighting::new(&graph).unwrap();
            fwer_test(&fresh, &p, &alpha).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_procedures);
criterion_main!(benches);
