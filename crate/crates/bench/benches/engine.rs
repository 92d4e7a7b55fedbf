use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use normner_bench::{bundles, corpus, pairs, ruleset};
use normner_core::consolidation::{consolidate_optimistic, consolidate_pessimistic};
use normner_core::corpus::{parse_conll, write_conll};
use normner_core::metrics::{evaluate, JaccardPopulation};
use normner_core::rules::apply_ruleset;
use std::hint::black_box;

fn rules(c: &mut Criterion) {
    let docs = corpus(1000, 1);
    let rs = ruleset(&docs);
    let mut g = c.benchmark_group("rules");
    g.throughput(Throughput::Elements(docs.len() as u64));
    g.bench_function("apply_1000_docs", |b| {
        b.iter(|| docs.iter().map(|d| apply_ruleset(&rs, d).len()).sum::<usize>())
    });
    g.bench_function("compile", |b| b.iter(|| ruleset(black_box(&docs))));
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let pairs = pairs(1000, 2);
    let refs: Vec<_> = pairs.iter().map(|(g, p)| (g, p)).collect();
    let mut g = c.benchmark_group("metrics");
    g.throughput(Throughput::Elements(refs.len() as u64));
    g.bench_function("evaluate_1000_docs", |b| {
        b.iter(|| evaluate("bench", black_box(&refs), JaccardPopulation::Either).unwrap())
    });
    g.finish();
}

fn consolidation(c: &mut Criterion) {
    let docs = corpus(1000, 3);
    let bundles = bundles(&docs, 3);
    let mut g = c.benchmark_group("consolidation");
    g.throughput(Throughput::Elements(docs.len() as u64));
    g.bench_function("pessimistic_1000_docs", |b| {
        b.iter(|| bundles.iter().map(|b| consolidate_pessimistic(b).len()).sum::<usize>())
    });
    g.bench_function("optimistic_1000_docs", |b| {
        b.iter(|| {
            bundles
                .iter()
                .zip(&docs)
                .map(|(b, d)| consolidate_optimistic(b, d.tags()).unwrap().len())
                .sum::<usize>()
        })
    });
    g.finish();
}

fn conll(c: &mut Criterion) {
    let texts: Vec<String> = corpus(1000, 4).iter().map(write_conll).collect();
    c.bench_function("conll/parse_1000_docs", |b| {
        b.iter_batched(
            || texts.clone(),
            |texts| texts.iter().map(|t| parse_conll(t, "d").unwrap().len()).sum::<usize>(),
            BatchSize::LargeInput,
        )
    });
}

criterion_group!(benches, rules, metrics, consolidation, conll);
criterion_main!(benches);
