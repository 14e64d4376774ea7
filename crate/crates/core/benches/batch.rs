use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use specsms::bench::{random_suite, solve_many, solve_many_sequential};
use specsms::guidance::NoGuidance;
use specsms::orchestrator::{solve, SolverConfig};
use specsms::PartitionedFormula;

fn verdicts(batch: &[PartitionedFormula], parallel: bool) -> usize {
    let cfg = SolverConfig {
        proof: false,
        ..SolverConfig::default()
    };
    let run = |f: &PartitionedFormula| solve(f, &mut NoGuidance, &cfg).unwrap().verdict.is_sat();
    let out = if parallel {
        solve_many(batch, run)
    } else {
        solve_many_sequential(batch, run)
    };
    out.into_iter().filter(|&sat| sat).count()
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("random_batch");
    group.sample_size(10);
    for size in [64usize, 256] {
        let suite = random_suite(size, 7);
        group.bench_with_input(BenchmarkId::new("parallel", size), &suite, |b, s| {
            b.iter(|| verdicts(s, true))
        });
        group.bench_with_input(BenchmarkId::new("sequential", size), &suite, |b, s| {
            b.iter(|| verdicts(s, false))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
