use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use growthlab::{
    decompose_cpi, detect_breakpoint, fit_rate_constant, full_search_range,
    generate_exponential_series, FitOptions, NoiseSpec,
};
use growthlab_bench::{exponential_fixture, hyperinflation_fixture, relative_log_fixture};

fn bench_fit_rate_constant(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_rate_constant");
    for n in [19usize, 200, 2000] {
        let series = relative_log_fixture(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &series, |b, s| {
            b.iter(|| fit_rate_constant(black_box(s)).unwrap());
        });
    }
    group.finish();
}

fn bench_decompose(c: &mut Criterion) {
    let bms = exponential_fixture(200);
    let gdp = generate_exponential_series(0.0197, 1.0, 200, &NoiseSpec::gaussian(0.01, 8)).unwrap();
    let sav = generate_exponential_series(0.0095, 1.0, 200, &NoiseSpec::gaussian(0.01, 9)).unwrap();
    let cpi = generate_exponential_series(0.0217, 1.0, 200, &NoiseSpec::gaussian(0.01, 10)).unwrap();
    c.bench_function("decompose_cpi/200", |b| {
        b.iter(|| decompose_cpi(black_box(&bms), &gdp, &sav, &cpi).unwrap());
    });
}

fn bench_breakpoint_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("detect_breakpoint");
    // double-exponential levels leave f64 range past t ~ 68 for these params
    for n in [42usize, 60] {
        let series = hyperinflation_fixture(n);
        let (lo, hi) = full_search_range(&series);
        group.bench_with_input(BenchmarkId::from_parameter(n), &series, |b, s| {
            b.iter(|| detect_breakpoint(black_box(s), lo, hi, &FitOptions::default()).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fit_rate_constant, bench_decompose, bench_breakpoint_search);
criterion_main!(benches);
