use afrelay::asymptotics::expansion_coeffs;
use afrelay::integral::{default_s_max, outage_contour, outage_residue_series};
use afrelay::montecarlo::estimate_outage;
use afrelay::{AmplificationPolicy, ExpansionConfig, FadingModel, LinkSpec};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn links() -> Vec<(&'static str, LinkSpec)> {
    let nak: Vec<_> = (1..=3)
        .map(|m| (FadingModel::nakagami(m as f64, 1.0).unwrap(), 1.0))
        .collect();
    let mixed = vec![
        (FadingModel::nakagami(2.0, 0.5).unwrap(), 1.0),
        (FadingModel::weibull(1.5, 1.0).unwrap(), 0.9),
        (FadingModel::rician(3.0, 1.5).unwrap(), 0.8),
        (FadingModel::hoyt(0.75, 2.0).unwrap(), 0.7),
    ];
    vec![
        (
            "nakagami3",
            LinkSpec::from_models(&nak, 1.0, AmplificationPolicy::PaperGain).unwrap(),
        ),
        (
            "mixed4",
            LinkSpec::from_models(&mixed, 1.0, AmplificationPolicy::PaperGain).unwrap(),
        ),
    ]
}

fn analytic(c: &mut Criterion) {
    let gamma_bar = 100.0;
    let mut group = c.benchmark_group("analytic");
    for (name, link) in links() {
        let cfg = ExpansionConfig::for_link(&link);
        let s_max = default_s_max(&link, gamma_bar);
        group.bench_with_input(BenchmarkId::new("contour", name), &link, |b, link| {
            b.iter(|| outage_contour(link, black_box(gamma_bar), &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("residue", name), &link, |b, link| {
            b.iter(|| outage_residue_series(link, black_box(gamma_bar), &cfg, s_max).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("expansion_coeffs", name), &link, |b, link| {
            b.iter(|| expansion_coeffs(black_box(link), &cfg).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    const TRIALS: u64 = 1 << 20;
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10).throughput(Throughput::Elements(TRIALS));
    for (name, link) in links() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &link, |b, link| {
            b.iter(|| estimate_outage(link, 100.0, TRIALS, black_box(1)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, analytic, monte_carlo);
criterion_main!(benches);
