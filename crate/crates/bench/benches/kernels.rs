use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use inpx_bench::{centered_mask, color_image, image, records};
use inpx_core::corrupt::{encode_jpeg, gaussian_blur};
use inpx_core::evalharness::roc_auc;
use inpx_core::imgcore::{exchange, soft_exchange};
use inpx_core::spectra::{fingerprint, image_spectrum, FingerprintConfig};

fn bench_exchange(c: &mut Criterion) {
    let mut g = c.benchmark_group("exchange");
    for size in [256, 512, 1024] {
        let (a, b) = (color_image(size), color_image(size).map_clamped(|v| 1.0 - v));
        let mask = centered_mask(size, 0.1);
        g.throughput(Throughput::Elements((size * size) as u64));
        g.bench_with_input(BenchmarkId::new("hard", size), &size, |bn, _| {
            bn.iter(|| exchange(black_box(&a), black_box(&b), &mask).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("soft", size), &size, |bn, _| {
            bn.iter(|| soft_exchange(black_box(&a), black_box(&b), &mask, 2, 5).unwrap())
        });
    }
    g.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    let img = image(512, 0);
    let native = FingerprintConfig { resize_to: None };
    c.bench_function("spectrum/512", |bn| bn.iter(|| image_spectrum(black_box(&img), &native).unwrap()));
    let batch: Vec<_> = (0..8).map(|i| image(384, i)).collect();
    c.bench_function("fingerprint/8x384->512", |bn| {
        bn.iter(|| fingerprint(black_box(&batch), &FingerprintConfig::default()).unwrap())
    });
}

fn bench_corruptions(c: &mut Criterion) {
    let img = color_image(512);
    c.bench_function("blur/sigma3/512", |bn| bn.iter(|| gaussian_blur(black_box(&img), 3.0).unwrap()));
    let mut g = c.benchmark_group("jpeg_encode/512");
    for q in [50u8, 80, 95] {
        g.bench_with_input(BenchmarkId::from_parameter(q), &q, |bn, &q| {
            bn.iter(|| encode_jpeg(black_box(&img), q).unwrap())
        });
    }
    g.finish();
}

fn bench_auc(c: &mut Criterion) {
    let recs = records(100_000);
    c.bench_function("roc_auc/100k", |bn| bn.iter(|| roc_auc(black_box(&recs)).unwrap()));
}

criterion_group!(benches, bench_exchange, bench_spectrum, bench_corruptions, bench_auc);
criterion_main!(benches);
