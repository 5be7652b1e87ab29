use inpx_core::corrupt::{gaussian_blur, jpeg_compress, LightSpotParams};
use inpx_core::evalharness::{localization_metrics, roc_auc, DetectionRecord, Label, LocalizationConfig, SaliencyMap};
use inpx_core::imgcore::{diff_map, exchange, soft_exchange, BinaryMask, Plane, RasterImage};
use inpx_core::spectra::{cross_difference, high_pass, spectral_mse, SpectralFingerprint};
use inpx_core::stats::{pearson, spearman};
use proptest::prelude::*;

fn image(w: usize, h: usize, c: usize) -> impl Strategy<Value = RasterImage> {
    proptest::collection::vec(any::<u8>(), w * h * c)
        .prop_map(move |b| RasterImage::from_u8(w, h, c, &b).unwrap())
}

fn mask(w: usize, h: usize) -> impl Strategy<Value = BinaryMask> {
    proptest::collection::vec(any::<bool>(), w * h).prop_map(move |b| BinaryMask::new(w, h, b).unwrap())
}

fn triplet() -> impl Strategy<Value = (RasterImage, RasterImage, BinaryMask)> {
    (1usize..12, 1usize..12, prop_oneof![Just(1usize), Just(3)])
        .prop_flat_map(|(w, h, c)| (image(w, h, c), image(w, h, c), mask(w, h)))
}

fn labelled_scores() -> impl Strategy<Value = Vec<(bool, f64)>> {
    proptest::collection::vec((any::<bool>(), 0u8..=20), 2..30)
        .prop_filter("both classes", |v| v.iter().any(|p| p.0) && v.iter().any(|p| !p.0))
        .prop_map(|v| v.into_iter().map(|(l, s)| (l, f64::from(s) / 20.0)).collect())
}

fn records(v: &[(bool, f64)], f: impl Fn(f64) -> f64) -> Vec<DetectionRecord> {
    v.iter()
        .enumerate()
        .map(|(i, &(l, s))| DetectionRecord::new(format!("{i}"), if l { Label::Fake } else { Label::Real }, f(s)).unwrap())
        .collect()
}

fn non_constant(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-50i32..50, len)
        .prop_filter("non-constant", |v| v.iter().any(|x| *x != v[0]))
        .prop_map(|v| v.into_iter().map(f64::from).collect())
}

fn fingerprint(len: usize) -> impl Strategy<Value = SpectralFingerprint> {
    proptest::collection::vec(0.0f64..1.0, len).prop_map(move |m| SpectralFingerprint {
        size: (len, 1),
        count: 1,
        magnitude: m,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exchange_support((o, g, m) in triplet()) {
        let out = exchange(&o, &g, &m).unwrap();
        let d = diff_map(&o, &out).unwrap();
        for y in 0..o.height() {
            for x in 0..o.width() {
                if !m.get(x, y) {
                    prop_assert_eq!(d.get(x, y), 0.0);
                    prop_assert_eq!(out.pixel(x, y), o.pixel(x, y));
                } else {
                    prop_assert_eq!(out.pixel(x, y), g.pixel(x, y));
                }
            }
        }
        prop_assert_eq!(out.to_u8(), out.quantized().to_u8());
    }

    #[test]
    fn exchange_idempotent((o, g, m) in triplet()) {
        let once = exchange(&o, &g, &m).unwrap();
        prop_assert_eq!(exchange(&o, &once, &m).unwrap(), once);
    }

    #[test]
    fn exchange_complement((o, g, m) in triplet()) {
        prop_assert_eq!(exchange(&o, &g, &m).unwrap(), exchange(&g, &o, &m.inverted()).unwrap());
    }

    #[test]
    fn zero_band_soft_exchange_is_hard((o, g, m) in triplet()) {
        prop_assert_eq!(soft_exchange(&o, &g, &m, 0, 5).unwrap(), exchange(&o, &g, &m).unwrap());
    }

    #[test]
    fn auc_invariant_under_monotone_maps(v in labelled_scores()) {
        let base = roc_auc(&records(&v, |s| s)).unwrap();
        let squashed = roc_auc(&records(&v, |s| s * s * 0.5 + 0.1)).unwrap();
        let logistic = roc_auc(&records(&v, |s| 1.0 / (1.0 + (-(8.0 * s - 4.0)).exp()))).unwrap();
        prop_assert!((base - squashed).abs() < 1e-12);
        prop_assert!((base - logistic).abs() < 1e-12);
    }

    #[test]
    fn pearson_affine_behaviour(x in non_constant(3..20), y in non_constant(3..20), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        prop_assume!(x.iter().any(|v| *v != x[0]) && y.iter().any(|v| *v != y[0]));
        let r = pearson(x, y).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let flipped: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson(&scaled, y).unwrap() - r).abs() < 1e-9);
        prop_assert!((pearson(&flipped, y).unwrap() + r).abs() < 1e-9);
        prop_assert!((pearson(y, x).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn spearman_monotone_invariance(x in non_constant(3..20), y in non_constant(3..20)) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        prop_assume!(x.iter().any(|v| *v != x[0]) && y.iter().any(|v| *v != y[0]));
        let rho = spearman(x, y).unwrap();
        let cubed: Vec<f64> = x.iter().map(|v| v * v * v + 3.0 * v).collect();
        let exp: Vec<f64> = y.iter().map(|v| (v / 10.0).exp()).collect();
        prop_assert_eq!(spearman(&cubed, &exp).unwrap(), rho);
        prop_assert!((spearman(y, x).unwrap() - rho).abs() < 1e-12);
    }

    #[test]
    fn spectral_mse_is_pseudometric(a in fingerprint(16), b in fingerprint(16), c in fingerprint(16)) {
        let d = |p: &SpectralFingerprint, q: &SpectralFingerprint| spectral_mse(p, q).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c).sqrt() <= d(&a, &b).sqrt() + d(&b, &c).sqrt() + 1e-12);
    }

    #[test]
    fn cross_difference_kills_affine(a in -1.0f64..1.0, b in -0.1f64..0.1, c in -0.1f64..0.1, w in 2usize..16, h in 2usize..16) {
        let p = Plane::from_fn(w, h, |x, y| a + b * x as f64 + c * y as f64);
        prop_assert!(cross_difference(&p).unwrap().data.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn blur_preserves_constants(v in 0u8..=255, sigma in 0.5f64..5.0, w in 1usize..20, h in 1usize..20) {
        let img = RasterImage::filled(w, h, 3, f64::from(v) / 255.0).unwrap();
        prop_assert_eq!(gaussian_blur(&img, sigma).unwrap(), img);
    }

    #[test]
    fn blur_reduces_high_pass_energy(img in image(12, 12, 1)) {
        prop_assume!(img.data().iter().any(|v| *v != img.data()[0]));
        let before = high_pass(&img).unwrap().energy();
        let after = high_pass(&gaussian_blur(&img, 1.5).unwrap()).unwrap().energy();
        prop_assume!(before > 0.0);
        prop_assert!(after < before);
    }

    #[test]
    fn corruptions_keep_shape(img in image(9, 7, 3), cx in 0.0f64..8.0, cy in 0.0f64..6.0) {
        let spot = inpx_core::corrupt::light_spot(&img, &LightSpotParams::new((cx, cy), 4.0, 1.5).unwrap()).unwrap();
        prop_assert!(spot.same_shape(&img));
        prop_assert!(gaussian_blur(&img, 2.0).unwrap().same_shape(&img));
        prop_assert!(jpeg_compress(&img, 80).unwrap().same_shape(&img));
    }

    #[test]
    fn spot_gain_decreases_radially(r in 1.0f64..50.0, a in 1.0f64..3.0, d1 in 0.0f64..100.0, d2 in 0.0f64..100.0) {
        let p = LightSpotParams::new((0.0, 0.0), r, a).unwrap();
        let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(p.gain_at(near) >= p.gain_at(far));
    }

    #[test]
    fn localization_permutation_invariant(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng, seq::SliceRandom};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut items: Vec<(SaliencyMap, BinaryMask)> = (0..5)
            .map(|_| {
                let s = SaliencyMap::new(6, 6, (0..36).map(|_| r.random()).collect()).unwrap();
                let m = BinaryMask::from_fn(6, 6, |_, _| r.random_bool(0.3));
                (s, m)
            })
            .collect();
        let cfg = LocalizationConfig { resize_to: None };
        let a = localization_metrics(&items, &cfg).unwrap();
        items.shuffle(&mut r);
        let b = localization_metrics(&items, &cfg).unwrap();
        prop_assert!((a.miou - b.miou).abs() < 1e-12);
        prop_assert!((a.map - b.map).abs() < 1e-12);
    }
}

/// Fraction of samples within one level after a second q100 pass, and the largest change.
fn second_pass_drift(img: &RasterImage) -> (f64, u8) {
    let once = jpeg_compress(img, 100).unwrap();
    let twice = jpeg_compress(&once, 100).unwrap();
    let (a, b) = (once.to_u8(), twice.to_u8());
    let close = a.iter().zip(&b).filter(|(x, y)| x.abs_diff(**y) <= 1).count() as f64 / a.len() as f64;
    let worst = a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0);
    (close, worst)
}

fn textured(seed: u64, w: usize, h: usize, c: usize) -> RasterImage {
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let bytes: Vec<u8> = (0..w * h * c)
        .map(|i| {
            let (x, y, ch) = ((i / c) % w, i / c / w, i % c);
            (20 + 3 * x + 2 * y + 30 * ch) as u8 ^ (r.random::<u8>() & 7)
        })
        .collect();
    RasterImage::from_u8(w, h, c, &bytes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn jpeg_q100_near_idempotent_gray(seed in any::<u64>()) {
        let (f, _) = second_pass_drift(&textured(seed, 32, 24, 1));
        prop_assert!(f >= 0.99, "{f}");
    }

    // Decoder-side 8-bit color conversion moves 2-3% of color samples
    // by two or three levels on the second pass.
    #[test]
    fn jpeg_q100_near_idempotent_color(seed in any::<u64>()) {
        let (f, worst) = second_pass_drift(&textured(seed, 32, 24, 3));
        prop_assert!(f >= 0.96, "{f}");
        prop_assert!(worst <= 3, "{worst}");
    }
}
