//! Deterministic inputs shared by the benchmarks.

use inpx_core::evalharness::{DetectionRecord, Label};
use inpx_core::theoryval::{NoisyImageModel, Stream};
use inpx_core::{BinaryMask, RasterImage};

/// Gray synthetic image of side `size`.
pub fn image(size: usize, index: u64) -> RasterImage {
    let model = NoisyImageModel {
        size,
        ..Default::default()
    };
    model.sample(Stream::Real, index)
}

/// Three-channel image built from three synthetic planes.
pub fn color_image(size: usize) -> RasterImage {
    let planes: Vec<_> = (0..3).map(|c| image(size, c).plane(0)).collect();
    RasterImage::from_planes_clamped(&planes).expect("equal planes")
}

/// Centered square covering roughly `ratio` of the image.
pub fn centered_mask(size: usize, ratio: f64) -> BinaryMask {
    let side = ((size * size) as f64 * ratio).sqrt().round() as usize;
    let lo = (size - side) / 2;
    BinaryMask::from_fn(size, size, |x, y| (lo..lo + side).contains(&x) && (lo..lo + side).contains(&y))
}

/// `n` records with interleaved labels and a scrambled score order.
pub fn records(n: usize) -> Vec<DetectionRecord> {
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Real } else { Label::Fake };
            let score = ((i * 7919) % n) as f64 / n as f64;
            DetectionRecord::new(format!("r{i}"), label, score).expect("score in range")
        })
        .collect()
}
