//! Exchange compositing: put original pixels back everywhere outside the
//! edit mask, optionally feathering the seam with a soft alpha matte.

use super::filter::{convolve_separable, gaussian_kernel, sigma_for_kernel_size};
use super::raster::{quantize_u8, AlphaMatte, BinaryMask, DiffMap, Plane, RasterImage};
use crate::error::{Error, Result};

fn check_triplet(original: &RasterImage, generated: &RasterImage, mask: &BinaryMask) -> Result<()> {
    if !original.same_shape(generated) {
        return Err(Error::dims(format!(
            "original is {}x{}x{} but generated is {}x{}x{}",
            original.width(),
            original.height(),
            original.channels(),
            generated.width(),
            generated.height(),
            generated.channels()
        )));
    }
    mask.check_matches(original)
}

/// Takes `generated` inside the mask and `original` everywhere else.
///
/// Samples are copied, never recomputed, so background pixels are
/// bit-identical to the original.
pub fn exchange(
    original: &RasterImage,
    generated: &RasterImage,
    mask: &BinaryMask,
) -> Result<RasterImage> {
    check_triplet(original, generated, mask)?;
    let c = original.channels();
    let mut data = original.data().to_vec();
    for (i, _) in mask.bits().iter().enumerate().filter(|(_, &b)| b) {
        data[i * c..(i + 1) * c].copy_from_slice(&generated.data()[i * c..(i + 1) * c]);
    }
    Ok(RasterImage::from_raw(
        original.width(),
        original.height(),
        c,
        data,
    ))
}

/// Pixels 8-adjacent to a pixel of the opposite mask label, on both sides of the seam.
pub fn mask_boundary(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        let here = mask.get(x, y);
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if (dx, dy) != (0, 0)
                    && (0..w).contains(&nx)
                    && (0..h).contains(&ny)
                    && mask.get(nx as usize, ny as usize) != here
                {
                    return true;
                }
            }
        }
        false
    })
}

fn dilate(m: &BinaryMask) -> BinaryMask {
    let (w, h) = (m.width(), m.height());
    BinaryMask::from_fn(w, h, |x, y| {
        let (x0, x1) = (x.saturating_sub(1), (x + 1).min(w - 1));
        let (y0, y1) = (y.saturating_sub(1), (y + 1).min(h - 1));
        (y0..=y1).any(|yy| (x0..=x1).any(|xx| m.get(xx, yy)))
    })
}

/// Seam band of the given width: the mask boundary grown by
/// `band_width - 1` rounds of 3×3 dilation. Width 0 yields an empty band.
pub fn edge_band(mask: &BinaryMask, band_width: usize) -> BinaryMask {
    if band_width == 0 {
        return BinaryMask::filled(mask.width(), mask.height(), false);
    }
    let mut band = mask_boundary(mask);
    for _ in 1..band_width {
        band = dilate(&band);
    }
    band
}

/// Gaussian-blurred edge band.
pub fn alpha_matte(mask: &BinaryMask, band_width: usize, kernel_size: usize) -> Result<AlphaMatte> {
    check_kernel(kernel_size)?;
    let band = edge_band(mask, band_width);
    let plane = Plane::new(
        band.width(),
        band.height(),
        band.bits().iter().map(|&b| f64::from(u8::from(b))).collect(),
    )?;
    let kernel = gaussian_kernel(kernel_size / 2, sigma_for_kernel_size(kernel_size));
    let blurred = convolve_separable(&plane, &kernel);
    Ok(AlphaMatte {
        width: band.width(),
        height: band.height(),
        alpha: blurred.data.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
    })
}

fn check_kernel(kernel_size: usize) -> Result<()> {
    if kernel_size < 3 || kernel_size % 2 == 0 {
        return Err(Error::param(format!(
            "blur kernel must be odd and >= 3, got {kernel_size}"
        )));
    }
    Ok(())
}

/// Hard exchange followed by seam feathering.
///
/// The hard composite is blended with a Gaussian-smoothed copy of itself,
/// weighted by [`alpha_matte`]. Pixels where the matte is zero keep their
/// hard-exchange value exactly; blended pixels are re-quantized to 8 bits.
pub fn soft_exchange(
    original: &RasterImage,
    generated: &RasterImage,
    mask: &BinaryMask,
    band_width: usize,
    kernel_size: usize,
) -> Result<RasterImage> {
    check_kernel(kernel_size)?;
    let hard = exchange(original, generated, mask)?;
    if band_width == 0 {
        return Ok(hard);
    }
    let matte = alpha_matte(mask, band_width, kernel_size)?;
    let kernel = gaussian_kernel(kernel_size / 2, sigma_for_kernel_size(kernel_size));
    let blurred: Vec<Plane> = hard
        .planes()
        .iter()
        .map(|p| convolve_separable(p, &kernel))
        .collect();

    let c = hard.channels();
    let mut data = hard.data().to_vec();
    for (i, &a) in matte.alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (ch, plane) in blurred.iter().enumerate() {
            let sharp = data[i * c + ch];
            let v = sharp * (1.0 - a) + plane.data[i] * a;
            data[i * c + ch] = f64::from(quantize_u8(v)) / 255.0;
        }
    }
    Ok(RasterImage::from_raw(hard.width(), hard.height(), c, data))
}

/// Per-pixel mean over channels of `|a - b|`.
pub fn diff_map(a: &RasterImage, b: &RasterImage) -> Result<DiffMap> {
    if !a.same_shape(b) {
        return Err(Error::dims("diff_map inputs differ in shape"));
    }
    let c = a.channels();
    let value = a
        .data()
        .chunks_exact(c)
        .zip(b.data().chunks_exact(c))
        .map(|(pa, pb)| pa.iter().zip(pb).map(|(x, y)| (x - y).abs()).sum::<f64>() / c as f64)
        .collect();
    Ok(DiffMap {
        width: a.width(),
        height: a.height(),
        value,
    })
}

/// Fraction of pixels inside the edit region.
pub fn mask_ratio(mask: &BinaryMask) -> f64 {
    mask.ratio()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize, c: usize, phase: usize) -> RasterImage {
        let bytes: Vec<u8> = (0..w * h * c).map(|i| ((i * 37 + phase) % 256) as u8).collect();
        RasterImage::from_u8(w, h, c, &bytes).unwrap()
    }

    #[test]
    fn empty_and_full_masks() {
        let (o, g) = (ramp(8, 8, 3, 0), ramp(8, 8, 3, 11));
        assert_eq!(exchange(&o, &g, &BinaryMask::filled(8, 8, false)).unwrap(), o);
        assert_eq!(exchange(&o, &g, &BinaryMask::filled(8, 8, true)).unwrap(), g);
    }

    #[test]
    fn single_pixel_mask_changes_only_that_pixel() {
        let (o, g) = (ramp(8, 8, 3, 0), ramp(8, 8, 3, 5));
        let m = BinaryMask::from_fn(8, 8, |x, y| (x, y) == (3, 5));
        let out = exchange(&o, &g, &m).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                if (x, y) == (3, 5) {
                    assert_eq!(out.pixel(x, y), g.pixel(x, y));
                } else {
                    assert_eq!(out.pixel(x, y), o.pixel(x, y));
                }
            }
        }
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let o = ramp(8, 8, 3, 0);
        assert!(exchange(&o, &ramp(8, 7, 3, 0), &BinaryMask::filled(8, 8, true)).is_err());
        assert!(exchange(&o, &ramp(8, 8, 1, 0), &BinaryMask::filled(8, 8, true)).is_err());
        assert!(exchange(&o, &o, &BinaryMask::filled(4, 4, true)).is_err());
    }

    #[test]
    fn soft_exchange_parameter_errors() {
        let o = ramp(8, 8, 1, 0);
        let m = BinaryMask::filled(8, 8, false);
        assert!(soft_exchange(&o, &o, &m, 2, 4).is_err());
        assert!(soft_exchange(&o, &o, &m, 2, 1).is_err());
    }

    #[test]
    fn soft_exchange_without_boundary_is_original() {
        let (o, g) = (ramp(16, 16, 3, 0), ramp(16, 16, 3, 9));
        let out = soft_exchange(&o, &g, &BinaryMask::filled(16, 16, false), 2, 5).unwrap();
        assert_eq!(out, o);
    }

    #[test]
    fn zero_band_width_is_hard_exchange() {
        let (o, g) = (ramp(16, 16, 3, 0), ramp(16, 16, 3, 9));
        let m = BinaryMask::from_fn(16, 16, |x, y| (4..10).contains(&x) && (5..12).contains(&y));
        assert_eq!(
            soft_exchange(&o, &g, &m, 0, 5).unwrap(),
            exchange(&o, &g, &m).unwrap()
        );
    }

    #[test]
    fn far_pixels_keep_hard_value() {
        let (o, g) = (ramp(32, 32, 3, 0), ramp(32, 32, 3, 77));
        let m = BinaryMask::from_fn(32, 32, |x, y| (8..24).contains(&x) && (8..24).contains(&y));
        let hard = exchange(&o, &g, &m).unwrap();
        let soft = soft_exchange(&o, &g, &m, 2, 5).unwrap();
        let matte = alpha_matte(&m, 2, 5).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                if matte.get(x, y) == 0.0 {
                    assert_eq!(soft.pixel(x, y), hard.pixel(x, y));
                }
            }
        }
        assert_eq!(soft.pixel(0, 0), o.pixel(0, 0));
        assert_eq!(soft.pixel(16, 16), g.pixel(16, 16));
    }

    #[test]
    fn matte_support_stays_near_the_seam() {
        let m = BinaryMask::from_fn(32, 32, |x, y| (12..20).contains(&x) && (12..20).contains(&y));
        let matte = alpha_matte(&m, 2, 5).unwrap();
        // band reaches 2 px from the seam, blur adds kernel radius 2
        for y in 0..32usize {
            for x in 0..32usize {
                let dx = if x < 12 { 12 - x } else if x >= 20 { x - 19 } else { 0 };
                let dy = if y < 12 { 12 - y } else if y >= 20 { y - 19 } else { 0 };
                let inside = (12..20).contains(&x) && (12..20).contains(&y);
                let dist_out = dx.max(dy);
                let dist_in = (x as isize - 11).min(20 - x as isize).min(y as isize - 11).min(20 - y as isize);
                let d = if inside { dist_in as usize } else { dist_out };
                if d > 4 {
                    assert_eq!(matte.get(x, y), 0.0, "({x},{y})");
                }
            }
        }
        assert!(matte.alpha.iter().all(|a| (0.0..=1.0).contains(a)));
    }

    #[test]
    fn diff_map_cases() {
        let a = RasterImage::filled(3, 2, 3, 0.25).unwrap();
        let b = RasterImage::filled(3, 2, 3, 0.75).unwrap();
        assert!(diff_map(&a, &b).unwrap().value.iter().all(|&v| v == 0.5));
        assert!(diff_map(&a, &a).unwrap().value.iter().all(|&v| v == 0.0));
        assert!(diff_map(&a, &RasterImage::filled(3, 2, 1, 0.0).unwrap()).is_err());
    }
}
