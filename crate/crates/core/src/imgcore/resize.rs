//! Resampling used by the spectral pipeline and localization scoring.

use super::raster::{BinaryMask, Plane};

/// Bilinear resampling with pixel-center alignment and edge clamping.
pub fn resize_bilinear(p: &Plane, new_w: usize, new_h: usize) -> Plane {
    if p.width == new_w && p.height == new_h {
        return p.clone();
    }
    let sx = p.width as f64 / new_w as f64;
    let sy = p.height as f64 / new_h as f64;
    let xs: Vec<(usize, usize, f64)> = (0..new_w)
        .map(|x| source_taps(x, sx, p.width))
        .collect();
    Plane::from_fn(new_w, new_h, |x, y| {
        let (y0, y1, fy) = source_taps(y, sy, p.height);
        let (x0, x1, fx) = xs[x];
        let top = p.get(x0, y0) * (1.0 - fx) + p.get(x1, y0) * fx;
        let bottom = p.get(x0, y1) * (1.0 - fx) + p.get(x1, y1) * fx;
        top * (1.0 - fy) + bottom * fy
    })
}

#[inline]
fn source_taps(i: usize, scale: f64, n: usize) -> (usize, usize, f64) {
    let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (n - 1) as f64);
    let i0 = src.floor() as usize;
    let i1 = (i0 + 1).min(n - 1);
    (i0, i1, src - i0 as f64)
}

/// Nearest-neighbour mask resampling (pixel-center alignment).
pub fn resize_mask_nearest(m: &BinaryMask, new_w: usize, new_h: usize) -> BinaryMask {
    if m.width() == new_w && m.height() == new_h {
        return m.clone();
    }
    let sx = m.width() as f64 / new_w as f64;
    let sy = m.height() as f64 / new_h as f64;
    BinaryMask::from_fn(new_w, new_h, |x, y| {
        let ix = (((x as f64 + 0.5) * sx).floor() as usize).min(m.width() - 1);
        let iy = (((y as f64 + 0.5) * sy).floor() as usize).min(m.height() - 1);
        m.get(ix, iy)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_size_is_noop() {
        let p = Plane::from_fn(5, 4, |x, y| (x * y) as f64);
        assert_eq!(resize_bilinear(&p, 5, 4), p);
    }

    #[test]
    fn upsampling_keeps_constants_and_range() {
        let p = Plane::from_fn(3, 3, |x, _| x as f64 / 2.0);
        let up = resize_bilinear(&p, 12, 12);
        assert!(up.data.iter().all(|v| (0.0..=1.0).contains(v)));
        let c = resize_bilinear(&Plane::from_fn(4, 4, |_, _| 0.3), 9, 7);
        assert!(c.data.iter().all(|v| (v - 0.3).abs() < 1e-12));
    }

    #[test]
    fn downsample_by_two_averages_pairs() {
        let p = Plane::from_fn(4, 1, |x, _| x as f64);
        let d = resize_bilinear(&p, 2, 1);
        assert_eq!(d.data, vec![0.5, 2.5]);
    }

    #[test]
    fn nearest_mask_upscale_replicates() {
        let m = BinaryMask::from_fn(2, 2, |x, y| x == 0 && y == 0);
        let up = resize_mask_nearest(&m, 4, 4);
        assert_eq!(up.count(), 4);
        assert!(up.get(1, 1) && !up.get(2, 1));
    }
}
