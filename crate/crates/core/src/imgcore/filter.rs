//! Gaussian kernels and separable convolution on [`Plane`]s.

use super::raster::Plane;

/// Mirrors an out-of-range index back into `0..n` without repeating the
/// edge sample (`dcb|abcd|cba`).
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

/// Normalized 1D Gaussian with `2 * radius + 1` taps.
pub fn gaussian_kernel(radius: usize, sigma: f64) -> Vec<f64> {
    let r = radius as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Standard deviation implied by an odd kernel size when none is given
/// explicitly: `0.3 * ((k - 1) / 2 - 1) + 0.8`.
pub fn sigma_for_kernel_size(size: usize) -> f64 {
    0.3 * ((size as f64 - 1.0) * 0.5 - 1.0) + 0.8
}

/// Kernel radius covering `±3σ`.
pub fn radius_for_sigma(sigma: f64) -> usize {
    (3.0 * sigma).ceil().max(1.0) as usize
}

/// Convolves rows then columns with the same symmetric kernel, reflecting at the borders.
pub fn convolve_separable(plane: &Plane, kernel: &[f64]) -> Plane {
    let (w, h) = (plane.width, plane.height);
    let r = (kernel.len() / 2) as isize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &plane.data[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (t, kv) in kernel.iter().enumerate() {
                acc += kv * row[reflect_index(x as isize + t as isize - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (t, kv) in kernel.iter().enumerate() {
            let sy = reflect_index(y as isize + t as isize - r, h);
            let src = &tmp[sy * w..(sy + 1) * w];
            let dst = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += kv * s;
            }
        }
    }
    Plane {
        width: w,
        height: h,
        data: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_101() {
        let got: Vec<usize> = (-3..7).map(|i| reflect_index(i, 4)).collect();
        assert_eq!(got, vec![3, 2, 1, 0, 1, 2, 3, 2, 1, 0]);
        assert_eq!(reflect_index(-5, 1), 0);
        // Folds repeatedly when the offset exceeds the length.
        assert_eq!(reflect_index(-4, 2), 0);
        assert_eq!(reflect_index(5, 2), 1);
    }

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        let k = gaussian_kernel(9, 3.0);
        assert_eq!(k.len(), 19);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..9 {
            assert_eq!(k[i], k[18 - i]);
        }
    }

    #[test]
    fn five_tap_sigma() {
        assert!((sigma_for_kernel_size(5) - 1.1).abs() < 1e-12);
        assert!((sigma_for_kernel_size(3) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn constant_plane_is_fixed_point() {
        let p = Plane::from_fn(7, 3, |_, _| 0.42);
        let out = convolve_separable(&p, &gaussian_kernel(4, 2.0));
        assert!(out.data.iter().all(|v| (v - 0.42).abs() < 1e-12));
    }
}
