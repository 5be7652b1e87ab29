use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::imgcore::Plane;

/// Unnormalized forward 2D DFT, row-major `height × width`.
///
/// With this convention `Σ|F|² = N · Σ|x|²` where `N = width · height`.
pub fn fft2(p: &Plane) -> Vec<Complex64> {
    let (w, h) = (p.width, p.height);
    let mut data: Vec<Complex64> = p.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(w);
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(h);
    let mut col = vec![Complex64::default(); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = data[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            data[y * w + x] = col[y];
        }
    }
    data
}

/// Unnormalized inverse 2D DFT; callers divide by `N` themselves.
pub fn ifft2(data: &mut [Complex64], w: usize, h: usize) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_inverse(w);
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_inverse(h);
    let mut col = vec![Complex64::default(); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = data[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            data[y * w + x] = col[y];
        }
    }
}

/// Moves the zero-frequency bin to `(w/2, h/2)`.
pub fn fftshift<T: Copy>(data: &[T], w: usize, h: usize) -> Vec<T> {
    let mut out = data.to_vec();
    let (sx, sy) = (w / 2, h / 2);
    for y in 0..h {
        for x in 0..w {
            out[((y + sy) % h) * w + (x + sx) % w] = data[y * w + x];
        }
    }
    out
}

/// Signed frequency in cycles/sample of DFT index `k` out of `n`.
#[inline]
pub fn signed_frequency(k: usize, n: usize) -> f64 {
    let s = if k > n / 2 {
        k as isize - n as isize
    } else {
        k as isize
    };
    s as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_with_factor_n() {
        let p = Plane::from_fn(6, 5, |x, y| ((x * 3 + y * 7) % 5) as f64 * 0.1 - 0.2);
        let f = fft2(&p);
        let lhs: f64 = f.iter().map(|c| c.norm_sqr()).sum();
        let rhs = 30.0 * p.energy();
        assert!((lhs - rhs).abs() / rhs < 1e-12);
    }

    #[test]
    fn inverse_round_trip() {
        let p = Plane::from_fn(4, 6, |x, y| (x as f64).sin() + y as f64);
        let mut f = fft2(&p);
        ifft2(&mut f, 4, 6);
        for (a, b) in f.iter().zip(&p.data) {
            assert!((a.re / 24.0 - b).abs() < 1e-12 && (a.im / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_centers_dc() {
        for (w, h) in [(4, 4), (5, 3)] {
            let mut d = vec![0; w * h];
            d[0] = 1;
            let s = fftshift(&d, w, h);
            assert_eq!(s[(h / 2) * w + w / 2], 1);
        }
    }

    #[test]
    fn signed_frequencies() {
        assert_eq!(signed_frequency(0, 8), 0.0);
        assert_eq!(signed_frequency(3, 8), 0.375);
        assert_eq!(signed_frequency(4, 8), 0.5);
        assert_eq!(signed_frequency(5, 8), -0.375);
        assert_eq!(signed_frequency(2, 5), 0.4);
        assert_eq!(signed_frequency(3, 5), -0.4);
    }
}
