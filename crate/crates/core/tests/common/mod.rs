#![allow(dead_code)]

use distorted_fourier::transform::x_norm;
use distorted_fourier::GridSpec;
use num_complex::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn gaussian(grid: &GridSpec, center: f64, width: f64) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .map(|&x| c((-(x - center).powi(2) / (2.0 * width * width)).exp()))
        .collect()
}

/// `exp(1 − 1/(1 − t²))` with `t = (x − center)/radius`, zero outside.
pub fn bump(grid: &GridSpec, center: f64, radius: f64) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .map(|&x| {
            let t = (x - center) / radius;
            c(if t.abs() < 1.0 { (1.0 - 1.0 / (1.0 - t * t)).exp() } else { 0.0 })
        })
        .collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn sup(a: &[Complex64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// `‖a − b‖ / ‖reference‖` in the trapezoidal norm.
pub fn rel_l2(grid: &GridSpec, a: &[Complex64], b: &[Complex64], reference: &[Complex64]) -> f64 {
    x_norm(grid, &sub(a, b)) / x_norm(grid, reference)
}

/// Composite Simpson on `[a, b]` with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
