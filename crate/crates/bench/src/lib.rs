//! Shared fixtures for the criterion benches.

use distorted_fourier::{GridSpec, Potential};
use num_complex::Complex64;

/// `sech2(2, 1)` on `[-20, 20]` with `n` nodes.
pub fn sech2_fixture(n: usize) -> (Potential, GridSpec) {
    let pot = Potential::preset("sech2", &[2.0, 1.0]).expect("preset");
    let grid = GridSpec::new(-20.0, 20.0, n).expect("grid");
    (pot, grid)
}

pub fn gaussian(grid: &GridSpec, center: f64) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .map(|x| Complex64::new((-(x - center).powi(2) / 2.0).exp(), 0.0))
        .collect()
}
