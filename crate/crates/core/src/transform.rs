//! The distorted Fourier transform `𝓕`, its adjoint, and the defect
//! functionals that measure isometry, inversion and intertwining.
//!
//! Both directions use trapezoidal quadrature (weights `w_i` in `x`, `u_j` in
//! `ξ`), so the discrete pair is exactly adjoint:
//! `⟨𝓕f, g⟩_ξ = ⟨f, 𝓕*g⟩_x` up to rounding.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bound_states::{point_projection, BoundStates};
use crate::error::{Result, SpectralError};
use crate::grid::GridSpec;
use crate::jost::EigenBasis;
use crate::potential::Potential;

/// Inputs must fall below this fraction of their peak at the window edge.
pub const DECAY_TOL: f64 = 1e-8;
/// `|f̃(±ξ_max)|` must fall below this fraction of `‖f‖`.
pub const FREQUENCY_TAIL_TOL: f64 = 1e-6;

/// `f̃` sampled on the ξ-grid of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub xi_grid: Vec<f64>,
    /// Zero at masked nodes.
    pub values: Vec<Complex64>,
    pub mask: Vec<bool>,
    /// Truncation radius of the `x`-window.
    pub window: f64,
}

impl TransformResult {
    /// `f̃(ξ_j)`, or `None` at a masked node.
    pub fn value(&self, j: usize) -> Option<Complex64> {
        (!self.mask[j]).then(|| self.values[j])
    }

    /// A function on the ξ-grid of `basis` given by a closure; masked nodes are left empty.
    pub fn from_fn<F: Fn(f64) -> Complex64>(basis: &EigenBasis, g: F) -> Self {
        let values = basis
            .xi_grid
            .iter()
            .enumerate()
            .map(|(j, &xi)| if basis.is_masked(j) { Complex64::new(0.0, 0.0) } else { g(xi) })
            .collect();
        Self {
            xi_grid: basis.xi_grid.clone(),
            values,
            mask: basis.exceptional_mask.clone(),
            window: window(&basis.x_grid),
        }
    }

    /// Pointwise multiplication by `m(ξ)`.
    pub fn scaled<F: Fn(f64) -> f64>(&self, m: F) -> Self {
        let values = self
            .values
            .iter()
            .zip(&self.xi_grid)
            .map(|(v, &xi)| v * m(xi))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }
}

fn window(grid: &GridSpec) -> f64 {
    grid.x_min().abs().max(grid.x_max().abs())
}

/// `‖f‖` under trapezoidal quadrature in `x`.
pub fn x_norm(grid: &GridSpec, f: &[Complex64]) -> f64 {
    f.iter()
        .zip(grid.weights())
        .map(|(v, w)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖g‖` under trapezoidal quadrature in `ξ`, masked nodes excluded.
pub fn xi_norm(basis: &EigenBasis, g: &[Complex64]) -> f64 {
    basis
        .xi_weights()
        .iter()
        .zip(g)
        .enumerate()
        .filter(|(j, _)| !basis.is_masked(*j))
        .map(|(_, (u, v))| u * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Errors if `f` has not decayed at the window edges.
pub fn check_decay(f: &[Complex64]) -> Result<()> {
    let peak = f.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let edge = f[0].norm().max(f[f.len() - 1].norm());
    if edge > DECAY_TOL * peak {
        return Err(SpectralError::NotDecayed { edge_value: edge });
    }
    Ok(())
}

fn forward_unchecked(f: &[Complex64], basis: &EigenBasis) -> TransformResult {
    let w = basis.x_weights();
    let c = (2.0 * PI).powf(-0.5);
    let fw: Vec<Complex64> = f.iter().zip(&w).map(|(v, w)| v * *w).collect();
    let values = (0..basis.n_xi())
        .into_par_iter()
        .map(|j| {
            if basis.is_masked(j) {
                return Complex64::new(0.0, 0.0);
            }
            let s: Complex64 = fw
                .iter()
                .zip(basis.column(j))
                .map(|(a, e)| a * e.conj())
                .sum();
            s * c
        })
        .collect();
    TransformResult {
        xi_grid: basis.xi_grid.clone(),
        values,
        mask: basis.exceptional_mask.clone(),
        window: window(&basis.x_grid),
    }
}

/// `f̃(ξ_j) = (2π)^{-1/2} Σ_i w_i f(x_i) conj(e(x_i, ξ_j))`.
pub fn forward(f: &[Complex64], basis: &EigenBasis) -> Result<TransformResult> {
    basis.x_grid.check_len(f.len())?;
    check_decay(f)?;
    Ok(forward_unchecked(f, basis))
}

/// `(𝓕*g)(x_i) = (2π)^{-1/2} Σ_j u_j g(ξ_j) e(x_i, ξ_j)` over unmasked nodes.
///
/// The single-integral form is valid because the tabulated eigenfunctions are
/// bounded (`sup_bound` is finite); masking restricts `ξ²` to the regular set.
pub fn adjoint(g: &TransformResult, basis: &EigenBasis) -> Result<Vec<Complex64>> {
    if g.xi_grid.len() != basis.n_xi() || g.xi_grid != basis.xi_grid {
        return Err(SpectralError::GridMismatch {
            expected: basis.n_xi(),
            actual: g.xi_grid.len(),
        });
    }
    if !basis.sup_bound.is_finite() {
        return Err(SpectralError::InvalidParameter(
            "eigenfunctions are not bounded on the window".into(),
        ));
    }
    let c = (2.0 * PI).powf(-0.5);
    let u = basis.xi_weights();
    let coeffs: Vec<(usize, Complex64)> = basis
        .active_columns()
        .filter(|&j| !g.mask[j])
        .map(|j| (j, g.values[j] * (u[j] * c)))
        .filter(|(_, a)| a.norm() != 0.0)
        .collect();
    Ok((0..basis.n_x())
        .into_par_iter()
        .map(|i| coeffs.iter().map(|(j, a)| a * basis.value(i, *j)).sum())
        .collect())
}

fn minus(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `| ‖f − P_p f‖² − ‖𝓕f‖² | / ‖f‖²`.
pub fn plancherel_defect(f: &[Complex64], basis: &EigenBasis, states: &BoundStates) -> Result<f64> {
    let ft = forward(f, basis)?;
    let norm_f = x_norm(&basis.x_grid, f);
    if norm_f == 0.0 {
        return Ok(0.0);
    }
    let n = ft.values.len();
    let tail = ft.values[0].norm().max(ft.values[n - 1].norm());
    if tail > FREQUENCY_TAIL_TOL * norm_f {
        return Err(SpectralError::FrequencyWindow { tail });
    }
    let ac = minus(f, &point_projection(states, f)?);
    let lhs = x_norm(&basis.x_grid, &ac).powi(2);
    let rhs = xi_norm(basis, &ft.values).powi(2);
    Ok((lhs - rhs).abs() / norm_f.powi(2))
}

/// `(‖𝓕𝓕*g − g‖/‖g‖ at g = 𝓕f,  ‖𝓕*𝓕f − (f − P_p f)‖/‖f‖)`.
pub fn roundtrip_defect(basis: &EigenBasis, states: &BoundStates, f: &[Complex64]) -> Result<(f64, f64)> {
    let g = forward(f, basis)?;
    let fstar_g = adjoint(&g, basis)?;
    let ffstar_g = forward_unchecked(&fstar_g, basis);
    let norm_g = xi_norm(basis, &g.values);
    let d1 = if norm_g == 0.0 {
        0.0
    } else {
        xi_norm(basis, &minus(&ffstar_g.values, &g.values)) / norm_g
    };
    let norm_f = x_norm(&basis.x_grid, f);
    let d2 = if norm_f == 0.0 {
        0.0
    } else {
        let ac = minus(f, &point_projection(states, f)?);
        x_norm(&basis.x_grid, &minus(&fstar_g, &ac)) / norm_f
    };
    Ok((d1, d2))
}

// Eighth-order centered second difference.
const D2_STENCIL: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

/// `H f = -f'' + V f` with an eighth-order centered difference; `f` is taken
/// to vanish beyond the grid.
pub fn apply_hamiltonian(pot: &Potential, grid: &GridSpec, f: &[Complex64]) -> Result<Vec<Complex64>> {
    grid.check_len(f.len())?;
    let n = f.len();
    let h2 = grid.step().powi(2);
    let v = pot.sample(grid);
    let at = |i: isize| -> Complex64 {
        if i < 0 || i >= n as isize {
            Complex64::new(0.0, 0.0)
        } else {
            f[i as usize]
        }
    };
    Ok((0..n)
        .map(|i| {
            let ii = i as isize;
            let mut d2 = f[i] * D2_STENCIL[0];
            for (s, c) in D2_STENCIL.iter().enumerate().skip(1) {
                let s = s as isize;
                d2 += (at(ii - s) + at(ii + s)) * *c;
            }
            -d2 / h2 + f[i] * v[i]
        })
        .collect())
}

/// `‖𝓕(Hf) − ξ² 𝓕f‖ / ‖ξ² 𝓕f‖` over unmasked nodes; zero for `f = 0`.
pub fn intertwining_defect(f: &[Complex64], basis: &EigenBasis) -> Result<f64> {
    let grid = &basis.x_grid;
    grid.check_len(f.len())?;
    let peak = f.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    // The stencil reaches four nodes past the edge, where f is taken as zero.
    let reach = D2_STENCIL.len() - 1;
    let edge = f[..reach]
        .iter()
        .chain(&f[f.len() - reach..])
        .fold(0.0_f64, |m, v| m.max(v.norm()));
    if edge > DECAY_TOL * peak {
        return Err(SpectralError::NotDecayed { edge_value: edge });
    }
    let hf = apply_hamiltonian(&basis.potential, grid, f)?;
    let lhs = forward_unchecked(&hf, basis);
    let rhs = forward_unchecked(f, basis).scaled(|xi| xi * xi);
    let denom = xi_norm(basis, &rhs.values);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(xi_norm(basis, &minus(&lhs.values, &rhs.values)) / denom)
}
