//! Spectral multipliers `φ`, the integral kernel `K = K_ac + K_p` of `φ(H)`,
//! and its application.
//!
//! `K_ac` is assembled directly in the frequency variable,
//! `K_ac(x, y) = (2π)^{-1} Σ_m u_m φ(ξ_m²) e(x, ξ_m) conj(e(y, ξ_m))`,
//! over both signs of `ξ`; no change of variables to `λ = ξ²` is made.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bound_states::{inner, BoundStates};
use crate::error::{Result, SpectralError};
use crate::grid::GridSpec;
use crate::jost::EigenBasis;
use crate::transform::{adjoint, check_decay, forward, TransformResult};

/// Minimum number of ξ-nodes (both signs together) inside the support of `φ(ξ²)`.
pub const MIN_SUPPORT_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierKind {
    Tent,
    SmoothBump,
    Sampled,
}

/// A continuous, compactly supported function of the energy `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    pub kind: MultiplierKind,
    pub center: f64,
    pub radius: f64,
    /// `(λ nodes, values)` for sampled multipliers.
    samples: Option<(Vec<f64>, Vec<f64>)>,
}

impl Multiplier {
    /// `tent`: `max(0, 1 − |λ−c|/r)`; `smooth_bump`: `exp(1 − 1/(1 − ((λ−c)/r)²))`.
    pub fn preset(kind: &str, center: f64, radius: f64) -> Result<Self> {
        let kind = match kind {
            "tent" => MultiplierKind::Tent,
            "smooth_bump" => MultiplierKind::SmoothBump,
            other => return Err(SpectralError::UnknownMultiplier(other.to_string())),
        };
        if !center.is_finite() {
            return Err(SpectralError::InvalidParameter(format!(
                "multiplier center must be finite, got {center}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SpectralError::InvalidParameter(format!(
                "multiplier radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            kind,
            center,
            radius,
            samples: None,
        })
    }

    /// Piecewise-linear multiplier through `(λ_k, φ_k)`; the end values must
    /// be zero so that `φ` is continuous.
    pub fn sampled(lambdas: &[f64], values: &[f64]) -> Result<Self> {
        if lambdas.len() != values.len() || lambdas.len() < 3 {
            return Err(SpectralError::InvalidParameter(
                "sampled multiplier needs matching node/value lists of length >= 3".into(),
            ));
        }
        if lambdas.iter().chain(values).any(|v| !v.is_finite()) {
            return Err(SpectralError::InvalidParameter(
                "non-finite multiplier sample".into(),
            ));
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpectralError::InvalidParameter(
                "multiplier nodes must be strictly increasing".into(),
            ));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(SpectralError::InvalidParameter(
                "sampled multiplier must vanish at both ends".into(),
            ));
        }
        let lo = lambdas[0];
        let hi = lambdas[lambdas.len() - 1];
        Ok(Self {
            kind: MultiplierKind::Sampled,
            center: 0.5 * (lo + hi),
            radius: 0.5 * (hi - lo),
            samples: Some((lambdas.to_vec(), values.to_vec())),
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MultiplierKind::Tent => "tent",
            MultiplierKind::SmoothBump => "smooth_bump",
            MultiplierKind::Sampled => "sampled",
        }
    }

    /// Closed support `[center − radius, center + radius]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let t = (lambda - self.center) / self.radius;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        match self.kind {
            MultiplierKind::Tent => 1.0 - t.abs(),
            MultiplierKind::SmoothBump => (1.0 - 1.0 / (1.0 - t * t)).exp(),
            MultiplierKind::Sampled => {
                let (xs, ys) = self.samples.as_ref().expect("sampled multiplier has samples");
                let k = xs.partition_point(|&x| x <= lambda).clamp(1, xs.len() - 1);
                let s = (lambda - xs[k - 1]) / (xs[k] - xs[k - 1]);
                ys[k - 1] * (1.0 - s) + ys[k] * s
            }
        }
    }

    /// True when the support lies entirely at `λ ≤ 0`, so `φ(ξ²) ≡ 0`.
    pub fn misses_continuum(&self) -> bool {
        self.support().1 <= 0.0
    }
}

/// Which parts a kernel contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelParts {
    pub ac: bool,
    pub point: bool,
}

/// Dense kernel matrix `K(x_i, y_j)` on a square grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub grid: GridSpec,
    /// Row-major `n × n`.
    values: Vec<Complex64>,
    pub parts: KernelParts,
    pub quadrature_weights: Vec<f64>,
}

impl Kernel {
    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n * n],
            parts: KernelParts::default(),
            quadrature_weights: grid.weights(),
        }
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Largest `|K_ij − conj(K_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n();
        (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n).fold(0.0_f64, |m, j| m.max((self.get(i, j) - self.get(j, i).conj()).norm()))
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `K + other`.
    pub fn add(mut self, other: &Kernel) -> Result<Kernel> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch {
                expected: self.n(),
                actual: other.n(),
            });
        }
        self.values
            .par_iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a += b);
        self.parts.ac |= other.parts.ac;
        self.parts.point |= other.parts.point;
        Ok(self)
    }
}

/// Validates `φ` against the ξ-grid for the continuous part and returns the
/// contributing columns with their weights `u_m φ(ξ_m²)`.
fn continuum_columns(basis: &EigenBasis, phi: &Multiplier) -> Result<Vec<(usize, f64)>> {
    let (lo, hi) = phi.support();
    if lo <= 0.0 {
        return Err(SpectralError::MultiplierSupport(format!(
            "support [{lo}, {hi}] reaches the threshold region λ <= 0"
        )));
    }
    let step = basis.xi_step();
    let (xi_lo, xi_hi) = (lo.sqrt(), hi.sqrt());
    if xi_lo - step <= basis.xi_min() {
        return Err(SpectralError::MultiplierSupport(format!(
            "support starts at ξ = {xi_lo}, within one cell of the excluded band |ξ| < {}",
            basis.xi_min()
        )));
    }
    if xi_hi + step >= basis.xi_max() {
        return Err(SpectralError::MultiplierSupport(format!(
            "support ends at ξ = {xi_hi}, within one cell of ξ_max = {}",
            basis.xi_max()
        )));
    }
    for (j, &xi) in basis.xi_grid.iter().enumerate() {
        if basis.is_masked(j) && xi.abs() >= xi_lo - step && xi.abs() <= xi_hi + step {
            return Err(SpectralError::MultiplierSupport(format!(
                "support meets the exceptional frequency ξ = {xi} (guard band one cell)"
            )));
        }
    }
    let u = basis.xi_weights();
    let cols: Vec<(usize, f64)> = basis
        .active_columns()
        .filter_map(|j| {
            let xi = basis.xi_grid[j];
            let p = phi.eval(xi * xi);
            (p != 0.0).then(|| (j, u[j] * p))
        })
        .collect();
    if cols.len() < MIN_SUPPORT_NODES {
        return Err(SpectralError::UnderResolved {
            nodes: cols.len(),
            required: MIN_SUPPORT_NODES,
        });
    }
    Ok(cols)
}

/// `K_ac(x_i, y_j) = (2π)^{-1} Σ_m u_m φ(ξ_m²) e(x_i, ξ_m) conj(e(y_j, ξ_m))`.
pub fn kernel_ac(basis: &EigenBasis, phi: &Multiplier) -> Result<Kernel> {
    let cols = continuum_columns(basis, phi)?;
    let n = basis.n_x();
    let scale = 1.0 / (2.0 * PI);
    let mut k = Kernel::zeros(basis.x_grid);
    k.values
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            for &(m, c) in &cols {
                let a = basis.value(i, m) * (c * scale);
                for (out, e) in row.iter_mut().zip(basis.column(m)) {
                    *out += a * e.conj();
                }
            }
        });
    k.parts.ac = true;
    Ok(k)
}

/// `K_p(x_i, y_j) = Σ_k φ(λ_k) e_k(x_i) e_k(y_j)`.
pub fn kernel_point(states: &BoundStates, phi: &Multiplier, grid: &GridSpec) -> Result<Kernel> {
    if states.grid != *grid {
        return Err(SpectralError::GridMismatch {
            expected: grid.len(),
            actual: states.grid.len(),
        });
    }
    let n = grid.len();
    let mut k = Kernel::zeros(*grid);
    let active: Vec<(f64, &[f64])> = states
        .iter()
        .map(|s| (phi.eval(s.lambda), s.eigenfunction.as_slice()))
        .filter(|(p, _)| *p != 0.0)
        .collect();
    k.values
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            for (p, e) in &active {
                let a = p * e[i];
                for (out, ej) in row.iter_mut().zip(e.iter()) {
                    *out += Complex64::new(a * ej, 0.0);
                }
            }
        });
    k.parts.point = true;
    Ok(k)
}

/// Full kernel `K_ac + K_p`. The continuous part is omitted when the support
/// of `φ` lies at `λ ≤ 0`, where `φ(ξ²)` vanishes identically.
pub fn assemble_kernel(basis: &EigenBasis, states: &BoundStates, phi: &Multiplier) -> Result<Kernel> {
    let point = kernel_point(states, phi, &basis.x_grid)?;
    if phi.misses_continuum() {
        return Ok(point);
    }
    kernel_ac(basis, phi)?.add(&point)
}

/// `(φ(H) f)(x_i) = Σ_j w_j K(x_i, y_j) f(y_j)`.
pub fn apply_spectral(kernel: &Kernel, f: &[Complex64]) -> Result<Vec<Complex64>> {
    kernel.grid.check_len(f.len())?;
    check_decay(f)?;
    let fw: Vec<Complex64> = f
        .iter()
        .zip(&kernel.quadrature_weights)
        .map(|(v, w)| v * *w)
        .collect();
    Ok((0..kernel.n())
        .into_par_iter()
        .map(|i| kernel.row(i).iter().zip(&fw).map(|(k, v)| k * v).sum())
        .collect())
}

/// `𝓕*(φ(ξ²) 𝓕f) + Σ_k φ(λ_k) ⟨f, e_k⟩ e_k`: the same triple sum as
/// `apply_spectral(assemble_kernel(..), f)` with the summations reordered.
pub fn apply_via_transform(
    basis: &EigenBasis,
    states: &BoundStates,
    phi: &Multiplier,
    f: &[Complex64],
) -> Result<Vec<Complex64>> {
    if states.grid != basis.x_grid {
        return Err(SpectralError::GridMismatch {
            expected: basis.n_x(),
            actual: states.grid.len(),
        });
    }
    basis.x_grid.check_len(f.len())?;
    check_decay(f)?;
    let mut out = if phi.misses_continuum() {
        vec![Complex64::new(0.0, 0.0); f.len()]
    } else {
        continuum_columns(basis, phi)?;
        let ft = forward(f, basis)?;
        let g: TransformResult = ft.scaled(|xi| phi.eval(xi * xi));
        adjoint(&g, basis)?
    };
    let w = basis.x_weights();
    for s in states.iter() {
        let p = phi.eval(s.lambda);
        if p == 0.0 {
            continue;
        }
        let c = inner(&w, f, &s.eigenfunction) * p;
        for (o, e) in out.iter_mut().zip(&s.eigenfunction) {
            *o += c * *e;
        }
    }
    Ok(out)
}
