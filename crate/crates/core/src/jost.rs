//! Jost solutions, scattering coefficients and the tabulated family of
//! generalized eigenfunctions `e(x, ξ)`.
//!
//! Outside `[-R, R]` (R = support radius) the potential is zero and every
//! solution is an exact combination of `e^{±ikx}`; the ODE is integrated only
//! across the support, starting from the free side of each Jost solution.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpectralError};
use crate::grid::{trapezoid_weights, GridSpec};
use crate::ode::{rk4_fixed, Dopri5, State};
use crate::potential::Potential;

/// Bound on the normalized cell residual of a tabulated solution (scaled by `1 + ξ²`).
pub const RESIDUAL_TOL: f64 = 1e-7;
/// Bound on `||T|² + |R|² - 1|`.
pub const UNITARITY_TOL: f64 = 1e-6;
/// Frequencies with `|W(ξ)| < WRONSKIAN_TOL · max(1, |ξ|)` are exceptional.
pub const WRONSKIAN_TOL: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which end of the line a Jost solution is normalized at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `f₊ ~ e^{ikx}` as `x → +∞`.
    Plus,
    /// `f₋ ~ e^{-ikx}` as `x → -∞`.
    Minus,
}

/// A Jost solution tabulated on a grid.
#[derive(Debug, Clone)]
pub struct JostSolution {
    pub side: Side,
    pub xi: f64,
    pub grid: GridSpec,
    pub support_radius: f64,
    pub values: Vec<Complex64>,
    pub derivative_values: Vec<Complex64>,
    /// Largest cell residual of `-f'' + (V - ξ²) f = 0`, relative to `max(1, max|f|)`.
    pub ode_residual: f64,
}

/// Scattering amplitudes of the distorted plane wave `e(·, ξ)`.
///
/// For `ξ > 0` the wave is incident from the left, for `ξ < 0` from the right;
/// `r_coeff` is the reflection seen by that wave and `r_opposite` the one for
/// the other incidence direction. `wronskian` is `W(|ξ|) = 2i|ξ| / T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringData {
    pub xi: f64,
    pub t_coeff: Complex64,
    pub r_coeff: Complex64,
    pub r_opposite: Complex64,
    pub wronskian: Complex64,
}

impl ScatteringData {
    /// `|T|² + |R|² - 1`.
    pub fn unitarity_defect(&self) -> f64 {
        self.t_coeff.norm_sqr() + self.r_coeff.norm_sqr() - 1.0
    }
}

/// Exceptional threshold for the Wronskian at frequency `xi`.
pub fn wronskian_threshold(xi: f64) -> f64 {
    WRONSKIAN_TOL * xi.abs().max(1.0)
}

/// Free propagation with complex wavenumber `k` (energy `k²`):
/// `f(x) = A e^{ik(x-x₀)} + B e^{-ik(x-x₀)}` matched to `(f, f')` at `x₀`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FreeWave {
    k: Complex64,
}

impl FreeWave {
    pub(crate) fn new(k: Complex64) -> Self {
        Self { k }
    }

    /// Amplitudes `(A, B)` of `e^{±ik(x - x₀)}` for the state at `x₀`.
    pub(crate) fn amplitudes(&self, state: &State) -> (Complex64, Complex64) {
        let ik = I * self.k;
        let a = 0.5 * (state[0] + state[1] / ik);
        let b = 0.5 * (state[0] - state[1] / ik);
        (a, b)
    }

    pub(crate) fn extend(&self, x0: f64, state: &State, x: f64) -> State {
        let ik = I * self.k;
        let (a, b) = self.amplitudes(state);
        let ep = (ik * (x - x0)).exp();
        let em = (-ik * (x - x0)).exp();
        [a * ep + b * em, ik * (a * ep - b * em)]
    }
}

pub(crate) fn schrodinger_rhs(pot: &Potential, energy: f64) -> impl Fn(f64, &State) -> State + '_ {
    move |x, y| [y[1], y[0] * (pot.value(x) - energy)]
}

/// Ordered stops from `from` to `to` (exclusive of nothing): the two ends, the
/// grid nodes strictly between them, and the breakpoints of `V` in between.
/// Returns the stops and, for each stop, the grid node index it represents.
fn sweep_stops(
    pot: &Potential,
    grid: &GridSpec,
    from: f64,
    to: f64,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let mut pts: Vec<(f64, Option<usize>)> = Vec::new();
    pts.push((lo, None));
    pts.push((hi, None));
    for i in 0..grid.len() {
        let x = grid.x(i);
        if x > lo && x < hi {
            pts.push((x, Some(i)));
        }
    }
    for b in pot.breakpoints() {
        if b > lo && b < hi {
            pts.push((b, None));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Merge coincident points, keeping the node tag.
    let mut merged: Vec<(f64, Option<usize>)> = Vec::with_capacity(pts.len());
    for p in pts {
        match merged.last_mut() {
            Some(last) if (p.0 - last.0).abs() <= 1e-13 * p.0.abs().max(1.0) => {
                if last.1.is_none() {
                    last.1 = p.1;
                }
            }
            _ => merged.push(p),
        }
    }
    if from > to {
        merged.reverse();
    }
    merged.into_iter().unzip()
}

/// States of the solution that equals `edge_state` at the support edge on
/// `side`, at every grid node. `k` is the (possibly imaginary) wavenumber.
pub(crate) fn tabulate(
    pot: &Potential,
    grid: &GridSpec,
    k: Complex64,
    side: Side,
    edge_state: State,
) -> Result<Vec<State>> {
    let r = pot.support_radius();
    let energy = (k * k).re;
    let (edge, far) = match side {
        Side::Plus => (r, -r),
        Side::Minus => (-r, r),
    };
    let (stops, tags) = sweep_stops(pot, grid, edge, far);
    let states = if r > 0.0 {
        Dopri5::default().integrate(schrodinger_rhs(pot, energy), &stops, edge_state)?
    } else {
        vec![edge_state]
    };
    let far_state = *states.last().expect("at least the edge state");

    let free = FreeWave::new(k);
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; grid.len()];
    let mut inside = vec![false; grid.len()];
    for (s, tag) in states.iter().zip(&tags) {
        if let Some(i) = *tag {
            out[i] = *s;
            inside[i] = true;
        }
    }
    for (i, state) in out.iter_mut().enumerate() {
        if inside[i] {
            continue;
        }
        let x = grid.x(i);
        let on_edge_side = match side {
            Side::Plus => x >= edge,
            Side::Minus => x <= edge,
        };
        *state = if on_edge_side {
            free.extend(edge, &edge_state, x)
        } else {
            free.extend(far, &far_state, x)
        };
    }
    Ok(out)
}

/// Largest normalized cell residual of a tabulated solution.
///
/// Each grid cell touching the support is re-propagated from its left state
/// with an independent fine fixed-step RK4; the mismatch at the right node is
/// converted into the equivalent constant forcing of `-f'' + (V - E) f`,
/// i.e. the cell average of the residual of the equation.
pub(crate) fn cell_residual(pot: &Potential, grid: &GridSpec, energy: f64, states: &[State]) -> f64 {
    let r = pot.support_radius();
    if r == 0.0 {
        return 0.0;
    }
    let h = grid.step();
    let k_loc = (energy.abs() + pot.max_abs()).sqrt().max(1e-3);
    let rhs = schrodinger_rhs(pot, energy);
    let mut splits = pot.breakpoints();
    splits.push(-r);
    splits.push(r);
    let scale = states
        .iter()
        .fold(1.0_f64, |m, s| m.max(s[0].norm()));

    let mut worst = 0.0_f64;
    for i in 0..grid.len() - 1 {
        let (a, b) = (grid.x(i), grid.x(i + 1));
        if b <= -r || a >= r {
            continue;
        }
        let mut pts: Vec<f64> = splits.iter().copied().filter(|&p| p > a && p < b).collect();
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        let mut y = states[i];
        let mut x = a;
        for p in pts {
            let n = ((p - x) * k_loc / 0.004).ceil().max(1.0) as usize;
            y = rk4_fixed(&rhs, x, p, y, n);
            x = p;
        }
        let df = (states[i + 1][0] - y[0]).norm();
        let dd = (states[i + 1][1] - y[1]).norm();
        worst = worst.max(2.0 * df / (h * h) + dd / h);
    }
    worst / scale
}

/// Jost solution `f₊` or `f₋` at real frequency `xi ≠ 0`.
pub fn solve_jost(pot: &Potential, xi: f64, grid: &GridSpec, side: Side) -> Result<JostSolution> {
    if !(xi.is_finite() && xi != 0.0) {
        return Err(SpectralError::InvalidParameter(format!(
            "Jost frequency must be finite and nonzero, got {xi}"
        )));
    }
    pot.check_grid(grid)?;
    let r = pot.support_radius();
    let k = Complex64::new(xi, 0.0);
    let edge_state = match side {
        Side::Plus => {
            let e = (I * xi * r).exp();
            [e, I * xi * e]
        }
        Side::Minus => {
            let e = (I * xi * r).exp(); // e^{-iξ(-R)}
            [e, -I * xi * e]
        }
    };
    let states = tabulate(pot, grid, k, side, edge_state)?;
    let ode_residual = cell_residual(pot, grid, xi * xi, &states);
    let (values, derivative_values) = states.iter().map(|s| (s[0], s[1])).unzip();
    Ok(JostSolution {
        side,
        xi,
        grid: *grid,
        support_radius: r,
        values,
        derivative_values,
        ode_residual,
    })
}

/// Transmission/reflection data from the pair `(f₊, f₋)` at the same frequency.
///
/// `W = f₋ f₊' − f₋' f₊` is read at the grid node nearest the window
/// center and `T = 2iξ / W`. Reflection amplitudes come from decomposing
/// `f₊` into `e^{±iξx}` on the far left and `f₋` on the far right.
/// For negative `xi` the data are mirrored so that they describe the
/// right-incident wave at `|ξ|`.
pub fn scattering_coefficients(fp: &JostSolution, fm: &JostSolution) -> Result<ScatteringData> {
    if fp.side != Side::Plus || fm.side != Side::Minus {
        return Err(SpectralError::InvalidParameter(
            "expected (f₊, f₋) in that order".into(),
        ));
    }
    if fp.xi != fm.xi || fp.xi == 0.0 {
        return Err(SpectralError::InvalidParameter(format!(
            "frequency mismatch: {} vs {}",
            fp.xi, fm.xi
        )));
    }
    if fp.grid != fm.grid {
        return Err(SpectralError::GridMismatch {
            expected: fp.grid.len(),
            actual: fm.grid.len(),
        });
    }
    let xi = fp.xi;
    let grid = fp.grid;
    let c = grid.nearest(0.5 * (grid.x_min() + grid.x_max()));
    let w = fm.values[c] * fp.derivative_values[c] - fm.derivative_values[c] * fp.values[c];
    if w.norm() < wronskian_threshold(xi) {
        return Err(SpectralError::ExceptionalFrequency {
            xi,
            wronskian_abs: w.norm(),
        });
    }
    let t = 2.0 * I * xi / w;

    let free = FreeWave::new(Complex64::new(xi, 0.0));
    // f₊ = A e^{iξx} + B e^{-iξx} left of the support.
    let left = 0;
    let (a, b) = free.amplitudes(&[fp.values[left], fp.derivative_values[left]]);
    let r_left = b / a * (2.0 * I * xi * grid.x(left)).exp();
    // f₋ = C e^{-iξx} + D e^{iξx} right of the support.
    let right = grid.len() - 1;
    let (d, cc) = free.amplitudes(&[fm.values[right], fm.derivative_values[right]]);
    let r_right = d / cc * (-2.0 * I * xi * grid.x(right)).exp();

    if xi > 0.0 {
        Ok(ScatteringData {
            xi,
            t_coeff: t,
            r_coeff: r_left,
            r_opposite: r_right,
            wronskian: w,
        })
    } else {
        // Real V: data at -ξ are the conjugates of those at ξ.
        Ok(ScatteringData {
            xi,
            t_coeff: t.conj(),
            r_coeff: r_right.conj(),
            r_opposite: r_left.conj(),
            wronskian: w.conj(),
        })
    }
}

/// Column data for one `|ξ|`: the two Jost solutions and their scattering data.
struct Column {
    data: ScatteringData,
    plus: JostSolution,
    minus: JostSolution,
}

fn solve_column(pot: &Potential, k: f64, grid: &GridSpec) -> Result<Column> {
    let plus = solve_jost(pot, k, grid, Side::Plus)?;
    let minus = solve_jost(pot, k, grid, Side::Minus)?;
    let data = scattering_coefficients(&plus, &minus)?;
    Ok(Column { data, plus, minus })
}

/// `e(x, ξ)` on the grid: `T f₊(·, ξ)` for `ξ > 0` and `T f₋(·, |ξ|)` for `ξ < 0`,
/// so that `V = 0` gives `e^{iξx}`.
pub fn generalized_eigenfunction(pot: &Potential, xi: f64, grid: &GridSpec) -> Result<Vec<Complex64>> {
    let col = solve_column(pot, xi.abs(), grid)?;
    let t = col.data.t_coeff;
    let src = if xi > 0.0 { &col.plus } else { &col.minus };
    Ok(src.values.iter().map(|v| t * v).collect())
}

/// Symmetric frequency grid: `n` (even) uniform nodes on `[-ξ_max, ξ_max]`,
/// which never contains `ξ = 0`.
pub fn xi_nodes(xi_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(xi_max.is_finite() && xi_max > 0.0) {
        return Err(SpectralError::InvalidParameter(format!(
            "xi_max must be positive, got {xi_max}"
        )));
    }
    if n < 2 || n % 2 != 0 {
        return Err(SpectralError::InvalidParameter(format!(
            "n_xi must be even and at least 2, got {n}"
        )));
    }
    let d = 2.0 * xi_max / (n - 1) as f64;
    Ok((0..n)
        .map(|j| {
            // Mirror the upper half so the grid is exactly symmetric.
            if j < n / 2 {
                -xi_max + j as f64 * d
            } else {
                xi_max - (n - 1 - j) as f64 * d
            }
        })
        .collect())
}

/// Tabulated generalized eigenfunctions on an `(x, ξ)` lattice.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub potential: Potential,
    pub x_grid: GridSpec,
    pub xi_grid: Vec<f64>,
    /// Column-major: `values[j * n_x + i] = e(x_i, ξ_j)`; masked columns are zero.
    values: Vec<Complex64>,
    pub scattering: Vec<ScatteringData>,
    pub exceptional_mask: Vec<bool>,
    /// Normalized cell residual per column (zero for masked columns).
    pub residuals: Vec<f64>,
    pub sup_bound: f64,
}

impl EigenBasis {
    pub fn n_x(&self) -> usize {
        self.x_grid.len()
    }

    pub fn n_xi(&self) -> usize {
        self.xi_grid.len()
    }

    pub fn xi_step(&self) -> f64 {
        self.xi_grid[1] - self.xi_grid[0]
    }

    /// Smallest positive node.
    pub fn xi_min(&self) -> f64 {
        self.xi_grid[self.n_xi() / 2]
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_grid[self.n_xi() - 1]
    }

    /// Trapezoidal weights on the ξ-grid.
    pub fn xi_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_xi(), self.xi_step())
    }

    pub fn x_weights(&self) -> Vec<f64> {
        self.x_grid.weights()
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        let n = self.n_x();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.n_x() + i]
    }

    pub fn is_masked(&self, j: usize) -> bool {
        self.exceptional_mask[j]
    }

    pub fn masked_count(&self) -> usize {
        self.exceptional_mask.iter().filter(|&&m| m).count()
    }

    /// Indices of columns that carry data.
    pub fn active_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_xi()).filter(move |&j| !self.exceptional_mask[j])
    }
}

/// Solves every column of the lattice. Exceptional frequencies are masked;
/// other failures abort the build.
pub fn build_eigenbasis(pot: &Potential, grid: &GridSpec, xi_max: f64, n_xi: usize) -> Result<EigenBasis> {
    pot.check_grid(grid)?;
    let xi_grid = xi_nodes(xi_max, n_xi)?;
    let half = n_xi / 2;
    let n_x = grid.len();

    // Column j (upper half) and its mirror n_xi-1-j share one pair of Jost solves.
    let solved: Vec<Result<Option<Column>>> = xi_grid[half..]
        .par_iter()
        .map(|&k| match solve_column(pot, k, grid) {
            Ok(c) => Ok(Some(c)),
            Err(SpectralError::ExceptionalFrequency { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();

    let zero = Complex64::new(0.0, 0.0);
    let mut values = vec![zero; n_x * n_xi];
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut scattering = vec![
        ScatteringData {
            xi: 0.0,
            t_coeff: nan,
            r_coeff: nan,
            r_opposite: nan,
            wronskian: nan,
        };
        n_xi
    ];
    let mut mask = vec![false; n_xi];
    let mut residuals = vec![0.0; n_xi];
    let mut sup_bound = 0.0_f64;

    for (m, col) in solved.into_iter().enumerate() {
        let jp = half + m;
        let jm = half - 1 - m;
        scattering[jp].xi = xi_grid[jp];
        scattering[jm].xi = xi_grid[jm];
        let Some(col) = col? else {
            mask[jp] = true;
            mask[jm] = true;
            continue;
        };
        let t = col.data.t_coeff;
        for (i, v) in col.plus.values.iter().enumerate() {
            let e = t * v;
            sup_bound = sup_bound.max(e.norm());
            values[jp * n_x + i] = e;
        }
        for (i, v) in col.minus.values.iter().enumerate() {
            let e = t * v;
            sup_bound = sup_bound.max(e.norm());
            values[jm * n_x + i] = e;
        }
        scattering[jp] = col.data;
        scattering[jm] = ScatteringData {
            xi: xi_grid[jm],
            t_coeff: t,
            r_coeff: col.data.r_opposite,
            r_opposite: col.data.r_coeff,
            wronskian: col.data.wronskian,
        };
        residuals[jp] = col.plus.ode_residual;
        residuals[jm] = col.minus.ode_residual;
    }

    if mask.iter().all(|&m| m) {
        return Err(SpectralError::AllMasked);
    }
    Ok(EigenBasis {
        potential: pot.clone(),
        x_grid: *grid,
        xi_grid,
        values,
        scattering,
        exceptional_mask: mask,
        residuals,
        sup_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(-20.0, 20.0, 801).unwrap()
    }

    #[test]
    fn free_jost_is_plane_wave() {
        let v = Potential::zero();
        let g = grid();
        let f = solve_jost(&v, 1.0, &g, Side::Plus).unwrap();
        for (i, val) in f.values.iter().enumerate() {
            assert!((val - (I * g.x(i)).exp()).norm() < 1e-13);
        }
        assert_eq!(f.ode_residual, 0.0);
    }

    #[test]
    fn free_scattering_is_trivial() {
        let v = Potential::zero();
        let g = grid();
        let fp = solve_jost(&v, 1.0, &g, Side::Plus).unwrap();
        let fm = solve_jost(&v, 1.0, &g, Side::Minus).unwrap();
        let s = scattering_coefficients(&fp, &fm).unwrap();
        assert!((s.t_coeff - 1.0).norm() < 1e-13);
        assert!(s.r_coeff.norm() < 1e-13);
        assert!((s.wronskian - 2.0 * I).norm() < 1e-13);
    }

    #[test]
    fn rejects_zero_frequency_and_mismatched_pairs() {
        let v = Potential::zero();
        let g = grid();
        assert!(solve_jost(&v, 0.0, &g, Side::Plus).is_err());
        let fp = solve_jost(&v, 1.0, &g, Side::Plus).unwrap();
        let fm = solve_jost(&v, 2.0, &g, Side::Minus).unwrap();
        assert!(scattering_coefficients(&fp, &fm).is_err());
        assert!(scattering_coefficients(&fm, &fp).is_err());
    }

    #[test]
    fn xi_grid_is_symmetric_and_excludes_zero() {
        let xs = xi_nodes(8.0, 256).unwrap();
        assert_eq!(xs.len(), 256);
        assert_eq!(xs[0], -8.0);
        assert_eq!(xs[255], 8.0);
        for j in 0..128 {
            assert_eq!(xs[j], -xs[255 - j]);
        }
        assert!(xs.iter().all(|&x| x != 0.0));
        assert!(xi_nodes(8.0, 255).is_err());
        assert!(xi_nodes(-1.0, 8).is_err());
    }

    #[test]
    fn free_wave_extension_is_exact_for_decay() {
        let kappa = 1.3;
        let w = FreeWave::new(Complex64::new(0.0, kappa));
        let s = [Complex64::new(1.0, 0.0), Complex64::new(-kappa, 0.0)];
        let y = w.extend(0.0, &s, 10.0);
        assert!((y[0].re - (-kappa * 10.0f64).exp()).abs() < 1e-18);
    }
}
