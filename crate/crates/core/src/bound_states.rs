//! Point spectrum: negative eigenvalues `λ_k = -κ_k²` and their normalized
//! eigenfunctions, located by shooting.
//!
//! For trial `κ`, the solutions decaying at `+∞` and `-∞` are integrated
//! inward from the support edges to a matching point; the real Wronskian of
//! the two vanishes exactly at eigenvalues. Sign changes on a `κ` scan are
//! refined by bisection. The discrete oracle's Sturm count guards
//! completeness: on a count mismatch the oracle eigenvalues seed the
//! brackets instead.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpectralError};
use crate::grid::GridSpec;
use crate::jost::{cell_residual, schrodinger_rhs, tabulate, Side};
use crate::ode::{Dopri5, State};
use crate::oracle;
use crate::potential::Potential;

/// Eigenvalues in `(-LAMBDA_FLOOR, 0)` are treated as absent.
pub const LAMBDA_FLOOR: f64 = 1e-8;
/// Minimum gap between distinct eigenvalues.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Largest tolerated `|e_k(edge)| / max|e_k|`, i.e. a margin of `5/κ` beyond the support.
pub const TAIL_RATIO: f64 = 6.737946999085467e-3; // e^{-5}

const SCAN_POINTS: usize = 400;

/// One normalized eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub lambda: f64,
    /// Real eigenfunction on the grid, unit norm under trapezoidal quadrature,
    /// signed so that its largest-magnitude sample is positive.
    pub eigenfunction: Vec<f64>,
    /// `|‖e_k‖² - 1|` after normalization.
    pub norm_defect: f64,
    /// Normalized cell residual of `H e = λ e` (same measure as for Jost solutions).
    pub residual: f64,
}

/// The point spectrum found on one grid, sorted by ascending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStates {
    pub grid: GridSpec,
    pub states: Vec<BoundState>,
}

impl BoundStates {
    pub fn empty(grid: GridSpec) -> Self {
        Self {
            grid,
            states: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BoundState> {
        self.states.iter()
    }
}

/// Matching point: the grid node nearest the center of the support.
fn matching_node(grid: &GridSpec) -> usize {
    grid.nearest(0.0)
}

/// Integrates the solution decaying on `side` from the support edge to `x_m`.
fn decaying_state(pot: &Potential, kappa: f64, side: Side, x_m: f64) -> Result<State> {
    let r = pot.support_radius();
    let (edge, init) = match side {
        Side::Plus => (r, [Complex64::new(1.0, 0.0), Complex64::new(-kappa, 0.0)]),
        Side::Minus => (-r, [Complex64::new(1.0, 0.0), Complex64::new(kappa, 0.0)]),
    };
    if x_m == edge {
        return Ok(init);
    }
    let (lo, hi) = if edge < x_m { (edge, x_m) } else { (x_m, edge) };
    let mut stops: Vec<f64> = pot
        .breakpoints()
        .into_iter()
        .filter(|&b| b > lo && b < hi)
        .collect();
    stops.push(lo);
    stops.push(hi);
    stops.sort_by(f64::total_cmp);
    if edge > x_m {
        stops.reverse();
    }
    let out = Dopri5::default().integrate(schrodinger_rhs(pot, -kappa * kappa), &stops, init)?;
    Ok(*out.last().expect("non-empty"))
}

/// Real matching Wronskian `f₋ f₊' − f₋' f₊` at `x_m`, normalized by the
/// state magnitudes so its scale does not grow like `e^{2κR}`.
fn matching_wronskian(pot: &Potential, kappa: f64, x_m: f64) -> Result<f64> {
    let p = decaying_state(pot, kappa, Side::Plus, x_m)?;
    let m = decaying_state(pot, kappa, Side::Minus, x_m)?;
    let w = m[0].re * p[1].re - m[1].re * p[0].re;
    let np = p[0].re.hypot(p[1].re);
    let nm = m[0].re.hypot(m[1].re);
    Ok(w / (np * nm))
}

fn bisect(pot: &Potential, mut lo: f64, mut hi: f64, x_m: f64) -> Result<f64> {
    let mut w_lo = matching_wronskian(pot, lo, x_m)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * mid {
            break;
        }
        let w_mid = matching_wronskian(pot, mid, x_m)?;
        if w_mid == 0.0 {
            return Ok(mid);
        }
        if (w_mid > 0.0) == (w_lo > 0.0) {
            lo = mid;
            w_lo = w_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brackets `[κ_a, κ_b]` with a sign change of the matching Wronskian.
fn scan_brackets(pot: &Potential, kappa_lo: f64, kappa_hi: f64, x_m: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    let ks: Vec<f64> = (0..=n)
        .map(|s| kappa_lo + (kappa_hi - kappa_lo) * s as f64 / n as f64)
        .collect();
    let ws: Vec<f64> = ks
        .par_iter()
        .map(|&k| matching_wronskian(pot, k, x_m))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for s in 0..n {
        if ws[s] == 0.0 || (ws[s] > 0.0) != (ws[s + 1] > 0.0) {
            out.push((ks[s], ks[s + 1]));
        }
    }
    Ok(out)
}

/// Eigenfunction for a converged `κ`, sampled on the grid, with its residual.
fn eigenfunction(pot: &Potential, grid: &GridSpec, kappa: f64) -> Result<(Vec<f64>, f64)> {
    let r = pot.support_radius();
    let k = Complex64::new(0.0, kappa);
    let one = Complex64::new(1.0, 0.0);
    let kap = Complex64::new(kappa, 0.0);
    let plus = tabulate(pot, grid, k, Side::Plus, [one, -kap])?;
    let minus = tabulate(pot, grid, k, Side::Minus, [one, kap])?;
    let c = matching_node(grid);
    let (p, m) = (plus[c], minus[c]);
    let s = (p[0].re * m[0].re + p[1].re * m[1].re) / (m[0].re.powi(2) + m[1].re.powi(2));
    let states: Vec<State> = (0..grid.len())
        .map(|i| {
            if i >= c {
                plus[i]
            } else {
                [minus[i][0] * s, minus[i][1] * s]
            }
        })
        .collect();
    let residual = if r > 0.0 {
        cell_residual(pot, grid, -kappa * kappa, &states)
    } else {
        0.0
    };
    Ok((states.iter().map(|st| st[0].re).collect(), residual))
}

fn normalize(grid: &GridSpec, mut e: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let w = grid.weights();
    let norm = e.iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
    let peak = e.iter().copied().fold(0.0_f64, |a, v| if v.abs() > a.abs() { v } else { a });
    let sign = if peak < 0.0 { -1.0 } else { 1.0 };
    e.iter_mut().for_each(|v| *v *= sign / norm);
    let max = e.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tail = e[0].abs().max(e[e.len() - 1].abs());
    if tail > TAIL_RATIO * max {
        return Err(SpectralError::GridMarginInsufficient {
            tail_ratio: tail / max,
        });
    }
    let defect = (e.iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>() - 1.0).abs();
    Ok((e, defect))
}

/// All bound states with `λ < -LAMBDA_FLOOR`, sorted ascending.
pub fn find_bound_states(pot: &Potential, grid: &GridSpec) -> Result<BoundStates> {
    find_bound_states_with(pot, grid, SCAN_POINTS)
}

pub(crate) fn find_bound_states_with(pot: &Potential, grid: &GridSpec, scan_points: usize) -> Result<BoundStates> {
    let v_min = pot.min_value();
    if v_min >= -LAMBDA_FLOOR {
        return Ok(BoundStates::empty(*grid));
    }
    pot.check_grid(grid)?;
    let x_m = grid.x(matching_node(grid));
    let kappa_lo = LAMBDA_FLOOR.sqrt();
    let kappa_hi = (-v_min).sqrt();
    let expected = oracle::sturm_count(pot, grid, -LAMBDA_FLOOR)?;

    let brackets = scan_brackets(pot, kappa_lo, kappa_hi, x_m, scan_points)?;
    let mut found: Vec<(f64, Option<Vec<f64>>)> = Vec::new();
    if brackets.len() == expected {
        for (a, b) in brackets {
            found.push((bisect(pot, a, b, x_m)?, None));
        }
    } else {
        // Seed one bracket per oracle eigenvalue, split at midpoints.
        let (lams, vecs) = oracle::low_eigenpairs(pot, grid, -LAMBDA_FLOOR)?;
        let kappas: Vec<f64> = lams.iter().map(|l| (-l).sqrt()).collect();
        for (k, (&kappa, vec)) in kappas.iter().zip(vecs).enumerate() {
            let hi = if k == 0 { kappa_hi } else { 0.5 * (kappa + kappas[k - 1]) };
            let lo = if k + 1 == kappas.len() { kappa_lo } else { 0.5 * (kappa + kappas[k + 1]) };
            let (w_lo, w_hi) = (
                matching_wronskian(pot, lo, x_m)?,
                matching_wronskian(pot, hi, x_m)?,
            );
            if (w_lo > 0.0) != (w_hi > 0.0) {
                found.push((bisect(pot, lo, hi, x_m)?, None));
            } else {
                found.push((kappa, Some(vec)));
            }
        }
    }

    let mut states = Vec::with_capacity(found.len());
    for (kappa, fallback) in found {
        let (raw, residual) = match fallback {
            Some(v) => (v, f64::NAN),
            None => eigenfunction(pot, grid, kappa)?,
        };
        let (eigenfunction, norm_defect) = normalize(grid, raw)?;
        states.push(BoundState {
            lambda: -kappa * kappa,
            eigenfunction,
            norm_defect,
            residual,
        });
    }
    states.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for w in states.windows(2) {
        let gap = w[1].lambda - w[0].lambda;
        if gap < DEGENERACY_GAP {
            return Err(SpectralError::DegenerateSpectrum {
                lambda: w[0].lambda,
                gap,
            });
        }
    }
    Ok(BoundStates {
        grid: *grid,
        states,
    })
}

/// `⟨f, e⟩` under trapezoidal quadrature.
pub fn inner(weights: &[f64], f: &[Complex64], e: &[f64]) -> Complex64 {
    f.iter()
        .zip(e)
        .zip(weights)
        .map(|((a, b), w)| a * (b * w))
        .sum()
}

/// `P_p f = Σ_k ⟨f, e_k⟩ e_k`.
pub fn point_projection(states: &BoundStates, f: &[Complex64]) -> Result<Vec<Complex64>> {
    states.grid.check_len(f.len())?;
    let w = states.grid.weights();
    let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
    for s in &states.states {
        let c = inner(&w, f, &s.eigenfunction);
        for (o, e) in out.iter_mut().zip(&s.eigenfunction) {
            *o += c * *e;
        }
    }
    Ok(out)
}
