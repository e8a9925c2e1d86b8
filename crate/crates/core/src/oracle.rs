//! Independent ground truth: the three-point finite-difference Hamiltonian
//! with Dirichlet ends and its exact matrix functional calculus.
//!
//! Nodes `x_0 … x_{n-1}` are all unknowns; the Dirichlet zeros sit at the
//! ghost nodes `x_{-1}` and `x_n`. Eigenvectors are normalized in the
//! `h`-weighted inner product `⟨f, g⟩ = h Σ f_i conj(g_i)`, which makes the
//! discrete Parseval identity exact.

use std::os::raw::{c_char, c_int};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpectralError};
use crate::grid::GridSpec;
use crate::kernel::Multiplier;
use crate::potential::Potential;

/// Dense symmetric discretization `-D₂ + diag(V)` and its full eigendecomposition.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    pub grid: GridSpec,
    /// `2/h² + V(x_i)`.
    pub diagonal: Vec<f64>,
    /// The constant sub/super-diagonal `-1/h²`.
    pub off_diagonal: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column-major, column `m` is the eigenvector of `eigenvalues[m]`.
    eigenvectors: Vec<f64>,
}

fn bands(pot: &Potential, grid: &GridSpec) -> Result<(Vec<f64>, f64)> {
    let h = grid.step();
    let diag: Vec<f64> = pot
        .sample(grid)
        .into_iter()
        .map(|v| 2.0 / (h * h) + v)
        .collect();
    if diag.iter().any(|d| !d.is_finite()) {
        return Err(SpectralError::InvalidParameter(
            "non-finite potential sample".into(),
        ));
    }
    Ok((diag, -1.0 / (h * h)))
}

/// Assembles the finite-difference Hamiltonian and diagonalizes it (MRRR).
pub fn discretize(pot: &Potential, grid: &GridSpec) -> Result<DiscreteHamiltonian> {
    let (diagonal, off) = bands(pot, grid)?;
    let n = grid.len();
    let mut d = diagonal.clone();
    // dstemr reads n entries of the off-diagonal.
    let mut e = vec![off; n];
    let mut w = vec![0.0_f64; n];
    let mut z = vec![0.0_f64; n * n];
    let mut isuppz = vec![0 as c_int; 2 * n];
    let ni = n as c_int;
    let (jobz, range) = (b'V' as c_char, b'A' as c_char);
    let (vl, vu, il, iu) = (0.0_f64, 0.0_f64, 0 as c_int, 0 as c_int);
    let mut m: c_int = 0;
    let mut tryrac: c_int = 1;
    let mut info: c_int = 0;

    let call = |d: &mut [f64],
                e: &mut [f64],
                w: &mut [f64],
                z: &mut [f64],
                isuppz: &mut [c_int],
                m: &mut c_int,
                tryrac: &mut c_int,
                work: &mut [f64],
                lwork: c_int,
                iwork: &mut [c_int],
                liwork: c_int,
                info: &mut c_int| unsafe {
        lapack_sys::dstemr_(
            &jobz,
            &range,
            &ni,
            d.as_mut_ptr(),
            e.as_mut_ptr(),
            &vl,
            &vu,
            &il,
            &iu,
            m,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &ni,
            &ni,
            isuppz.as_mut_ptr(),
            tryrac,
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            info,
        )
    };

    // Workspace query, then the solve.
    let mut work_q = [0.0_f64];
    let mut iwork_q = [0 as c_int];
    call(
        &mut d, &mut e, &mut w, &mut z, &mut isuppz, &mut m, &mut tryrac, &mut work_q, -1,
        &mut iwork_q, -1, &mut info,
    );
    if info != 0 {
        return Err(SpectralError::Eigensolver(info));
    }
    let lwork = work_q[0] as c_int;
    let liwork = iwork_q[0];
    let mut work = vec![0.0_f64; lwork.max(1) as usize];
    let mut iwork = vec![0 as c_int; liwork.max(1) as usize];
    call(
        &mut d, &mut e, &mut w, &mut z, &mut isuppz, &mut m, &mut tryrac, &mut work, lwork,
        &mut iwork, liwork, &mut info,
    );
    if info != 0 || m as usize != n {
        return Err(SpectralError::Eigensolver(info));
    }
    let scale = 1.0 / grid.step().sqrt();
    z.iter_mut().for_each(|v| *v *= scale);
    Ok(DiscreteHamiltonian {
        grid: *grid,
        diagonal,
        off_diagonal: off,
        eigenvalues: w,
        eigenvectors: z,
    })
}

impl DiscreteHamiltonian {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Matrix entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diagonal[i]
        } else if i.abs_diff(j) == 1 {
            self.off_diagonal
        } else {
            0.0
        }
    }

    pub fn eigenvector(&self, m: usize) -> &[f64] {
        let n = self.len();
        &self.eigenvectors[m * n..(m + 1) * n]
    }

    /// `H f` for the discrete matrix.
    pub fn apply_matrix(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * f[i];
                if i > 0 {
                    s += self.off_diagonal * f[i - 1];
                }
                if i + 1 < n {
                    s += self.off_diagonal * f[i + 1];
                }
                s
            })
            .collect()
    }

    fn project(&self, m: usize, f: &[Complex64]) -> Complex64 {
        let h = self.grid.step();
        let v = self.eigenvector(m);
        f.iter().zip(v).map(|(a, b)| a * *b).sum::<Complex64>() * h
    }

    /// `⟨f, v_m⟩` for every eigenvector.
    pub fn coefficients(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.grid.check_len(f.len())?;
        Ok((0..self.len())
            .into_par_iter()
            .map(|m| self.project(m, f))
            .collect())
    }

    /// `Σ_m g(λ_m) ⟨f, v_m⟩ v_m` over eigenvalues where `g` is nonzero.
    pub fn apply_function<G>(&self, g: G, f: &[Complex64]) -> Result<Vec<Complex64>>
    where
        G: Fn(f64) -> f64 + Sync,
    {
        self.grid.check_len(f.len())?;
        let n = self.len();
        let terms: Vec<(usize, Complex64)> = (0..n)
            .into_par_iter()
            .filter_map(|m| {
                let w = g(self.eigenvalues[m]);
                (w != 0.0).then(|| (m, self.project(m, f) * w))
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in terms {
            for (o, v) in out.iter_mut().zip(self.eigenvector(m)) {
                *o += c * *v;
            }
        }
        Ok(out)
    }

    /// Exact discrete `φ(H) f`.
    pub fn functional_calculus(&self, phi: &Multiplier, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.apply_function(|l| phi.eval(l), f)
    }

    /// Projection onto eigenvectors with `λ < -floor` (the discrete point part).
    pub fn point_projection(&self, f: &[Complex64], floor: f64) -> Result<Vec<Complex64>> {
        self.apply_function(|l| if l < -floor { 1.0 } else { 0.0 }, f)
    }

    /// `f` minus its point part: the discrete surrogate of `P_ac f`.
    pub fn continuous_projection(&self, f: &[Complex64], floor: f64) -> Result<Vec<Complex64>> {
        let p = self.point_projection(f, floor)?;
        Ok(f.iter().zip(&p).map(|(a, b)| a - b).collect())
    }

    pub fn negative_count(&self, floor: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < -floor).count()
    }
}

/// Number of eigenvalues of the discrete Hamiltonian below `lambda`
/// (Sturm sequence; no diagonalization).
pub fn sturm_count(pot: &Potential, grid: &GridSpec, lambda: f64) -> Result<usize> {
    let (d, e) = bands(pot, grid)?;
    let e2 = e * e;
    let mut count = 0;
    let mut q = 1.0_f64;
    for (i, di) in d.iter().enumerate() {
        q = if i == 0 { di - lambda } else { di - lambda - e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (di.abs() + e.abs());
        }
        if q < 0.0 {
            count += 1;
        }
    }
    Ok(count)
}

/// Eigenpairs of the discrete Hamiltonian with eigenvalue `≤ upper`, without
/// the full decomposition. Vectors are `h`-normalized.
pub fn low_eigenpairs(pot: &Potential, grid: &GridSpec, upper: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let (mut d, off) = bands(pot, grid)?;
    let n = grid.len();
    let mut e = vec![off; n - 1];
    let lower = d.iter().copied().fold(f64::INFINITY, f64::min) - 2.0 * off.abs() - 1.0;
    if upper <= lower {
        return Ok((Vec::new(), Vec::new()));
    }
    let ni = n as c_int;
    let jobz = b'V' as c_char;
    let range = b'V' as c_char;
    let (il, iu): (c_int, c_int) = (0, 0);
    let abstol = 2.0 * f64::MIN_POSITIVE;
    let mut m: c_int = 0;
    let mut w = vec![0.0_f64; n];
    let count = sturm_count(pot, grid, upper)?;
    if count == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    // Room for one extra vector in case rounding moves an eigenvalue across `upper`.
    let mut z = vec![0.0_f64; n * (count + 1).min(n)];
    let ldz = ni;
    let mut work = vec![0.0_f64; 5 * n];
    let mut iwork = vec![0 as c_int; 5 * n];
    let mut ifail = vec![0 as c_int; n];
    let mut info: c_int = 0;
    unsafe {
        lapack_sys::dstevx_(
            &jobz,
            &range,
            &ni,
            d.as_mut_ptr(),
            e.as_mut_ptr(),
            &lower,
            &upper,
            &il,
            &iu,
            &abstol,
            &mut m,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &ldz,
            work.as_mut_ptr(),
            iwork.as_mut_ptr(),
            ifail.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(SpectralError::Eigensolver(info));
    }
    let m = m as usize;
    let scale = 1.0 / grid.step().sqrt();
    let vectors = (0..m)
        .map(|k| z[k * n..(k + 1) * n].iter().map(|v| v * scale).collect())
        .collect();
    w.truncate(m);
    Ok((w, vectors))
}
