//! Plain-text and binary artifacts.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), rows in a
//! fixed order, so identical inputs give byte-identical files. Missing values
//! (masked nodes) are written as empty fields.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::bound_states::BoundStates;
use crate::error::{Result, SpectralError};
use crate::grid::GridSpec;
use crate::jost::EigenBasis;
use crate::kernel::Kernel;
use crate::oracle::DiscreteHamiltonian;
use crate::transform::TransformResult;

/// Magic bytes of the binary kernel dump.
pub const KERNEL_MAGIC: &[u8; 4] = b"DSKL";

/// Full round-trip precision.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// `x,xi,re_e,im_e,re_T,im_T,re_R,im_R,masked`, ξ-major.
pub fn write_eigenbasis_csv<W: Write>(w: W, basis: &EigenBasis) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["x", "xi", "re_e", "im_e", "re_T", "im_T", "re_R", "im_R", "masked"])?;
    let xs = basis.x_grid.nodes();
    for (j, &xi) in basis.xi_grid.iter().enumerate() {
        let s = &basis.scattering[j];
        let masked = basis.is_masked(j);
        let (t_re, t_im, r_re, r_im) = (
            fmt_f64(s.t_coeff.re),
            fmt_f64(s.t_coeff.im),
            fmt_f64(s.r_coeff.re),
            fmt_f64(s.r_coeff.im),
        );
        let xi_s = fmt_f64(xi);
        for (i, &x) in xs.iter().enumerate() {
            let (e_re, e_im) = if masked {
                (String::new(), String::new())
            } else {
                let e = basis.value(i, j);
                (fmt_f64(e.re), fmt_f64(e.im))
            };
            out.write_record([
                fmt_f64(x),
                xi_s.clone(),
                e_re,
                e_im,
                t_re.clone(),
                t_im.clone(),
                r_re.clone(),
                r_im.clone(),
                flag(masked).to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `xi,re_T,im_T,re_R,im_R,re_W,im_W,unitarity_defect,residual,masked`.
pub fn write_scattering_csv<W: Write>(w: W, basis: &EigenBasis) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "xi",
        "re_T",
        "im_T",
        "re_R",
        "im_R",
        "re_W",
        "im_W",
        "unitarity_defect",
        "residual",
        "masked",
    ])?;
    for (j, s) in basis.scattering.iter().enumerate() {
        out.write_record([
            fmt_f64(basis.xi_grid[j]),
            fmt_f64(s.t_coeff.re),
            fmt_f64(s.t_coeff.im),
            fmt_f64(s.r_coeff.re),
            fmt_f64(s.r_coeff.im),
            fmt_f64(s.wronskian.re),
            fmt_f64(s.wronskian.im),
            fmt_f64(s.unitarity_defect()),
            fmt_f64(basis.residuals[j]),
            flag(basis.is_masked(j)).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `k,lambda,x,e_k` long format, `k` from 1.
pub fn write_bound_states_csv<W: Write>(w: W, states: &BoundStates) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["k", "lambda", "x", "e_k"])?;
    let xs = states.grid.nodes();
    for (k, s) in states.iter().enumerate() {
        let lam = fmt_f64(s.lambda);
        for (x, e) in xs.iter().zip(&s.eigenfunction) {
            out.write_record([(k + 1).to_string(), lam.clone(), fmt_f64(*x), fmt_f64(*e)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `xi,re_f,im_f,masked`.
pub fn write_transform_csv<W: Write>(w: W, t: &TransformResult) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["xi", "re_f", "im_f", "masked"])?;
    for (j, &xi) in t.xi_grid.iter().enumerate() {
        let (re, im) = match t.value(j) {
            Some(v) => (fmt_f64(v.re), fmt_f64(v.im)),
            None => (String::new(), String::new()),
        };
        out.write_record([fmt_f64(xi), re, im, flag(t.mask[j]).to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `x,re_f,im_f` for a function on a grid.
pub fn write_function_csv<W: Write>(w: W, grid: &GridSpec, f: &[Complex64]) -> Result<()> {
    grid.check_len(f.len())?;
    let mut out = writer(w);
    out.write_record(["x", "re_f", "im_f"])?;
    for (x, v) in grid.nodes().iter().zip(f) {
        out.write_record([fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im)])?;
    }
    out.flush()?;
    Ok(())
}

/// `x,y,re_K,im_K`, row-major.
pub fn write_kernel_csv<W: Write>(w: W, kernel: &Kernel) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["x", "y", "re_K", "im_K"])?;
    let xs: Vec<String> = kernel.grid.nodes().into_iter().map(fmt_f64).collect();
    for i in 0..kernel.n() {
        for (j, k) in kernel.row(i).iter().enumerate() {
            out.write_record([&xs[i], &xs[j], &fmt_f64(k.re), &fmt_f64(k.im)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `m,lambda`, `m` from 0.
pub fn write_spectrum_csv<W: Write>(w: W, hd: &DiscreteHamiltonian) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["m", "lambda"])?;
    for (m, l) in hd.eigenvalues.iter().enumerate() {
        out.write_record([m.to_string(), fmt_f64(*l)])?;
    }
    out.flush()?;
    Ok(())
}

/// 16-byte header (`DSKL`, u32 n_x, u32 n_y, u32 zero) then row-major
/// little-endian `(re, im)` pairs.
pub fn write_kernel_binary<W: Write>(mut w: W, kernel: &Kernel) -> Result<()> {
    let n = u32::try_from(kernel.n())
        .map_err(|_| SpectralError::Io("kernel too large for a u32 header".into()))?;
    let mut buf = Vec::with_capacity(16 + 16 * kernel.values().len());
    buf.extend_from_slice(KERNEL_MAGIC);
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for k in kernel.values() {
        buf.extend_from_slice(&k.re.to_le_bytes());
        buf.extend_from_slice(&k.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a binary kernel dump back as `(n_x, n_y, values)`.
pub fn read_kernel_binary<R: Read>(mut r: R) -> Result<(usize, usize, Vec<Complex64>)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..4] != KERNEL_MAGIC {
        return Err(SpectralError::Io("not a kernel dump (bad magic)".into()));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().expect("4 bytes")) as usize;
    let (nx, ny) = (word(4), word(8));
    let body = &bytes[16..];
    if body.len() != nx * ny * 16 {
        return Err(SpectralError::Io(format!(
            "kernel dump holds {} bytes, expected {}",
            body.len(),
            nx * ny * 16
        )));
    }
    let f = |k: usize| f64::from_le_bytes(body[k..k + 8].try_into().expect("8 bytes"));
    let values = (0..nx * ny)
        .map(|m| Complex64::new(f(16 * m), f(16 * m + 8)))
        .collect();
    Ok((nx, ny, values))
}
