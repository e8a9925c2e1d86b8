//! Real potentials in L¹ ∩ L² and their certified norms.

use std::fmt;

use crate::error::{Result, SpectralError};
use crate::grid::GridSpec;

/// Below this magnitude a potential tail counts as zero; it fixes the
/// effective support radius of the analytic presets.
pub const TRUNCATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Zero,
    /// `-strength * sech²(x / width)`
    Sech2 { strength: f64, width: f64 },
    /// `-depth` on `[-half_width, half_width]`, zero outside.
    SquareWell { depth: f64, half_width: f64 },
    /// `-depth * exp(-(x / width)²)`
    GaussianWell { depth: f64, width: f64 },
    /// Linear interpolation of uniform samples on `[x0, x0 + dx * (len - 1)]`,
    /// zero outside.
    Sampled { x0: f64, dx: f64, values: Vec<f64> },
}

/// A real potential `V` together with its L¹/L² norms and effective support.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    shape: Shape,
    params: Vec<f64>,
    support_radius: f64,
    norm_l1: f64,
    norm_l2: f64,
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        if !self.params.is_empty() && !matches!(self.shape, Shape::Sampled { .. }) {
            let p: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "[{}]", p.join(","))?;
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(SpectralError::InvalidParameter(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

fn amplitude(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(SpectralError::InvalidParameter(format!(
            "{name} must be finite, got {v}"
        )));
    }
    if v.abs() <= TRUNCATION_TOL {
        return Err(SpectralError::InvalidParameter(format!(
            "{name} = {v} is below the truncation tolerance; use the zero preset"
        )));
    }
    Ok(v)
}

fn expect_params(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(SpectralError::InvalidParameter(format!(
            "{name} takes {n} parameters, got {}",
            params.len()
        )));
    }
    Ok(())
}

impl Potential {
    /// The zero potential.
    pub fn zero() -> Self {
        Self {
            shape: Shape::Zero,
            params: Vec::new(),
            support_radius: 0.0,
            norm_l1: 0.0,
            norm_l2: 0.0,
        }
    }

    /// Build a named preset.
    ///
    /// * `zero`: no parameters.
    /// * `sech2`: `[c, w]`, `V = -c sech²(x/w)`.
    /// * `square_well`: `[d, a]`, depth `d` on `[-a, a]`.
    /// * `gaussian_well`: `[d, w]`, `V = -d exp(-(x/w)²)`.
    /// * `sampled`: `[x_min, x_max, v_0, ..., v_{m-1}]`, uniform samples,
    ///   linearly interpolated and zero outside `[x_min, x_max]`.
    pub fn preset(name: &str, params: &[f64]) -> Result<Self> {
        match name {
            "zero" => {
                expect_params(name, params, 0)?;
                Ok(Self::zero())
            }
            "sech2" => {
                expect_params(name, params, 2)?;
                let strength = amplitude("strength", params[0])?;
                let width = positive("width", params[1])?;
                let support_radius =
                    width * (strength.abs() / TRUNCATION_TOL).sqrt().acosh();
                Ok(Self {
                    shape: Shape::Sech2 { strength, width },
                    params: params.to_vec(),
                    support_radius,
                    norm_l1: 2.0 * strength.abs() * width,
                    norm_l2: strength.abs() * (4.0 * width / 3.0).sqrt(),
                })
            }
            "square_well" => {
                expect_params(name, params, 2)?;
                let depth = amplitude("depth", params[0])?;
                let half_width = positive("half-width", params[1])?;
                Ok(Self {
                    shape: Shape::SquareWell { depth, half_width },
                    params: params.to_vec(),
                    support_radius: half_width,
                    norm_l1: 2.0 * half_width * depth.abs(),
                    norm_l2: depth.abs() * (2.0 * half_width).sqrt(),
                })
            }
            "gaussian_well" => {
                expect_params(name, params, 2)?;
                let depth = amplitude("depth", params[0])?;
                let width = positive("width", params[1])?;
                let support_radius = width * (depth.abs() / TRUNCATION_TOL).ln().sqrt();
                let pi = std::f64::consts::PI;
                Ok(Self {
                    shape: Shape::GaussianWell { depth, width },
                    params: params.to_vec(),
                    support_radius,
                    norm_l1: depth.abs() * width * pi.sqrt(),
                    norm_l2: depth.abs() * (width * (pi / 2.0).sqrt()).sqrt(),
                })
            }
            "sampled" => {
                if params.len() < 4 {
                    return Err(SpectralError::InvalidParameter(
                        "sampled takes x_min, x_max and at least two samples".into(),
                    ));
                }
                Self::sampled(params[0], params[1], &params[2..])
            }
            other => Err(SpectralError::UnknownPreset(other.to_string())),
        }
    }

    /// Piecewise-linear potential through uniform samples on `[x_min, x_max]`.
    pub fn sampled(x_min: f64, x_max: f64, values: &[f64]) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(SpectralError::InvalidParameter(format!(
                "sample window [{x_min}, {x_max}] is invalid"
            )));
        }
        if values.len() < 2 {
            return Err(SpectralError::InvalidParameter(
                "need at least two samples".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(SpectralError::InvalidParameter(format!(
                "non-finite sample {v}"
            )));
        }
        let dx = (x_max - x_min) / (values.len() - 1) as f64;
        let node = |k: usize| x_min + k as f64 * dx;

        // Every segment with a non-negligible endpoint belongs to the support.
        let mut support_radius = 0.0_f64;
        let mut norm_l1 = 0.0;
        let mut l2_sq = 0.0;
        for k in 0..values.len() - 1 {
            let (a, b) = (values[k], values[k + 1]);
            if a.abs() > TRUNCATION_TOL || b.abs() > TRUNCATION_TOL {
                support_radius = support_radius.max(node(k).abs()).max(node(k + 1).abs());
            }
            norm_l1 += segment_abs_integral(a, b, dx);
            l2_sq += dx * (a * a + a * b + b * b) / 3.0;
        }
        if support_radius == 0.0 {
            return Err(SpectralError::InvalidParameter(
                "all samples vanish; use the zero preset".into(),
            ));
        }
        let mut params = vec![x_min, x_max];
        params.extend_from_slice(values);
        Ok(Self {
            shape: Shape::Sampled {
                x0: x_min,
                dx,
                values: values.to_vec(),
            },
            params,
            support_radius,
            norm_l1,
            norm_l2: l2_sq.sqrt(),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self.shape {
            Shape::Zero => "zero",
            Shape::Sech2 { .. } => "sech2",
            Shape::SquareWell { .. } => "square_well",
            Shape::GaussianWell { .. } => "gaussian_well",
            Shape::Sampled { .. } => "sampled",
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, Shape::Zero)
    }

    /// Radius beyond which `|V| <= TRUNCATION_TOL`; zero for the zero potential.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn norm_l1(&self) -> f64 {
        self.norm_l1
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_l2
    }

    /// `V(x)`. Exactly zero outside the effective support.
    pub fn value(&self, x: f64) -> f64 {
        if x.abs() > self.support_radius {
            return 0.0;
        }
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::Sech2 { strength, width } => {
                let s = 1.0 / (x / width).cosh();
                -strength * s * s
            }
            Shape::SquareWell { depth, half_width } => {
                if x.abs() <= *half_width {
                    -depth
                } else {
                    0.0
                }
            }
            Shape::GaussianWell { depth, width } => -depth * (-(x / width).powi(2)).exp(),
            Shape::Sampled { x0, dx, values } => {
                let t = (x - x0) / dx;
                if t < 0.0 || t > (values.len() - 1) as f64 {
                    return 0.0;
                }
                let k = (t.floor() as usize).min(values.len() - 2);
                let s = t - k as f64;
                values[k] * (1.0 - s) + values[k + 1] * s
            }
        }
    }

    /// Samples `V(x_i)` on every grid node. A node whose cell
    /// `[x_i - h/2, x_i + h/2]` contains a jump takes the cell average of the
    /// one-sided limits, so a jump at a node gets their mean.
    pub fn sample(&self, grid: &GridSpec) -> Vec<f64> {
        let h = grid.step();
        let jumps: Vec<(f64, f64, f64)> = self
            .breakpoints()
            .into_iter()
            .map(|b| (b, self.value(b.next_down()), self.value(b.next_up())))
            .filter(|(_, l, r)| l != r)
            .collect();
        (0..grid.len())
            .map(|i| {
                let x = grid.x(i);
                match jumps.iter().find(|(b, _, _)| (x - b).abs() <= 0.5 * h) {
                    Some(&(b, left, right)) => {
                        let frac_left = ((b - (x - 0.5 * h)) / h).clamp(0.0, 1.0);
                        frac_left * left + (1.0 - frac_left) * right
                    }
                    None => self.value(x),
                }
            })
            .collect()
    }

    /// Points where `V` or `V'` jumps; ODE steps must not straddle them.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::SquareWell { half_width, .. } => vec![-half_width, *half_width],
            Shape::Sampled { x0, dx, values } => {
                (0..values.len()).map(|k| x0 + k as f64 * dx).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Infimum of `V` (never above zero, since `V` vanishes at infinity).
    pub fn min_value(&self) -> f64 {
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::Sech2 { strength, .. } => (-strength).min(0.0),
            Shape::SquareWell { depth, .. } => (-depth).min(0.0),
            Shape::GaussianWell { depth, .. } => (-depth).min(0.0),
            Shape::Sampled { values, .. } => values.iter().copied().fold(0.0, f64::min),
        }
    }

    /// `sup |V|`.
    pub fn max_abs(&self) -> f64 {
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::Sech2 { strength, .. } => strength.abs(),
            Shape::SquareWell { depth, .. } => depth.abs(),
            Shape::GaussianWell { depth, .. } => depth.abs(),
            Shape::Sampled { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Errors unless the grid strictly contains `[-R, R]`.
    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        let r = self.support_radius;
        if grid.x_min() >= -r || grid.x_max() <= r {
            return Err(SpectralError::GridTooNarrow {
                x_min: grid.x_min(),
                x_max: grid.x_max(),
                support_radius: r,
            });
        }
        Ok(())
    }
}

/// `∫ |a + (b - a) s / dx|` over one linear segment of length `dx`.
fn segment_abs_integral(a: f64, b: f64, dx: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * dx * (a.abs() + b.abs())
    } else {
        // Sign change at s = dx·|a|/(|a|+|b|); two triangles.
        0.5 * dx * (a * a + b * b) / (a.abs() + b.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_preset_has_zero_norms() {
        let v = Potential::preset("zero", &[]).unwrap();
        assert_eq!(v.norm_l1(), 0.0);
        assert_eq!(v.norm_l2(), 0.0);
        assert!(v.is_zero());
        let g = GridSpec::new(-3.0, 3.0, 31).unwrap();
        assert!(v.sample(&g).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sech2_sample_at_origin() {
        let v = Potential::preset("sech2", &[2.0, 1.0]).unwrap();
        let g = GridSpec::new(-20.0, 20.0, 401).unwrap();
        let s = v.sample(&g);
        assert_eq!(s[200], -2.0);
        assert!((v.norm_l1() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn square_well_vanishes_outside() {
        let v = Potential::preset("square_well", &[1.0, 1.0]).unwrap();
        assert_eq!(v.value(1.5), 0.0);
        assert_eq!(v.value(-1.5), 0.0);
        assert_eq!(v.value(0.3), -1.0);
        assert!((v.norm_l1() - 2.0).abs() < 1e-15);
        assert!((v.norm_l2() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn samples_near_a_jump_take_the_cell_average() {
        let v = Potential::preset("square_well", &[1.0, 1.0]).unwrap();
        let g = GridSpec::new(-5.0, 5.0, 41).unwrap();
        let s = v.sample(&g);
        assert!((s[g.nearest(1.0)] + 0.5).abs() < 1e-12);
        assert!((s[g.nearest(-1.0)] + 0.5).abs() < 1e-12);
        assert_eq!(s[g.nearest(0.5)], -1.0);
        assert_eq!(s[g.nearest(1.25)], 0.0);
        // Jump a quarter cell right of a node: three quarters of the cell lie inside.
        let g = GridSpec::new(-4.925, 5.075, 101).unwrap();
        let s = v.sample(&g);
        let i = g.nearest(0.975);
        assert!((s[i] + 0.75).abs() < 1e-12, "{}", s[i]);
    }

    #[test]
    fn rejects_bad_presets() {
        assert!(matches!(
            Potential::preset("coulomb", &[1.0]),
            Err(SpectralError::UnknownPreset(_))
        ));
        assert!(Potential::preset("sech2", &[2.0, 0.0]).is_err());
        assert!(Potential::preset("sech2", &[2.0, -1.0]).is_err());
        assert!(Potential::preset("sech2", &[f64::NAN, 1.0]).is_err());
        assert!(Potential::preset("square_well", &[1.0]).is_err());
        assert!(Potential::preset("gaussian_well", &[1.0, f64::INFINITY]).is_err());
        assert!(Potential::preset("sampled", &[0.0, 1.0, 0.0, 0.0]).is_err());
        assert!(Potential::preset("sampled", &[1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn sampled_interpolates_linearly() {
        let v = Potential::preset("sampled", &[-1.0, 1.0, 0.0, -2.0, 0.0]).unwrap();
        assert_eq!(v.value(0.0), -2.0);
        assert_eq!(v.value(-0.5), -1.0);
        assert_eq!(v.value(2.0), 0.0);
        assert_eq!(v.support_radius(), 1.0);
        assert!((v.norm_l1() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn segment_integral_handles_sign_change() {
        // |1 - 2s| on [0, 1] integrates to 1/2.
        assert!((segment_abs_integral(1.0, -1.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((segment_abs_integral(1.0, 3.0, 2.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let v = Potential::preset("sech2", &[2.0, 1.0]).unwrap();
        let g = GridSpec::new(-10.0, 10.0, 101).unwrap();
        assert!(matches!(
            v.check_grid(&g),
            Err(SpectralError::GridTooNarrow { .. })
        ));
    }
}
