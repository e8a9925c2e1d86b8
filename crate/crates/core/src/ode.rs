//! Adaptive Dormand–Prince 5(4) integrator for complex first-order systems
//! `y' = F(x, y)` with `y = (f, f')`.

use num_complex::Complex64;

use crate::error::{Result, SpectralError};

/// `(f, f')`.
pub type State = [Complex64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            out[0] += k[0] * (h * c);
            out[1] += k[1] * (h * c);
        }
    }
    out
}

/// Adaptive explicit 5(4) pair with FSAL and standard step-size control.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// Largest allowed step (absolute length).
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-10,
            max_steps: 2_000_000,
            h_max: 0.5,
        }
    }
}

impl Dopri5 {
    /// Integrates through the monotone sequence `stops`, starting from `y0`
    /// at `stops[0]`, and returns the state at every stop.
    ///
    /// Steps never straddle a stop, so discontinuities in `F` placed at
    /// stops are handled without order loss.
    pub fn integrate<F>(&self, rhs: F, stops: &[f64], y0: State) -> Result<Vec<State>>
    where
        F: Fn(f64, &State) -> State,
    {
        let mut out = Vec::with_capacity(stops.len());
        out.push(y0);
        if stops.len() < 2 {
            return Ok(out);
        }
        let dir = if stops[stops.len() - 1] >= stops[0] { 1.0 } else { -1.0 };

        let mut x = stops[0];
        let mut y = y0;
        let mut k1 = rhs(x, &y);
        let mut h = self.initial_step(&y, &k1).min(self.h_max);
        let mut steps = 0usize;

        for &target in &stops[1..] {
            if (target - x) * dir < 0.0 {
                return Err(SpectralError::Integration {
                    x: target,
                    reason: "stops are not monotone".into(),
                });
            }
            // Segment ends are evaluated one ulp inside, so a jump in `F`
            // at a stop is seen from the correct side.
            let start = x;
            let inside = |xs: f64| -> f64 {
                if xs == start {
                    nudge(xs, dir)
                } else if xs == target {
                    nudge(xs, -dir)
                } else {
                    xs
                }
            };
            if target != start {
                k1 = rhs(inside(x), &y);
            }
            while (target - x) * dir > 0.0 {
                steps += 1;
                if steps > self.max_steps {
                    return Err(SpectralError::Integration {
                        x,
                        reason: "step budget exhausted".into(),
                    });
                }
                let remaining = (target - x).abs();
                let last = h >= remaining;
                let step = if last { remaining } else { h };
                let hs = dir * step;

                let k2 = rhs(inside(x + C2 * hs), &axpy(&y, &[(A21, &k1)], hs));
                let k3 = rhs(inside(x + C3 * hs), &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
                let k4 = rhs(
                    inside(x + C4 * hs),
                    &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs),
                );
                let k5 = rhs(
                    inside(x + C5 * hs),
                    &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs),
                );
                let k6 = rhs(
                    inside(x + hs),
                    &axpy(
                        &y,
                        &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                        hs,
                    ),
                );
                let y_new = axpy(
                    &y,
                    &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                    hs,
                );
                let x_new = if last { target } else { x + hs };
                let k7 = rhs(inside(x_new), &y_new);

                let mut err = 0.0_f64;
                for c in 0..2 {
                    let e = (k1[c] * E1 + k3[c] * E3 + k4[c] * E4 + k5[c] * E5 + k6[c] * E6
                        + k7[c] * E7)
                        * hs;
                    let scale = self.atol + self.rtol * y[c].norm().max(y_new[c].norm());
                    err = err.max(e.norm() / scale);
                }
                if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
                    return Err(SpectralError::Integration {
                        x,
                        reason: "non-finite state".into(),
                    });
                }

                if err <= 1.0 {
                    x = x_new;
                    y = y_new;
                    k1 = k7;
                    let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // A truncated final step says nothing about the natural step size.
                    if !last {
                        h = (step * fac).min(self.h_max);
                    } else {
                        h = h.max(step * fac).min(self.h_max);
                    }
                } else {
                    h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                    if h < 1e-14 * x.abs().max(1.0) {
                        return Err(SpectralError::Integration {
                            x,
                            reason: "step size underflow".into(),
                        });
                    }
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    fn initial_step(&self, y: &State, dy: &State) -> f64 {
        let ny = y[0].norm().max(y[1].norm());
        let nd = dy[0].norm().max(dy[1].norm());
        if nd == 0.0 {
            return 1e-3;
        }
        (0.01 * ny.max(self.atol) / nd).clamp(1e-6, 1e-1)
    }
}

fn nudge(x: f64, dir: f64) -> f64 {
    if dir > 0.0 {
        x.next_up()
    } else {
        x.next_down()
    }
}

/// Fixed-step classical RK4 from `x0` to `x1` using `n` equal substeps.
/// The endpoints are evaluated one ulp inside `[x0, x1]`.
pub fn rk4_fixed<F>(rhs: F, x0: f64, x1: f64, y0: State, n: usize) -> State
where
    F: Fn(f64, &State) -> State,
{
    let h = (x1 - x0) / n as f64;
    let dir = h.signum();
    let mut y = y0;
    for s in 0..n {
        let x = x0 + s as f64 * h;
        let xa = if s == 0 { nudge(x0, dir) } else { x };
        let xb = if s + 1 == n { nudge(x1, -dir) } else { x + h };
        let k1 = rhs(xa, &y);
        let k2 = rhs(x + 0.5 * h, &axpy(&y, &[(0.5, &k1)], h));
        let k3 = rhs(x + 0.5 * h, &axpy(&y, &[(0.5, &k2)], h));
        let k4 = rhs(xb, &axpy(&y, &[(1.0, &k3)], h));
        y = axpy(
            &y,
            &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
            h,
        );
    }
    y
}
