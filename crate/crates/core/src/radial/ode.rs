//! Dormand-Prince 5(4) integrator for `y'' = q(r) y`, written as the first
//! order system `(y, y')`. The state is renormalised whenever it grows or
//! shrinks past fixed bounds; the accumulated logarithmic scale is tracked.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;
const MAX_STEPS: usize = 2_000_000;

/// State at the end of an integration. The true solution is
/// `(y, dy) * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeEnd {
    pub y: f64,
    pub dy: f64,
    pub log_scale: f64,
    /// Sign changes of `y` along the path.
    pub nodes: usize,
}

/// A recorded sample; the true value is `y * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSample {
    pub r: f64,
    pub y: f64,
    pub dy: f64,
    pub log_scale: f64,
}

pub struct Integrator<Q: Fn(f64) -> f64> {
    q: Q,
    pub rtol: f64,
}

impl<Q: Fn(f64) -> f64> Integrator<Q> {
    pub fn new(q: Q, rtol: f64) -> Self {
        Self { q, rtol }
    }

    fn rhs(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        [y[1], (self.q)(r) * y[0]]
    }

    /// Integrates from `r0` to `r1` (either direction), recording the state at
    /// each of `outputs`, which must be ordered along the direction of travel.
    #[allow(clippy::too_many_arguments)]
    pub fn run(
        &self,
        r0: f64,
        r1: f64,
        y0: [f64; 2],
        initial_log_scale: f64,
        h0: f64,
        outputs: &[f64],
        samples: &mut Vec<OdeSample>,
    ) -> Result<OdeEnd> {
        let dir = if r1 >= r0 { 1.0 } else { -1.0 };
        let mut r = r0;
        let mut y = y0;
        let mut log_scale = initial_log_scale;
        let mut h = h0.abs().max(1e-14 * r0.abs().max(r1.abs())) * dir;
        let mut nodes = 0usize;
        let mut next_out = 0usize;
        while next_out < outputs.len() && (outputs[next_out] - r0) * dir <= 0.0 {
            samples.push(OdeSample {
                r: outputs[next_out],
                y: y[0],
                dy: y[1],
                log_scale,
            });
            next_out += 1;
        }
        let mut steps = 0usize;
        while (r1 - r) * dir > 0.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::InvalidParameter(format!(
                    "step limit exceeded integrating to r = {r1:.6e}"
                )));
            }
            let mut target = r1;
            if next_out < outputs.len() && (outputs[next_out] - r) * dir < (target - r) * dir {
                target = outputs[next_out];
            }
            let mut hit = false;
            if (r + h - target) * dir >= 0.0 {
                h = target - r;
                hit = true;
            }
            let (y_new, err) = self.step(r, y, h);
            if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
                h *= 0.25;
                if h.abs() < 1e-300 {
                    return Err(Error::Overflow { r });
                }
                continue;
            }
            if err <= 1.0 {
                if y[0] != 0.0 && y_new[0] != 0.0 && y[0].signum() != y_new[0].signum() {
                    nodes += 1;
                }
                r = if hit { target } else { r + h };
                y = y_new;
                let size = y[0].abs().max(y[1].abs());
                if size > RESCALE_HIGH || (size < RESCALE_LOW && size > 0.0) {
                    y = [y[0] / size, y[1] / size];
                    log_scale += size.ln();
                }
                while next_out < outputs.len() && (outputs[next_out] - r) * dir <= 0.0 {
                    samples.push(OdeSample {
                        r: outputs[next_out],
                        y: y[0],
                        dy: y[1],
                        log_scale,
                    });
                    next_out += 1;
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        }
        Ok(OdeEnd {
            y: y[0],
            dy: y[1],
            log_scale,
            nodes,
        })
    }

    fn step(&self, r: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64) {
        let mut k = [[0.0f64; 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = self.rhs(r + C[s] * h, ys);
        }
        let mut y5 = y;
        let mut e = [0.0f64; 2];
        for s in 0..7 {
            for i in 0..2 {
                y5[i] += h * B5[s] * k[s][i];
                e[i] += h * (B5[s] - B4[s]) * k[s][i];
            }
        }
        let s1 = y[0].abs().max(y5[0].abs());
        let s2 = y[1].abs().max(y5[1].abs());
        let sc1 = self.rtol * (s1 + 1e-3 * h.abs() * s2) + f64::MIN_POSITIVE;
        let sc2 = self.rtol * (s2 + 1e-3 * s1 / h.abs()) + f64::MIN_POSITIVE;
        (y5, (e[0].abs() / sc1).max(e[1].abs() / sc2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillation() {
        // y'' = -y, y(0) = 0, y'(0) = 1 => sin
        let ig = Integrator::new(|_| -1.0, 1e-12);
        let mut s = Vec::new();
        let end = ig.run(0.0, 10.0, [0.0, 1.0], 0.0, 1e-3, &[1.0, 5.0], &mut s).unwrap();
        assert!((end.y - 10f64.sin()).abs() < 1e-9);
        assert!((end.dy - 10f64.cos()).abs() < 1e-9);
        assert_eq!(end.nodes, 3);
        assert_eq!(s.len(), 2);
        assert!((s[1].y - 5f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn rescaling_keeps_growth() {
        // y'' = y, y = e^r; grows past the rescale threshold
        let ig = Integrator::new(|_| 1.0, 1e-12);
        let mut s = Vec::new();
        let end = ig.run(0.0, 400.0, [1.0, 1.0], 0.0, 1e-2, &[], &mut s).unwrap();
        let ln = end.y.ln() + end.log_scale;
        assert!((ln - 400.0).abs() < 1e-8, "{ln}");
        assert!((end.dy / end.y - 1.0).abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        // y'' = y from r = 20 backward with the decaying seed e^{-r}
        let ig = Integrator::new(|_| 1.0, 1e-12);
        let mut s = Vec::new();
        let end = ig.run(20.0, 1.0, [1.0, -1.0], -20.0, 1e-2, &[], &mut s).unwrap();
        assert!((end.dy / end.y + 1.0).abs() < 1e-10);
        assert!((end.y.ln() + end.log_scale + 1.0).abs() < 1e-9);
    }
}
