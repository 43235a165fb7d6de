//! Adaptive Dormand–Prince 5(4) integrator for first-order systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
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
// Fifth-order weights equal the last row of A (FSAL); these are the
// differences between the fifth- and fourth-order solutions.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    h: Option<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            max_steps: 200_000,
            h: None,
            accepted: 0,
            rejected: 0,
        }
    }

    fn initial_step(&self, span: f64, y: &[f64], dy: &[f64]) -> f64 {
        let scale: f64 = y
            .iter()
            .zip(dy)
            .map(|(v, d)| (d / (self.atol + self.rtol * v.abs())).powi(2))
            .sum::<f64>()
            / y.len() as f64;
        let guess = if scale > 0.0 {
            0.01 / scale.sqrt()
        } else {
            1e-3 * span.abs()
        };
        guess.min(span.abs()).max(1e-14 * span.abs().max(1.0))
    }

    /// Advance `y(t)` to `t_end` (either direction), calling `on_step` after every
    /// accepted step.
    pub fn advance<F, O>(
        &mut self,
        rhs: F,
        t: &mut f64,
        y: &mut [f64],
        t_end: f64,
        mut on_step: O,
    ) -> Result<()>
    where
        F: Fn(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64]) -> Result<()>,
    {
        let dim = y.len();
        let dir = if t_end >= *t { 1.0 } else { -1.0 };
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
        let mut stage = vec![0.0; dim];
        let mut y_new = vec![0.0; dim];
        rhs(*t, y, &mut k[0]);
        let mut h = self
            .h
            .map(f64::abs)
            .unwrap_or_else(|| self.initial_step(t_end - *t, y, &k[0]));
        let mut steps = 0;
        while dir * (t_end - *t) > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::StepFailure { t: *t, h });
            }
            let remaining = (t_end - *t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += hs * A[s][j] * kj[i];
                    }
                    stage[i] = acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                rhs(*t + C[s] * hs, &stage, &mut tail[0]);
                if s == 6 {
                    y_new.copy_from_slice(&stage);
                }
            }
            let mut err = 0.0;
            for i in 0..dim {
                let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * hs;
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / dim as f64).sqrt();
            if !err.is_finite() {
                h *= 0.25;
                self.rejected += 1;
                if h < 1e-14 * t.abs().max(1e-300) {
                    return Err(Error::StepFailure { t: *t, h });
                }
                continue;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                *t = if last { t_end } else { *t + hs };
                y.copy_from_slice(&y_new);
                let done = k.pop().expect("seven stages");
                k.insert(0, done);
                self.accepted += 1;
                on_step(*t, y)?;
                if !last {
                    h *= factor;
                } else {
                    h = h.max(hs.abs() * factor);
                }
                self.h = Some(h);
            } else {
                self.rejected += 1;
                h *= factor.min(1.0);
                if h < 1e-15 * t.abs().max(1e-300) {
                    return Err(Error::StepFailure { t: *t, h });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut ode = Dopri5::new(1e-11, 1e-11);
        let mut t = 0.0;
        let mut y = [1.0];
        ode.advance(|_, y, d| d[0] = y[0], &mut t, &mut y, 2.0, |_, _| Ok(()))
            .unwrap();
        assert!((y[0] - 2f64.exp()).abs() < 1e-9);
        assert_eq!(t, 2.0);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let mut ode = Dopri5::new(1e-10, 1e-10);
        let mut t = 0.0;
        let mut y = [0.0, 1.0];
        ode.advance(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            &mut t,
            &mut y,
            -3.0,
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y[0] - (-3f64).sin()).abs() < 1e-8);
        assert!((y[1] - (-3f64).cos()).abs() < 1e-8);
    }

    #[test]
    fn fifth_order_convergence() {
        // Fixed-ish accuracy scaling: tightening tol by 1e5 should shrink error roughly by 1e5.
        let run = |tol: f64| {
            let mut ode = Dopri5::new(tol, tol);
            let mut t = 0.0;
            let mut y = [1.0];
            ode.advance(
                |t, y, d| d[0] = -t * y[0],
                &mut t,
                &mut y,
                3.0,
                |_, _| Ok(()),
            )
            .unwrap();
            (y[0] - (-4.5f64).exp()).abs()
        };
        assert!(run(1e-12) < run(1e-6));
        assert!(run(1e-12) < 1e-11);
    }
}
