//! Painlevé V in σ-form for σ(t) = −t d/dt log(e^{−kt} D_n(t)), its
//! third-order equation for w = t − σ/(k+n) and the first integral, plus a
//! series-seeded integrator that reconstructs e^{−kt} D_n(t).
//!
//! Residuals are divided by the largest term in the equation, so they are
//! dimensionless.

use num_rational::BigRational;
use num_traits::One;

use crate::combinatorics::Which;
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, int, to_f64};
use crate::ode::Dopri5;
use crate::series::{toeplitz_det_series, RationalSeries, SymbolKind};
use crate::toeplitz::sigma_from_toeplitz;

/// (t, σ, σ′, σ″) with parameters n, k. k may be negative (the D route).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaState {
    pub t: f64,
    pub sigma: f64,
    pub d1: f64,
    pub d2: f64,
    pub n: usize,
    pub k: f64,
}

/// (t, w, w′, w″) with w = t − σ/(k+n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WState {
    pub t: f64,
    pub w: f64,
    pub d1: f64,
    pub d2: f64,
    pub n: usize,
    pub k: f64,
}

impl From<SigmaState> for WState {
    fn from(s: SigmaState) -> Self {
        let c = s.k + s.n as f64;
        WState {
            t: s.t,
            w: s.t - s.sigma / c,
            d1: 1.0 - s.d1 / c,
            d2: -s.d2 / c,
            n: s.n,
            k: s.k,
        }
    }
}

impl From<WState> for SigmaState {
    fn from(w: WState) -> Self {
        let c = w.k + w.n as f64;
        SigmaState {
            t: w.t,
            sigma: c * (w.t - w.w),
            d1: c * (1.0 - w.d1),
            d2: -c * w.d2,
            n: w.n,
            k: w.k,
        }
    }
}

fn scaled(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let scale = terms.iter().fold(1f64, |m, v| m.max(v.abs()));
    sum / scale
}

fn s5_terms(s: &SigmaState) -> [f64; 3] {
    let (t, k, n) = (s.t, s.k, s.n as f64);
    let b = s.sigma - t * s.d1 - 2.0 * s.d1 * s.d1 + (2.0 * k + n) * s.d1;
    [
        (t * s.d2).powi(2),
        -b * b,
        4.0 * s.d1 * s.d1 * (s.d1 - k) * (s.d1 - k - n),
    ]
}

/// (tσ″)² − B² + 4σ′²(σ′−k)(σ′−k−n) with B = σ − tσ′ − 2σ′² + (2k+n)σ′.
pub fn sigma_form_residual(s: &SigmaState) -> f64 {
    scaled(&s5_terms(s))
}

/// t²w″² minus the right-hand side of the first integral.
pub fn first_integral_residual(ws: &WState) -> f64 {
    let (t, k, n) = (ws.t, ws.k, ws.n as f64);
    let (w, w1, w2) = (ws.w, ws.d1, ws.d2);
    let c = k + n;
    scaled(&[
        t * t * w2 * w2,
        4.0 * c * t * w1.powi(3),
        -(4.0 * c * w + t * t + 2.0 * (2.0 * k + 3.0 * n) * t + n * n) * w1 * w1,
        (2.0 * (t + 2.0 * k + 3.0 * n) * w + 2.0 * n * t + 2.0 * n * n) * w1,
        -(w + n).powi(2),
    ])
}

/// w‴ minus the right-hand side of the third-order equation.
pub fn de3_residual(ws: &WState, w3: f64) -> Result<f64> {
    let (t, k, n) = (ws.t, ws.k, ws.n as f64);
    let (w, w1, w2) = (ws.w, ws.d1, ws.d2);
    if w1.abs() < 1e-14 {
        return Err(Error::Pole { factor: "w′", t });
    }
    if (w1 - 1.0).abs() < 1e-14 {
        return Err(Error::Pole {
            factor: "w′ − 1",
            t,
        });
    }
    let c = k + n;
    Ok(scaled(&[
        w3,
        -0.5 * (1.0 / w1 + 1.0 / (w1 - 1.0)) * w2 * w2,
        w2 / t,
        -2.0 * c / t * w1,
        2.0 * c / t * w1 * w1,
        -(t + n) / (2.0 * t * t) * (n - t + 2.0 * w),
        (n + w).powi(2) / (2.0 * t * t * w1),
        (t - w).powi(2) / (2.0 * t * t * (w1 - 1.0)),
    ]))
}

/// σ‴ from differentiating the σ-form once and dividing out σ″.
pub fn sigma_third_derivative(s: &SigmaState) -> f64 {
    let (t, k, n) = (s.t, s.k, s.n as f64);
    let u = s.d1;
    let b = s.sigma - t * u - 2.0 * u * u + (2.0 * k + n) * u;
    // P(u) = 4u²(u−k)(u−k−n)
    let dp = 8.0 * u * (u - k) * (u - k - n) + 4.0 * u * u * (2.0 * u - 2.0 * k - n);
    (2.0 * b * (2.0 * k + n - t - 4.0 * u) - dp - 2.0 * t * s.d2) / (2.0 * t * t)
}

/// a = k/(n+1)!·C(n+k, n), the leading coefficient of σ at t = 0.
pub fn boundary_coefficient(n: usize, k: u32) -> BigRational {
    int(k) * int(binomial((n + k as usize) as u64, n as u64)) / int(factorial(n as u32 + 1))
}

/// How the trajectory is started at t_start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    /// σ = a t^{n+1} and its derivatives.
    Leading,
    /// σ and its derivatives from the exact series of D_n.
    Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaOptions {
    /// Target accuracy of the trajectory. The integrator runs with
    /// rtol = atol = tol/1000 (floored at 1e-14) because the global error is
    /// 10²–10³ times the local tolerance on [0, 5].
    pub tol: f64,
    /// None picks 10⁻² (scaled down for Leading seeds at large n).
    pub t_start: Option<f64>,
    pub seed: Seed,
    /// Extra times at which the state is recorded exactly.
    pub samples: Vec<f64>,
    /// σ-form residual limit along the trajectory; None means 10·tol.
    pub drift_limit: Option<f64>,
    /// On drift, re-seed from the Toeplitz route instead of failing.
    pub hybrid: bool,
}

impl Default for SigmaOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            t_start: None,
            seed: Seed::Series,
            samples: Vec::new(),
            drift_limit: None,
            hybrid: false,
        }
    }
}

/// Increasing (k > 0, t > 0) or the D route (k → −k, t → −t).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parameters {
    pub n: usize,
    pub k: u32,
    pub which: Which,
}

impl Parameters {
    fn signed(&self) -> (f64, f64) {
        match self.which {
            Which::Increasing => (self.k as f64, 1.0),
            Which::Decreasing => (-(self.k as f64), -1.0),
        }
    }
}

/// A σ trajectory in the signed variable t (negative on the D route).
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaTrajectory {
    pub params: Parameters,
    pub t_start: f64,
    pub states: Vec<SigmaState>,
    /// ∫₀^t σ(t′)/t′ dt′ at each state.
    pub integrals: Vec<f64>,
    /// Largest |σ-form residual| seen.
    pub max_residual: f64,
    /// Largest |first-integral residual| seen.
    pub max_first_integral: f64,
    /// Times at which the trajectory was re-seeded from the Toeplitz route.
    pub restarts: Vec<f64>,
    /// Accepted states with σ ≤ 0 at t ≠ 0 (I route only).
    pub sign_violations: usize,
}

/// Exact series of σ(t) = kt − t D′/D in the signed variable.
fn sigma_series(p: &Parameters, order: usize) -> Result<RationalSeries> {
    let det = toeplitz_det_series(p.n, SymbolKind::for_statistic(p.which, p.k), order);
    // D route: D_n^I(−k, t′) = D_n^D(k, −t′).
    let det = match p.which {
        Which::Increasing => det,
        Which::Decreasing => det.dilate(&-BigRational::one()),
    };
    let log_der = det.derivative().try_div(&det)?;
    let (k_signed, _) = p.signed();
    let kk = BigRational::from_float(k_signed).expect("integer k");
    let x = RationalSeries::variable(order);
    let inner = &RationalSeries::constant(kk, order) - &log_der;
    Ok(&x * &inner)
}

fn series_state(series: &RationalSeries, p: &Parameters, t: f64) -> (SigmaState, f64) {
    let d1 = series.derivative();
    let d2 = d1.derivative();
    // ∫ σ/t = Σ c_j t^j / j
    let mut integral = 0.0;
    for (j, c) in series.coeffs().iter().enumerate().skip(1) {
        integral += to_f64(c) * t.powi(j as i32) / j as f64;
    }
    let (k, _) = p.signed();
    (
        SigmaState {
            t,
            sigma: series.eval(t),
            d1: d1.eval(t),
            d2: d2.eval(t),
            n: p.n,
            k,
        },
        integral,
    )
}

fn leading_state(p: &Parameters, t: f64) -> (SigmaState, f64) {
    // a = k/(n+1)!·C(n+k, n) with the signed k; C is a generalized binomial
    // on the D route.
    let (k, _) = p.signed();
    let a = k * binomial_real(p.n as f64 + k, p.n) / factorial_f64(p.n + 1);
    let m = p.n as i32 + 1;
    let mf = m as f64;
    let mut s = SigmaState {
        t,
        sigma: a * t.powi(m),
        d1: mf * a * t.powi(m - 1),
        d2: mf * (mf - 1.0) * a * t.powi(m - 2),
        n: p.n,
        k,
    };
    // Put the seed on the σ-form: the differentiated equation conserves the
    // σ-form residual, so any mismatch here would persist.
    let [_, b2, pu] = s5_terms(&s);
    let disc = -b2 - pu;
    if disc > 0.0 {
        s.d2 = s.d2.signum() * disc.sqrt() / t.abs();
    }
    (s, a * t.powi(m) / mf)
}

fn binomial_real(top: f64, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (top - i as f64) / (i as f64 + 1.0))
}

fn factorial_f64(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, i| acc * i as f64)
}

/// σ, σ′, σ″ from the Toeplitz route by five-point differences.
fn toeplitz_state(p: &Parameters, t: f64) -> Result<SigmaState> {
    let (k, _) = p.signed();
    let h = 1e-3 * t.abs().max(1.0);
    let f = |s: f64| sigma_from_toeplitz(p.n, k, s);
    let (m2, m1, z, p1, p2) = (
        f(t - 2.0 * h)?,
        f(t - h)?,
        f(t)?,
        f(t + h)?,
        f(t + 2.0 * h)?,
    );
    Ok(SigmaState {
        t,
        sigma: z,
        d1: (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
        d2: (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h),
        n: p.n,
        k,
    })
}

const LOCAL_SAFETY: f64 = 1e-3;

fn local_tol(tol: f64) -> f64 {
    (tol * LOCAL_SAFETY).max(1e-14)
}

fn default_t_start(p: &Parameters, opts: &SigmaOptions) -> f64 {
    match (opts.t_start, opts.seed) {
        (Some(t), _) => t,
        (None, Seed::Series) => 1e-2,
        // The one-term seed leaves a relative O(t) error that the
        // trajectory carries to the end.
        (None, Seed::Leading) => 1e-2f64.min(opts.tol / (p.n as f64 + 1.0)),
    }
}

/// Integrate σ from t_start to |t_end| (signed on the D route). Records every
/// accepted step and every requested sample.
pub fn integrate_sigma(
    params: Parameters,
    t_end: f64,
    opts: &SigmaOptions,
) -> Result<SigmaTrajectory> {
    if params.n == 0 || params.k == 0 {
        return Err(Error::InvalidParameter("n and k must be positive".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol = {} must be positive",
            opts.tol
        )));
    }
    let (k, sign) = params.signed();
    let t_start = default_t_start(&params, opts);
    if !(t_end > t_start) {
        return Err(Error::InvalidParameter(format!(
            "t_end = {t_end} must exceed t_start = {t_start}"
        )));
    }
    let (seed, seed_integral) = match opts.seed {
        Seed::Series => {
            let series = sigma_series(&params, params.n + 24)?;
            series_state(&series, &params, sign * t_start)
        }
        Seed::Leading => leading_state(&params, sign * t_start),
    };
    let limit = opts.drift_limit.unwrap_or(10.0 * opts.tol);
    let n = params.n;

    let mut stops: Vec<f64> = opts
        .samples
        .iter()
        .copied()
        .filter(|&s| s > t_start && s < t_end)
        .collect();
    stops.push(t_end);
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let mut traj = SigmaTrajectory {
        params,
        t_start,
        states: vec![seed],
        integrals: vec![seed_integral],
        max_residual: sigma_form_residual(&seed).abs(),
        max_first_integral: first_integral_residual(&seed.into()).abs(),
        restarts: Vec::new(),
        sign_violations: 0,
    };

    let rhs = move |t: f64, y: &[f64], dy: &mut [f64]| {
        let s = SigmaState {
            t,
            sigma: y[0],
            d1: y[1],
            d2: y[2],
            n,
            k,
        };
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = sigma_third_derivative(&s);
        dy[3] = y[0] / t;
    };

    let mut t = sign * t_start;
    let mut y = [seed.sigma, seed.d1, seed.d2, seed_integral];
    let mut ode = Dopri5::new(local_tol(opts.tol), local_tol(opts.tol));
    let mut stop_idx = 0;
    while stop_idx < stops.len() {
        let target = sign * stops[stop_idx];
        let mut drift: Option<(f64, [f64; 4])> = None;
        let res = ode.advance(rhs, &mut t, &mut y, target, |tt, yy| {
            let s = SigmaState {
                t: tt,
                sigma: yy[0],
                d1: yy[1],
                d2: yy[2],
                n,
                k,
            };
            let r = sigma_form_residual(&s).abs();
            if r > limit {
                drift = Some((tt, [yy[0], yy[1], yy[2], yy[3]]));
                return Err(Error::TrajectoryDrift {
                    t: tt,
                    residual: r,
                    limit,
                });
            }
            traj.max_residual = traj.max_residual.max(r);
            traj.max_first_integral = traj
                .max_first_integral
                .max(first_integral_residual(&s.into()).abs());
            if sign > 0.0 && s.sigma <= 0.0 {
                traj.sign_violations += 1;
            }
            traj.states.push(s);
            traj.integrals.push(yy[3]);
            Ok(())
        });
        match res {
            Ok(()) => stop_idx += 1,
            Err(Error::TrajectoryDrift { .. }) if opts.hybrid => {
                let (tt, yy) = drift.expect("drift recorded");
                let fresh = toeplitz_state(&params, tt)?;
                t = tt;
                y = [fresh.sigma, fresh.d1, fresh.d2, yy[3]];
                ode = Dopri5::new(local_tol(opts.tol), local_tol(opts.tol));
                traj.restarts.push(tt);
                if traj.restarts.len() > 1000 {
                    return Err(Error::TrajectoryDrift {
                        t: tt,
                        residual: f64::NAN,
                        limit,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

impl SigmaTrajectory {
    /// Index of the recorded state at signed time t, if any.
    fn find(&self, t: f64) -> Option<usize> {
        self.states
            .iter()
            .position(|s| (s.t - t).abs() <= 1e-14 * t.abs().max(1.0))
    }

    /// σ at |t| (a recorded time or by cubic Hermite interpolation).
    pub fn sigma_at(&self, t: f64) -> Option<f64> {
        self.interpolate(t, |s| s.sigma, |s| s.d1)
    }

    fn interpolate(
        &self,
        t: f64,
        f: impl Fn(&SigmaState) -> f64,
        df: impl Fn(&SigmaState) -> f64,
    ) -> Option<f64> {
        let (_, sign) = self.params.signed();
        let ts = sign * t;
        if let Some(i) = self.find(ts) {
            return Some(f(&self.states[i]));
        }
        let i = self
            .states
            .windows(2)
            .position(|w| (w[0].t - ts) * (w[1].t - ts) <= 0.0)?;
        let (a, b) = (&self.states[i], &self.states[i + 1]);
        Some(hermite(a.t, f(a), df(a), b.t, f(b), df(b), ts))
    }

    /// ∫₀^t σ(t′)/t′ dt′ at |t|.
    pub fn integral_at(&self, t: f64) -> Option<f64> {
        let (_, sign) = self.params.signed();
        let ts = sign * t;
        if let Some(i) = self.find(ts) {
            return Some(self.integrals[i]);
        }
        let i = self
            .states
            .windows(2)
            .position(|w| (w[0].t - ts) * (w[1].t - ts) <= 0.0)?;
        let (a, b) = (&self.states[i], &self.states[i + 1]);
        Some(hermite(
            a.t,
            self.integrals[i],
            a.sigma / a.t,
            b.t,
            self.integrals[i + 1],
            b.sigma / b.t,
            ts,
        ))
    }

    /// Estimate the t^{n+1} coefficient of σ from the first recorded states
    /// by Richardson extrapolation of σ/t^{n+1}, in the unsigned variable.
    pub fn leading_coefficient_estimate(&self) -> Option<f64> {
        let m = self.params.n as i32 + 1;
        let (_, sign) = self.params.signed();
        let t0 = self.t_start;
        let g = |t: f64| self.sigma_at(t).map(|s| s / (sign * t).powi(m));
        let (g1, g2, g4) = (g(4.0 * t0)?, g(2.0 * t0)?, g(t0)?);
        // g(t) = a + bt + ct² + …
        let r1 = 2.0 * g2 - g1;
        let r2 = 2.0 * g4 - g2;
        Some((4.0 * r2 - r1) / 3.0)
    }
}

fn hermite(t0: f64, y0: f64, d0: f64, t1: f64, y1: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

/// e^{−kt} D_n(t) = exp(−∫₀^t σ/t′ dt′). On the D route this is
/// e^{−kt} D_n^D(k, t).
pub fn determinant_from_sigma(traj: &SigmaTrajectory, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    if t < traj.t_start {
        // Inside the seed interval the series itself is used.
        let (_, sign) = traj.params.signed();
        let series = sigma_series(&traj.params, traj.params.n + 24)?;
        return Ok((-series_state(&series, &traj.params, sign * t).1).exp());
    }
    traj.integral_at(t)
        .map(|i| (-i).exp())
        .ok_or_else(|| Error::InvalidParameter(format!("t = {t} lies outside the trajectory")))
}

/// One-shot: integrate to t and return e^{−kt} D_n(t).
pub fn painleve_determinant(params: Parameters, t: f64, opts: &SigmaOptions) -> Result<f64> {
    if t <= default_t_start(&params, opts) {
        let dummy = SigmaTrajectory {
            params,
            t_start: default_t_start(&params, opts),
            states: Vec::new(),
            integrals: Vec::new(),
            max_residual: 0.0,
            max_first_integral: 0.0,
            restarts: Vec::new(),
            sign_violations: 0,
        };
        return determinant_from_sigma(&dummy, t);
    }
    let traj = integrate_sigma(params, t, opts)?;
    determinant_from_sigma(&traj, t)
}
