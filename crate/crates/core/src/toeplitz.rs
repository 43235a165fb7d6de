//! Floating-point Toeplitz determinants T_n(f) = (f_{i−j}) and the
//! recursion quantities built from T_n⁻¹.
//!
//! Notation (all vectors have length n):
//! δ⁺ = e₀, δ⁻ = e_{n−1}, f⁺ = (f₁..f_n), f⁻ = (f_n..f₁), f̃⁺ = (f₋₁..f₋ₙ),
//! f̃⁻ = (f₋ₙ..f₋₁), Λ the backward shift and Λ′ = Λᵀ.
//!
//! U±ₙ = (T⁻¹f⁺, δ±), Ũ±ₙ = (T⁻ᵀf̃⁺, δ±), V±ₙ = (T⁻¹δ⁺, δ±), Ṽ⁻ₙ = (T⁻ᵀδ⁺, δ⁻),
//! φ = 1 − U⁻ₙŨ⁻ₙ.
//!
//! Residuals are reported relative to the size of the terms involved:
//! |lhs − rhs| / max(1, |lhs|, |rhs|).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ddouble::Dd;

use crate::combinatorics::Which;
use crate::error::{Error, Result};
use crate::exact::{binomial, int, to_f64};
use crate::gessel::{SymbolCoefficients, SymbolMode};
use crate::linalg::Lu;

/// Named residuals, ordered by name.
pub type Residuals = BTreeMap<&'static str, f64>;

/// An n×n Toeplitz matrix together with the symbol it came from.
#[derive(Debug, Clone)]
pub struct ToeplitzContext {
    n: usize,
    symbol: SymbolCoefficients,
    /// f_j for j = −(n+2)..=n+2
    coeffs: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl ToeplitzContext {
    /// T_n(f_I) or T_n(f_D) at alphabet size k and time t ≥ 0.
    pub fn new(n: usize, k: u32, t: f64, which: Which) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "alphabet size must be positive".into(),
            ));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t = {t} must be finite and ≥ 0"
            )));
        }
        let k = k as f64;
        let mode = match which {
            Which::Increasing => SymbolMode::I { k, t },
            Which::Decreasing => SymbolMode::D { k, t },
        };
        Self::from_symbol(n, SymbolCoefficients::new(mode)?)
    }

    /// T_n of e^{t/z}(1 + z)^k for any real k and t; k → −k, t → −t gives the
    /// signed D symbol.
    pub fn generalized(n: usize, k: f64, t: f64) -> Result<Self> {
        Self::from_symbol(n, SymbolCoefficients::new(SymbolMode::I { k, t })?)
    }

    pub fn from_symbol(n: usize, symbol: SymbolCoefficients) -> Result<Self> {
        let reach = n as i64 + 2;
        let coeffs: Vec<f64> = (-reach..=reach).map(|j| symbol.coefficient(j)).collect();
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Nonconvergent(format!("Fourier coefficient {bad}")));
        }
        let off = reach as usize;
        let matrix = DMatrix::from_fn(n, n, |i, j| coeffs[off + i - j]);
        Ok(Self {
            n,
            symbol,
            coeffs,
            matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symbol(&self) -> &SymbolCoefficients {
        &self.symbol
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// f_j
    pub fn coefficient(&self, j: i64) -> f64 {
        let reach = self.n as i64 + 2;
        if j.abs() <= reach {
            self.coeffs[(j + reach) as usize]
        } else {
            self.symbol.coefficient(j)
        }
    }

    /// Same symbol, different size.
    pub fn resized(&self, n: usize) -> Result<Self> {
        Self::from_symbol(n, self.symbol.clone())
    }

    /// (k, t) for the I and D symbols.
    fn parameters(&self) -> (f64, f64) {
        match *self.symbol.mode() {
            SymbolMode::I { k, t } | SymbolMode::D { k, t } => (k, t),
            SymbolMode::P { t } => (f64::NAN, t),
            _ => (f64::NAN, f64::NAN),
        }
    }
}

/// A determinant with the 1-norm condition number of its matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: f64,
    pub condition: f64,
}

pub fn toeplitz_det(ctx: &ToeplitzContext) -> Result<Determinant> {
    if ctx.n == 0 {
        return Ok(Determinant {
            value: 1.0,
            condition: 1.0,
        });
    }
    let lu = Lu::factor(&ctx.matrix)?;
    Ok(Determinant {
        value: lu.det(),
        condition: lu.condition(),
    })
}

const REFINEMENT_STEPS: usize = 2;

/// Solves against T_n and T_nᵀ that every quantity is read from.
struct Level {
    n: usize,
    lu: Option<Lu>,
    det: f64,
    /// T⁻¹f⁺
    x: DVector<f64>,
    /// T⁻ᵀf̃⁺
    xt: DVector<f64>,
    /// T⁻¹δ⁺
    y: DVector<f64>,
    /// T⁻ᵀδ⁺
    yt: DVector<f64>,
}

impl Level {
    fn new(ctx: &ToeplitzContext) -> Result<Self> {
        let n = ctx.n;
        if n == 0 {
            let empty = DVector::zeros(0);
            return Ok(Self {
                n,
                lu: None,
                det: 1.0,
                x: empty.clone(),
                xt: empty.clone(),
                y: empty.clone(),
                yt: empty,
            });
        }
        let lu = Lu::factor(&ctx.matrix)?;
        let fp = DVector::from_fn(n, |i, _| ctx.coefficient(i as i64 + 1));
        let ftp = DVector::from_fn(n, |i, _| ctx.coefficient(-(i as i64) - 1));
        let e0 = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
        // The last components of these solves shrink like tⁿ at small t.
        let m = &ctx.matrix;
        Ok(Self {
            n,
            det: lu.det(),
            x: lu.solve_refined(m, &fp, false, REFINEMENT_STEPS),
            xt: lu.solve_refined(m, &ftp, true, REFINEMENT_STEPS),
            y: lu.solve_refined(m, &e0, false, REFINEMENT_STEPS),
            yt: lu.solve_refined(m, &e0, true, REFINEMENT_STEPS),
            lu: Some(lu),
        })
    }

    fn first(v: &DVector<f64>) -> f64 {
        if v.is_empty() {
            0.0
        } else {
            v[0]
        }
    }

    fn last(v: &DVector<f64>) -> f64 {
        if v.is_empty() {
            0.0
        } else {
            v[v.len() - 1]
        }
    }

    fn u_plus(&self) -> f64 {
        Self::first(&self.x)
    }
    fn u_minus(&self) -> f64 {
        Self::last(&self.x)
    }
    fn ut_plus(&self) -> f64 {
        Self::first(&self.xt)
    }
    fn ut_minus(&self) -> f64 {
        Self::last(&self.xt)
    }
    fn v_plus(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.y[0]
        }
    }
    fn v_minus(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.y[self.n - 1]
        }
    }
    fn vt_minus(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.yt[self.n - 1]
        }
    }
    fn phi(&self) -> f64 {
        1.0 - self.u_minus() * self.ut_minus()
    }
}

/// The scalar inner products of T_n⁻¹ at one (n, k, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionQuantities {
    pub n: usize,
    /// NaN for symbols other than I and D.
    pub k: f64,
    pub t: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub ut_plus: f64,
    pub ut_minus: f64,
    /// V quantities are NaN at n = 0.
    pub v_plus: f64,
    pub v_minus: f64,
    pub vt_minus: f64,
    pub phi: f64,
    /// D_n
    pub det: f64,
}

impl RecursionQuantities {
    fn from_level(level: &Level, ctx: &ToeplitzContext) -> Self {
        let (k, t) = ctx.parameters();
        Self {
            n: level.n,
            k,
            t,
            u_plus: level.u_plus(),
            u_minus: level.u_minus(),
            ut_plus: level.ut_plus(),
            ut_minus: level.ut_minus(),
            v_plus: level.v_plus(),
            v_minus: level.v_minus(),
            vt_minus: level.vt_minus(),
            phi: level.phi(),
            det: level.det,
        }
    }
}

/// At n = 0 every U is 0 and φ = 1.
pub fn recursion_quantities(ctx: &ToeplitzContext) -> Result<RecursionQuantities> {
    Ok(RecursionQuantities::from_level(&Level::new(ctx)?, ctx))
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / 1f64.max(lhs.abs()).max(rhs.abs())
}

fn levels(ctx: &ToeplitzContext, sizes: std::ops::RangeInclusive<usize>) -> Result<Vec<Level>> {
    sizes.map(|m| Level::new(&ctx.resized(m)?)).collect()
}

/// Symbol-independent identities at index n ≥ 1. Uses T_n, T_{n+1}, T_{n+2}.
pub fn universal_identity_residuals(ctx: &ToeplitzContext) -> Result<Residuals> {
    let n = ctx.n;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "universal identities are stated for n ≥ 1".into(),
        ));
    }
    let lv = levels(ctx, n..=n + 2)?;
    let (a, b, c) = (&lv[0], &lv[1], &lv[2]);
    let f = |j: i64| ctx.coefficient(j);
    let ftp = DVector::from_fn(n, |i, _| f(-(i as i64) - 1));
    let fm = DVector::from_fn(n, |i, _| f((n - i) as i64));

    let mut r = Residuals::new();
    r.insert("UV", rel(-a.u_minus(), b.v_minus() * b.det / a.det));
    r.insert("UV.ratio", rel(-a.u_minus(), b.v_minus() / b.v_plus()));
    r.insert("f0", rel(f(0) - a.x.dot(&ftp), 1.0 / b.v_plus()));
    r.insert(
        "V",
        rel(
            c.v_plus().powi(2) - c.v_minus() * c.vt_minus(),
            b.v_plus() * c.v_plus(),
        ),
    );
    r.insert(
        "fn",
        rel(
            f(n as i64 + 1) - a.x.dot(&fm),
            -c.v_minus() / (b.v_plus() * c.v_plus()),
        ),
    );
    // V⁺ₙ needs T_{n−1}; at n = 1 it is D₀/D₁ = 1/f₀.
    let v_n = a.v_plus();
    r.insert(
        "UV1",
        rel(1.0 - a.u_minus() * a.ut_minus(), v_n / b.v_plus()),
    );
    r.insert(
        "UU",
        rel(a.u_plus() - b.u_plus(), a.ut_minus() * b.u_minus()),
    );
    // (δ⁺, Λ T_{n+1}⁻¹ δ⁻) is entry 1 of T_{n+1}⁻¹ δ⁻.
    let lu1 = b.lu.as_ref().expect("n + 1 ≥ 2");
    let e_last = DVector::from_fn(n + 1, |i, _| if i == n { 1.0 } else { 0.0 });
    let w = lu1.solve(&e_last);
    r.insert(
        "Ldmdp",
        rel(w[1], a.vt_minus() + a.ut_minus() * a.u_plus() * b.v_plus()),
    );
    r.insert("Vdet", rel(b.v_plus(), a.det / b.det));
    Ok(r)
}

fn require_i_symbol(ctx: &ToeplitzContext) -> Result<(f64, f64)> {
    match *ctx.symbol.mode() {
        SymbolMode::I { k, t } => Ok((k, t)),
        _ => Err(Error::InvalidParameter(
            "this identity is derived for the symbol e^{t/z}(1+z)^k only".into(),
        )),
    }
}

/// The basic matrix identity and the scalar identities id0–id4 at index n.
/// id1 and id3 are reported for n ≥ 1; id0, id2 and id4 reach down to index
/// n − 1 and are reported for n ≥ 2.
pub fn nonuniversal_identity_residuals(ctx: &ToeplitzContext) -> Result<Residuals> {
    let (k, t) = require_i_symbol(ctx)?;
    let n = ctx.n;
    let mut r = Residuals::new();
    if n == 0 {
        return Ok(r);
    }
    let lv = levels(ctx, n - 1..=n + 1)?;
    let (p, a, b) = (&lv[0], &lv[1], &lv[2]);
    let nf = n as f64;

    r.insert("Mid", mid_residual(ctx, a, k, t));
    r.insert("id1", rel(nf * t + t * a.u_plus(), (k + nf) * a.ut_plus()));
    r.insert(
        "id3",
        rel(
            t + (k - 1.0) * a.ut_plus() + (nf + 1.0) * a.u_minus() * b.ut_minus(),
            k * b.ut_plus() + t * b.u_minus() * a.ut_minus(),
        ),
    );
    if n >= 2 {
        let phi = a.phi();
        r.insert(
            "id2",
            rel(
                t * a.ut_minus().powi(2) * b.u_minus(),
                (t + nf) * a.ut_minus() + t * p.ut_minus() * phi + (k + nf + 1.0) * b.ut_minus(),
            ),
        );
        r.insert(
            "id0",
            rel(
                t + (nf - 1.0) * p.ut_plus() + k * p.u_minus() * a.ut_minus(),
                nf * a.ut_plus() + t * a.u_minus() * p.ut_minus(),
            ),
        );
        r.insert(
            "id4",
            rel(
                nf * a.ut_minus() + a.ut_minus() * a.ut_plus(),
                -phi * ((k + nf + 1.0) * b.ut_minus() + t * p.ut_minus()),
            ),
        );
    }
    Ok(r)
}

/// Max-entry norm of the matrix identity, divided by the largest term.
fn mid_residual(ctx: &ToeplitzContext, a: &Level, k: f64, t: f64) -> f64 {
    let n = ctx.n;
    let lu = a.lu.as_ref().expect("n ≥ 1");
    let ti = lu.inverse();
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { i as f64 + 1.0 } else { 0.0 });
    let id = DMatrix::<f64>::identity(n, n);
    let back = DMatrix::from_fn(n, n, |i, j| if j == i + 1 { 1.0 } else { 0.0 });
    let fwd = back.transpose();
    let ftm = DVector::from_fn(n, |i, _| ctx.coefficient(i as i64 - n as i64));
    let e_last = DVector::from_fn(n, |i, _| if i + 1 == n { 1.0 } else { 0.0 });
    let ti_ftm = lu.solve(&ftm);
    let tit_last = lu.solve_transpose(&e_last);
    let terms = [
        &ti * (&m + &id * t),
        -(&m * &ti),
        &ti * (&m - &id * (k + 1.0)) * &fwd,
        -(&fwd * &m * &ti),
        &back * &ti * t,
        -(&a.y * a.xt.transpose()) * k,
        -(&ti_ftm * tit_last.transpose()) * n as f64,
        &a.x * a.yt.transpose() * t,
    ];
    let scale = terms.iter().map(|x| x.amax()).fold(1.0, f64::max);
    let sum = terms.iter().fold(DMatrix::zeros(n, n), |acc, x| acc + x);
    sum.amax() / scale
}

/// Default finite-difference step.
pub fn default_step(t: f64) -> f64 {
    1e-4 * t.max(1.0)
}

/// Derivative identities at index n ≥ 1, with d/dt approximated by central
/// differences of step h. d1, d4 and d2Down are reported for n ≥ 2.
///
/// For a positive integer k the entries of T_n are polynomials in t and every
/// quantity is evaluated in double-double arithmetic: the d2Down right-hand
/// side cancels down to ~tⁿ at small t. Other k use plain floats.
pub fn differentiation_residuals(ctx: &ToeplitzContext, h: f64) -> Result<Residuals> {
    let (k, t) = require_i_symbol(ctx)?;
    let n = ctx.n;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "differentiation identities need n ≥ 1".into(),
        ));
    }
    if !(h > 0.0 && t - h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step h = {h} must satisfy 0 < h < t = {t}"
        )));
    }
    if k > 0.0 && k.fract() == 0.0 && k <= DD_MAX_K {
        return dd_differentiation_residuals(n, k as u32, t, h);
    }
    float_differentiation_residuals(n, k, t, h)
}

fn float_differentiation_residuals(n: usize, k: f64, t: f64, h: f64) -> Result<Residuals> {
    let at = |tt: f64| -> Result<Vec<Level>> {
        levels(&ToeplitzContext::generalized(n, k, tt)?, n - 1..=n + 1)
    };
    let now = at(t)?;
    let fwd = at(t + h)?;
    let bwd = at(t - h)?;
    let d = |g: &dyn Fn(&Level) -> f64| (g(&fwd[1]) - g(&bwd[1])) / (2.0 * h);
    let (p, a, b) = (&now[0], &now[1], &now[2]);
    let phi = a.phi();
    let nf = n as f64;

    let mut r = Residuals::new();
    r.insert("dlogD", rel(d(&|l: &Level| l.det.abs().ln()), a.u_plus()));
    r.insert("d2", rel(d(&|l: &Level| l.u_minus()), phi * b.u_minus()));
    r.insert("d3", rel(d(&|l: &Level| l.ut_plus()), phi));
    r.insert(
        "d4Up",
        rel(
            d(&|l: &Level| l.ut_minus()),
            (nf * a.ut_minus() + a.ut_plus() * a.ut_minus() + (k + 1.0 + nf) * phi * b.ut_minus())
                / t,
        ),
    );
    if n >= 2 {
        r.insert(
            "d1",
            rel(
                d(&|l: &Level| l.u_plus()),
                -phi * p.ut_minus() * b.u_minus(),
            ),
        );
        r.insert("d4", rel(d(&|l: &Level| l.ut_minus()), -phi * p.ut_minus()));
        // φ − 1 = −U⁻Ũ⁻; dividing it out avoids the cancellation when U⁻ is small.
        let (um, utm) = (a.u_minus(), a.ut_minus());
        r.insert(
            "d2Down",
            rel(
                d(&|l: &Level| l.u_minus()),
                -nf / t * um - (a.ut_plus() - t * phi) / (t * utm) - phi * p.ut_minus() * um / utm,
            ),
        );
    }
    Ok(r)
}

const DD_MAX_K: f64 = 40.0;

fn dd(v: f64) -> Dd {
    Dd::from(v)
}

/// f_j(t) = Σ_m C(k, j+m) t^m/m! for the symbol e^{t/z}(1+z)^k, a polynomial
/// in t when k is a positive integer. C(k, r) is exact in f64 for k ≤ 40.
fn dd_coefficient(k: u32, j: i64, t: Dd) -> Dd {
    let mut acc = dd(0.0);
    let mut power = dd(1.0);
    for m in 0..=(k as i64 - j).max(-1) {
        if m > 0 {
            power = power * t / m as f64;
        }
        let r = j + m;
        if r >= 0 {
            acc += power * to_f64(&int(binomial(k as u64, r as u64)));
        }
    }
    acc
}

/// Gaussian elimination with partial pivoting in double-double. Returns the
/// solution for each right-hand side and det(a).
fn dd_solve(mut a: Vec<Vec<Dd>>, mut rhs: Vec<Vec<Dd>>) -> Option<(Vec<Vec<Dd>>, Dd)> {
    let n = a.len();
    let mut det = dd(1.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].hi.abs().total_cmp(&a[y][col].hi.abs()))?;
        if a[pivot][col].hi == 0.0 {
            return None;
        }
        if pivot != col {
            a.swap(pivot, col);
            rhs.iter_mut().for_each(|b| b.swap(pivot, col));
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                let delta = factor * a[col][c];
                a[r][c] -= delta;
            }
            for b in rhs.iter_mut() {
                let delta = factor * b[col];
                b[r] -= delta;
            }
        }
    }
    for b in rhs.iter_mut() {
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                acc -= a[i][j] * b[j];
            }
            b[i] = acc / a[i][i];
        }
    }
    Some((rhs, det))
}

/// U±, Ũ± of T_m and det T_m in double-double (U, Ũ zero for m = 0).
struct DdLevel {
    u_plus: Dd,
    u_minus: Dd,
    ut_plus: Dd,
    ut_minus: Dd,
    det: Dd,
}

impl DdLevel {
    fn new(m: usize, f: &dyn Fn(i64) -> Dd) -> Result<Self> {
        if m == 0 {
            let z = dd(0.0);
            return Ok(Self {
                u_plus: z,
                u_minus: z,
                ut_plus: z,
                ut_minus: z,
                det: dd(1.0),
            });
        }
        let a: Vec<Vec<Dd>> = (0..m)
            .map(|i| (0..m).map(|j| f(i as i64 - j as i64)).collect())
            .collect();
        let at: Vec<Vec<Dd>> = (0..m).map(|i| (0..m).map(|j| a[j][i]).collect()).collect();
        let fp: Vec<Dd> = (0..m).map(|i| f(i as i64 + 1)).collect();
        let ftp: Vec<Dd> = (0..m).map(|i| f(-(i as i64) - 1)).collect();
        let singular = || Error::Singular {
            condition: f64::INFINITY,
        };
        let (x, det) = dd_solve(a, vec![fp]).ok_or_else(singular)?;
        let (xt, _) = dd_solve(at, vec![ftp]).ok_or_else(singular)?;
        Ok(Self {
            u_plus: x[0][0],
            u_minus: x[0][m - 1],
            ut_plus: xt[0][0],
            ut_minus: xt[0][m - 1],
            det,
        })
    }

    fn phi(&self) -> Dd {
        dd(1.0) - self.u_minus * self.ut_minus
    }
}

fn dd_differentiation_residuals(n: usize, k: u32, t: f64, h: f64) -> Result<Residuals> {
    let (tr, hr) = (dd(t), dd(h));
    let times = [tr - hr, tr, tr + hr];
    // Levels n−1, n, n+1 at each time.
    let per_time = times
        .iter()
        .map(|&tt| {
            let f = |j: i64| dd_coefficient(k, j, tt);
            (n - 1..=n + 1)
                .map(|m| DdLevel::new(m, &f))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (bwd, now, fwd) = (&per_time[0], &per_time[1], &per_time[2]);
    let two_h = hr + hr;
    let d = |g: &dyn Fn(&DdLevel) -> Dd| f64::from((g(&fwd[1]) - g(&bwd[1])) / two_h);
    let (p, a, b) = (&now[0], &now[1], &now[2]);
    let phi = a.phi();
    let nr = n as f64;
    let kr = k as f64;

    let mut r = Residuals::new();
    let dlog = f64::from(fwd[1].det / bwd[1].det - 1.0).ln_1p() / (2.0 * h);
    r.insert("dlogD", rel(dlog, f64::from(a.u_plus)));
    r.insert("d2", rel(d(&|l| l.u_minus), f64::from(phi * b.u_minus)));
    r.insert("d3", rel(d(&|l| l.ut_plus), f64::from(phi)));
    let d4up = (a.ut_minus * nr + a.ut_plus * a.ut_minus + phi * b.ut_minus * (kr + 1.0 + nr)) / tr;
    r.insert("d4Up", rel(d(&|l| l.ut_minus), f64::from(d4up)));
    if n >= 2 {
        r.insert(
            "d1",
            rel(d(&|l| l.u_plus), f64::from(-phi * p.ut_minus * b.u_minus)),
        );
        r.insert("d4", rel(d(&|l| l.ut_minus), f64::from(-phi * p.ut_minus)));
        let (um, utm) = (a.u_minus, a.ut_minus);
        if utm.hi == 0.0 {
            return Err(Error::Pole { factor: "Ũ⁻", t });
        }
        let rhs =
            -(um * nr / tr) - (a.ut_plus - tr * phi) / (tr * utm) - phi * p.ut_minus * um / utm;
        r.insert("d2Down", rel(d(&|l| l.u_minus), f64::from(rhs)));
    }
    Ok(r)
}

/// σ(t) = k t − t U⁺ₙ for the symbol e^{t/z}(1+z)^k.
pub fn sigma_from_toeplitz(n: usize, k: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let ctx = ToeplitzContext::generalized(n, k, t)?;
    Ok(k * t - t * Level::new(&ctx)?.u_plus())
}

/// Max residual per identity over a random sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub points: usize,
    pub max_residual: Residuals,
    /// (n, k, t) where each maximum occurred.
    pub worst_point: BTreeMap<&'static str, (usize, u32, f64)>,
}

/// Evaluate every identity at `points` random (n, k, t) with n ∈ 1..=n_max,
/// k ∈ 1..=k_max, t uniform in [t_lo, t_hi]. The same seed gives the same
/// report.
pub fn identity_sweep(
    points: usize,
    n_max: usize,
    k_max: u32,
    (t_lo, t_hi): (f64, f64),
    seed: u64,
) -> Result<SweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<(usize, u32, f64)> = (0..points)
        .map(|_| {
            (
                rng.gen_range(1..=n_max),
                rng.gen_range(1..=k_max),
                rng.gen_range(t_lo..=t_hi),
            )
        })
        .collect();
    let results: Vec<((usize, u32, f64), Residuals)> = grid
        .par_iter()
        .map(|&(n, k, t)| {
            let ctx = ToeplitzContext::new(n, k, t, Which::Increasing)?;
            let mut all = universal_identity_residuals(&ctx)?;
            all.extend(
                universal_identity_residuals(&ToeplitzContext::new(n, k, t, Which::Decreasing)?)?
                    .into_iter()
                    .filter_map(|(name, v)| {
                        DECREASING_NAMES
                            .iter()
                            .find(|(a, _)| *a == name)
                            .map(|(_, b)| (*b, v))
                    }),
            );
            all.extend(nonuniversal_identity_residuals(&ctx)?);
            all.extend(differentiation_residuals(
                &ctx,
                default_step(t).min(t / 2.0),
            )?);
            Ok(((n, k, t), all))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_residual = Residuals::new();
    let mut worst_point = BTreeMap::new();
    for (point, res) in results {
        for (name, v) in res {
            let first = !max_residual.contains_key(name);
            let entry = max_residual.entry(name).or_insert(0.0);
            if first || v > *entry || v.is_nan() {
                *entry = v;
                worst_point.insert(name, point);
            }
        }
    }
    Ok(SweepReport {
        points,
        max_residual,
        worst_point,
    })
}

const DECREASING_NAMES: [(&str, &str); 9] = [
    ("UV", "UV[D]"),
    ("UV.ratio", "UV.ratio[D]"),
    ("f0", "f0[D]"),
    ("V", "V[D]"),
    ("fn", "fn[D]"),
    ("UV1", "UV1[D]"),
    ("UU", "UU[D]"),
    ("Ldmdp", "Ldmdp[D]"),
    ("Vdet", "Vdet[D]"),
];
