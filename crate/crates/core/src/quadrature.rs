//! Gaussian quadrature rules.
//!
//! Legendre nodes come from Newton iteration on the three-term recurrence;
//! Laguerre and Hermite rules from the Golub–Welsch eigenvalue problem.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use statrs::function::gamma::gamma;

#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Map a rule on [-1, 1] to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> GaussRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GaussRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// m-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(m: usize) -> GaussRule {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if m == 1 { (x, 1.0) } else { (p1, p0) };
    let d = m as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss–Legendre on [a, b] with `panels` equal sub-intervals.
pub fn composite_legendre(a: f64, b: f64, panels: usize, m: usize) -> GaussRule {
    let base = gauss_legendre(m);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * m);
    let mut weights = Vec::with_capacity(panels * m);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let r = base.mapped(lo, lo + width);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    GaussRule { nodes, weights }
}

fn golub_welsch(diag: Vec<f64>, off: Vec<f64>, mu0: f64) -> GaussRule {
    let m = diag.len();
    let mut jac = DMatrix::zeros(m, m);
    for i in 0..m {
        jac[(i, i)] = diag[i];
        if i + 1 < m {
            jac[(i, i + 1)] = off[i];
            jac[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(jac);
    // The eigensolver can lose several digits on large Jacobi matrices, so
    // the nodes are polished by Newton on the recurrence and the weights are
    // recomputed as Christoffel numbers.
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .map(|&x0| {
            let x = polish_node(&diag, &off, x0);
            (x, christoffel_weight(&diag, &off, mu0, x))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Monic q_m and q_m′ from q_{j+1} = (x − a_j)q_j − b_j² q_{j−1}.
fn monic_with_derivative(diag: &[f64], off: &[f64], x: f64) -> (f64, f64) {
    let (mut q_prev, mut q) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for j in 0..diag.len() {
        let b2 = if j == 0 { 0.0 } else { off[j - 1] * off[j - 1] };
        let q_next = (x - diag[j]) * q - b2 * q_prev;
        let d_next = q + (x - diag[j]) * d - b2 * d_prev;
        q_prev = q;
        q = q_next;
        d_prev = d;
        d = d_next;
    }
    (q, d)
}

fn polish_node(diag: &[f64], off: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (q, d) = monic_with_derivative(diag, off, x);
        if d == 0.0 || !q.is_finite() {
            break;
        }
        let step = q / d;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// μ₀ / Σ_{j<m} p_j(x)² with p_j orthonormal, p₀ = 1/√μ₀ scaled out.
fn christoffel_weight(diag: &[f64], off: &[f64], mu0: f64, x: f64) -> f64 {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let mut sum = 1.0;
    for j in 0..diag.len() - 1 {
        let b_prev = if j == 0 { 0.0 } else { off[j - 1] };
        let p_next = ((x - diag[j]) * p - b_prev * p_prev) / off[j];
        p_prev = p;
        p = p_next;
        sum += p * p;
    }
    mu0 / sum
}

/// Generalized Gauss–Laguerre rule for the weight `x^alpha e^{-x}` on (0, ∞).
pub fn gauss_laguerre(m: usize, alpha: f64) -> GaussRule {
    assert!(alpha > -1.0);
    let diag = (0..m).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
    let off = (1..m)
        .map(|j| (j as f64 * (j as f64 + alpha)).sqrt())
        .collect();
    golub_welsch(diag, off, gamma(alpha + 1.0))
}

/// Gauss–Hermite rule for the weight `e^{-x²}` on ℝ.
pub fn gauss_hermite(m: usize) -> GaussRule {
    let off = (1..m).map(|j| (j as f64 / 2.0).sqrt()).collect();
    golub_welsch(vec![0.0; m], off, std::f64::consts::PI.sqrt())
}

/// Σ_{i<total} f(i) in parallel over chunks of `chunk` terms. The chunk
/// boundaries are fixed, so the result does not depend on the thread count.
pub fn parallel_sum<F>(total: usize, chunk: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = total.div_ceil(chunk);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| (c * chunk..((c + 1) * chunk).min(total)).map(&f).sum())
        .collect();
    partial.iter().sum()
}
