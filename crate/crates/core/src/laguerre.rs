//! Smallest eigenvalue of the k×k Laguerre ensemble with weight x^n e^{−x}.
//! Note the roles: k is the matrix size, n the weight exponent.
//!
//! Prob(λ_min ≥ t) = det(I − K_L) on (0, t), computed by Nyström, and by
//! direct k-fold quadrature for k ≤ 3.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{factorial, int, to_f64};
use crate::linalg::Lu;
use crate::quadrature::{gauss_laguerre, gauss_legendre, parallel_sum};
use crate::special::ln_factorial;

pub const DEFAULT_NODES: usize = 40;

/// Largest matrix size for the direct quadrature route.
pub const QUADRATURE_MAX_K: u32 = 3;

/// L_k^{(α)}(x) by the three-term recurrence.
pub fn laguerre_polynomial(k: u32, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// d/dx L_k^{(α)} = −L_{k−1}^{(α+1)}
pub fn laguerre_derivative(k: u32, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        -laguerre_polynomial(k - 1, alpha + 1.0, x)
    }
}

/// √(k!/(n+k)!)·x^{n/2}·e^{−x/2}·L_k^{(n)}(x)
pub fn phi_l(k: u32, n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return if n == 0 && x == 0.0 {
            prefactor(k, n, 0.0).exp() * laguerre_polynomial(k, 0.0, 0.0)
        } else {
            0.0
        };
    }
    prefactor(k, n, x).exp() * laguerre_polynomial(k, n as f64, x)
}

/// d/dx φ_{L,k}
pub fn phi_l_derivative(k: u32, n: u32, x: f64) -> f64 {
    let p = prefactor(k, n, x).exp();
    let l = laguerre_polynomial(k, n as f64, x);
    let dl = laguerre_derivative(k, n as f64, x);
    p * ((n as f64 / (2.0 * x) - 0.5) * l + dl)
}

/// log of √(k!/(n+k)!)·x^{n/2}·e^{−x/2}
fn prefactor(k: u32, n: u32, x: f64) -> f64 {
    let half_n = n as f64 / 2.0;
    let log_x = if n == 0 { 0.0 } else { half_n * x.ln() };
    0.5 * (ln_factorial(k) - ln_factorial(n + k)) + log_x - x / 2.0
}

/// K_L for matrix size k and weight exponent n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaguerreKernel {
    k: u32,
    n: u32,
}

impl LaguerreKernel {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "matrix size k must be positive".into(),
            ));
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn phi(&self, j: u32, x: f64) -> f64 {
        phi_l(j, self.n, x)
    }

    fn coupling(&self) -> f64 {
        let k = self.k as f64;
        (k * (k + self.n as f64)).sqrt()
    }

    /// Christoffel–Darboux form. Its diagonal comes from the derivative limit,
    /// and nearly colliding points use the diagonal at their midpoint.
    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let scale = x.abs().max(y.abs()).max(1.0);
        if (x - y).abs() < 1e-6 * scale {
            return self.diagonal(0.5 * (x + y));
        }
        let (k, n) = (self.k, self.n);
        let num = phi_l(k, n, x) * phi_l(k - 1, n, y) - phi_l(k - 1, n, x) * phi_l(k, n, y);
        -self.coupling() * num / (x - y)
    }

    /// K_L(x, x)
    pub fn diagonal(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return if self.n == 0 {
                self.sum_form(0.0, 0.0)
            } else {
                0.0
            };
        }
        let (k, n) = (self.k, self.n);
        self.coupling()
            * (phi_l(k, n, x) * phi_l_derivative(k - 1, n, x)
                - phi_l(k - 1, n, x) * phi_l_derivative(k, n, x))
    }

    /// Σ_{j<k} φ_j(x)φ_j(y)
    pub fn sum_form(&self, x: f64, y: f64) -> f64 {
        (0..self.k)
            .map(|j| phi_l(j, self.n, x) * phi_l(j, self.n, y))
            .sum()
    }
}

/// c_{k,n} = 1 / (1!·2!···k!·Π_{j<k}(n+j)!)
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationConstants {
    pub k: u32,
    pub n: u32,
    pub c: BigRational,
}

impl NormalizationConstants {
    pub fn new(k: u32, n: u32) -> Self {
        let mut den = BigRational::one();
        for j in 1..=k {
            den *= int(factorial(j));
        }
        for j in 0..k {
            den *= int(factorial(n + j));
        }
        Self {
            k,
            n,
            c: den.recip(),
        }
    }

    pub fn value(&self) -> f64 {
        to_f64(&self.c)
    }
}

/// Symmetrized Nyström matrix √w_i K(x_i, x_j) √w_j on (0, t).
pub fn nystrom_matrix(kernel: &LaguerreKernel, t: f64, m_nodes: usize) -> DMatrix<f64> {
    let rule = gauss_legendre(m_nodes).mapped(0.0, t);
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<f64>> = (0..m_nodes)
        .into_par_iter()
        .map(|i| {
            (0..m_nodes)
                .map(|j| sw[i] * kernel.kernel(rule.nodes[i], rule.nodes[j]) * sw[j])
                .collect()
        })
        .collect();
    DMatrix::from_fn(m_nodes, m_nodes, |i, j| rows[i][j])
}

/// det(I − K_L) on (0, t).
pub fn smallest_eigenvalue_prob_fredholm(k: u32, n: u32, t: f64, m_nodes: usize) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must be finite and ≥ 0"
        )));
    }
    if m_nodes < 10 {
        return Err(Error::InvalidParameter(format!(
            "m_nodes = {m_nodes} must be at least 10"
        )));
    }
    let kernel = LaguerreKernel::new(k, n)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let a = DMatrix::identity(m_nodes, m_nodes) - nystrom_matrix(&kernel, t, m_nodes);
    Ok(Lu::factor(&a)?.det())
}

/// Smallest eigenvalue of the symmetrized Nyström matrix.
pub fn nystrom_min_eigenvalue(k: u32, n: u32, t: f64, m_nodes: usize) -> Result<f64> {
    let kernel = LaguerreKernel::new(k, n)?;
    let a = nystrom_matrix(&kernel, t, m_nodes);
    let sym = (&a + a.transpose()) * 0.5;
    Ok(sym
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// c_{k,n}·∫_t^∞···∫_t^∞ Π x_j^n e^{−Σx_j} Δ(x)² dx by a tensor Gauss–Laguerre
/// rule shifted to (t, ∞). The integrand is a polynomial times e^{−Σx}, so
/// the rule is exact up to roundoff.
pub fn smallest_eigenvalue_prob_quadrature(k: u32, n: u32, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "matrix size k must be positive".into(),
        ));
    }
    if k > QUADRATURE_MAX_K {
        return Err(Error::BudgetExceeded {
            what: "direct Laguerre quadrature dimension",
            requested: k as u128,
            budget: QUADRATURE_MAX_K as u128,
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must be finite and ≥ 0"
        )));
    }
    // Degree in each variable is at most n + 2(k−1).
    let m = (n + 2 * k) as usize / 2 + 2;
    let rule = gauss_laguerre(m, 0.0);
    let k = k as usize;
    let c = NormalizationConstants::new(k as u32, n).value();
    let total = m.pow(k as u32);
    let sum = parallel_sum(total, 4096, |mut idx| {
        let mut x = [0.0; QUADRATURE_MAX_K as usize];
        let mut w = 1.0;
        for xi in x.iter_mut().take(k) {
            let i = idx % m;
            idx /= m;
            *xi = t + rule.nodes[i];
            w *= rule.weights[i];
        }
        let mut f = w;
        for i in 0..k {
            f *= x[i].powi(n as i32);
            for j in 0..i {
                f *= (x[i] - x[j]).powi(2);
            }
        }
        f
    });
    Ok(c * (-(k as f64) * t).exp() * sum)
}

/// Γ(n+1, t)/n! = e^{−t} Σ_{j≤n} t^j/j!, the k = 1 case.
pub fn incomplete_gamma_form(n: u32, t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=n {
        term *= t / j as f64;
        sum += term;
    }
    (-t).exp() * sum
}
