//! Small-size checks of the symmetric-function identities behind the
//! Toeplitz representation: Cauchy–Binet, Jacobi–Trudi Schur polynomials,
//! Gessel's identity and its dual, and the Cauchy limits.
//!
//! Identities are tested as exact rational equalities wherever the sums are
//! finite. Gessel's identity itself involves infinite sums; it is checked
//! exactly after grading every variable by q (both sides are then formal power
//! series in q), and in floating point against a rigorous tail bound.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{partitions, Partition};
use crate::error::{Error, Result};
use crate::exact::{det_rational, to_f64};
use crate::linalg::Lu;
use crate::series::{toeplitz_det_from_symbol, RationalSeries};

/// Finite sets of variables x, y with every entry in (−1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct VariableAssignment {
    x: Vec<BigRational>,
    y: Vec<BigRational>,
}

impl VariableAssignment {
    pub fn new(x: Vec<BigRational>, y: Vec<BigRational>) -> Result<Self> {
        let one = BigRational::one();
        if let Some(bad) = x.iter().chain(&y).find(|v| v.abs() >= one) {
            return Err(Error::InvalidParameter(format!(
                "variable {bad} is outside (-1, 1)"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[BigRational] {
        &self.x
    }

    pub fn y(&self) -> &[BigRational] {
        &self.y
    }

    fn x_f64(&self) -> Vec<f64> {
        self.x.iter().map(to_f64).collect()
    }

    fn y_f64(&self) -> Vec<f64> {
        self.y.iter().map(to_f64).collect()
    }

    /// max |x_i y_j|, the geometric decay rate of every tail.
    fn rate(&self) -> f64 {
        let mx = self.x_f64().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let my = self.y_f64().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        mx * my
    }
}

/// h_0, …, h_{max_r} of the given variables.
pub fn complete_homogeneous(max_r: usize, vars: &[BigRational]) -> Vec<BigRational> {
    let mut h = vec![BigRational::zero(); max_r + 1];
    h[0] = BigRational::one();
    // Adding a variable v: h_r ← h_r + v·h_{r−1} (new), in increasing r.
    for v in vars {
        for r in 1..=max_r {
            let prev = &h[r - 1] * v;
            h[r] += prev;
        }
    }
    h
}

/// e_0, …, e_m of m variables.
pub fn elementary(vars: &[BigRational]) -> Vec<BigRational> {
    let mut e = vec![BigRational::zero(); vars.len() + 1];
    e[0] = BigRational::one();
    for (count, v) in vars.iter().enumerate() {
        for r in (1..=count + 1).rev() {
            let prev = &e[r - 1] * v;
            e[r] += prev;
        }
    }
    e
}

fn complete_homogeneous_f64(max_r: usize, vars: &[f64]) -> Vec<f64> {
    let mut h = vec![0.0; max_r + 1];
    h[0] = 1.0;
    for &v in vars {
        for r in 1..=max_r {
            h[r] += v * h[r - 1];
        }
    }
    h
}

fn elementary_f64(vars: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; vars.len() + 1];
    e[0] = 1.0;
    for (count, &v) in vars.iter().enumerate() {
        for r in (1..=count + 1).rev() {
            e[r] += v * e[r - 1];
        }
    }
    e
}

fn at(seq: &[BigRational], idx: i64) -> BigRational {
    usize::try_from(idx)
        .ok()
        .and_then(|i| seq.get(i).cloned())
        .unwrap_or_else(BigRational::zero)
}

fn all_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < m - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Σ_S det A(·|S) det B(S|·) over increasing m-subsets S of {1..n}, for A m×n
/// and B n×m. Equals det(AB).
pub fn cauchy_binet(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Result<BigRational> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != n) || b.len() != n || b.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidParameter("A must be m×n and B n×m".into()));
    }
    if n < m {
        return Err(Error::InvalidParameter(format!(
            "Cauchy–Binet needs n ≥ m, got m = {m}, n = {n}"
        )));
    }
    let mut total = BigRational::zero();
    for s in all_subsets(n, m) {
        let a_minor: Vec<Vec<BigRational>> = a
            .iter()
            .map(|row| s.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let b_minor: Vec<Vec<BigRational>> = s.iter().map(|&r| b[r].clone()).collect();
        total += det_rational(&a_minor) * det_rational(&b_minor);
    }
    Ok(total)
}

/// s_λ(x) = det(h_{λ_i + j − i}(x)) by Jacobi–Trudi.
pub fn schur_polynomial(lambda: &Partition, vars: &[BigRational]) -> BigRational {
    let parts = lambda.parts();
    let l = parts.len();
    let h = complete_homogeneous(lambda.first_row() as usize + l, vars);
    let m: Vec<Vec<BigRational>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| at(&h, parts[i] as i64 + j as i64 - i as i64))
                .collect()
        })
        .collect();
    det_rational(&m)
}

/// s_{λ′}(x) = det(e_{λ_i + j − i}(x)), the dual Jacobi–Trudi form.
pub fn schur_polynomial_conjugate(lambda: &Partition, vars: &[BigRational]) -> BigRational {
    let parts = lambda.parts();
    let l = parts.len();
    let e = elementary(vars);
    let m: Vec<Vec<BigRational>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| at(&e, parts[i] as i64 + j as i64 - i as i64))
                .collect()
        })
        .collect();
    det_rational(&m)
}

/// Which Toeplitz symbol a coefficient table represents.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolMode {
    /// Π(1 − y z⁻¹)⁻¹ Π(1 − x z)⁻¹
    General(VariableAssignment),
    /// Π(1 + y z⁻¹) Π(1 + x z)
    Dual(VariableAssignment),
    /// e^{t/z} (1 + z)^k; k may be any real (negative k gives the D route).
    I { k: f64, t: f64 },
    /// e^{t/z} (1 − z)^{−k}
    D { k: f64, t: f64 },
    /// e^{t (z + 1/z)}
    P { t: f64 },
}

/// Floating-point Fourier coefficients of a symbol.
#[derive(Debug, Clone)]
pub struct SymbolCoefficients {
    mode: SymbolMode,
    h_x: Vec<f64>,
    h_y: Vec<f64>,
}

const MAX_TERMS: usize = 20_000;

impl SymbolCoefficients {
    pub fn new(mode: SymbolMode) -> Result<Self> {
        let (h_x, h_y) = match &mode {
            SymbolMode::General(v) => {
                let rate = v.rate();
                if rate >= 0.999 {
                    return Err(Error::Nonconvergent(format!(
                        "max |x_i y_j| = {rate} is too close to 1"
                    )));
                }
                // Enough terms for ρ^L below 1e-20 relative; polynomial growth
                // from repeated variables is covered by the factor of two.
                let len = if rate == 0.0 {
                    64
                } else {
                    (2.0 * (-46.0 / rate.ln()) + 64.0).min(MAX_TERMS as f64) as usize
                };
                (
                    complete_homogeneous_f64(len, &v.x_f64()),
                    complete_homogeneous_f64(len, &v.y_f64()),
                )
            }
            SymbolMode::Dual(v) => (elementary_f64(&v.x_f64()), elementary_f64(&v.y_f64())),
            _ => (Vec::new(), Vec::new()),
        };
        Ok(Self { mode, h_x, h_y })
    }

    pub fn mode(&self) -> &SymbolMode {
        &self.mode
    }

    /// f_j, the coefficient of z^j.
    pub fn coefficient(&self, j: i64) -> f64 {
        match self.mode {
            SymbolMode::General(_) | SymbolMode::Dual(_) => {
                // Σ_ℓ a_{ℓ+j} b_ℓ with a, b the x- and y-sequences.
                let start = (-j).max(0) as usize;
                (start..self.h_y.len())
                    .map(|l| {
                        let i = (l as i64 + j) as usize;
                        self.h_x.get(i).copied().unwrap_or(0.0) * self.h_y[l]
                    })
                    .sum()
            }
            SymbolMode::I { k, t } => binomial_exponential_sum(j, t, |r| k - r, |r| r + 1.0),
            SymbolMode::D { k, t } => binomial_exponential_sum(j, t, |r| k + r, |r| r + 1.0),
            SymbolMode::P { t } => {
                let a = j.unsigned_abs() as f64;
                let mut term = (0..j.unsigned_abs()).fold(1.0, |acc, i| acc * t / (i as f64 + 1.0));
                let mut sum = term;
                let t2 = t * t;
                for m in 0..MAX_TERMS {
                    let mf = m as f64;
                    term *= t2 / ((mf + 1.0) * (mf + 1.0 + a));
                    sum += term;
                    if term.abs() <= 1e-18 * sum.abs() {
                        break;
                    }
                }
                sum
            }
        }
    }
}

/// Σ_{m ≥ max(0, −j)} t^m/m! · c_{j+m}, where c_0 = 1 and c_{r+1}/c_r =
/// num(r)/den(r). Covers C(k, r) (num = k − r) and C(k + r − 1, r)
/// (num = k + r), both with den = r + 1.
fn binomial_exponential_sum(
    j: i64,
    t: f64,
    num: impl Fn(f64) -> f64,
    den: impl Fn(f64) -> f64,
) -> f64 {
    let m0 = (-j).max(0) as usize;
    let r0 = (j + m0 as i64) as usize;
    // c_{r0} and t^{m0}/m0!
    let mut c = 1.0;
    for r in 0..r0 {
        c *= num(r as f64) / den(r as f64);
    }
    let mut power = 1.0;
    for m in 0..m0 {
        power *= t / (m as f64 + 1.0);
    }
    let mut term = power * c;
    let mut sum = term;
    let mut m = m0;
    let mut r = r0;
    for _ in 0..MAX_TERMS {
        let step = num(r as f64) / den(r as f64) * t / (m as f64 + 1.0);
        if step == 0.0 {
            break;
        }
        term *= step;
        sum += term;
        m += 1;
        r += 1;
        if term.abs() <= 1e-18 * sum.abs() && step.abs() < 1.0 {
            break;
        }
    }
    sum
}

/// det(f_{i−j}) for a symbol, in floating point.
pub fn toeplitz_det_f64(n: usize, symbol: &SymbolCoefficients) -> Result<f64> {
    let coeffs: Vec<f64> = (0..2 * n.max(1) - 1)
        .map(|idx| symbol.coefficient(idx as i64 - (n as i64 - 1)))
        .collect();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| coeffs[i + n - 1 - j]);
    Ok(Lu::factor(&m)?.det())
}

/// Outcome of comparing the Schur-function side of Gessel's identity with the
/// Toeplitz determinant.
#[derive(Debug, Clone)]
pub struct GesselReport {
    pub n: usize,
    pub max_weight: u32,
    /// Σ s_λ(x) s_λ(y) over ℓ(λ) ≤ n, |λ| ≤ max_weight, exact.
    pub schur_sum: BigRational,
    /// The same truncation of det T_n read off the q-graded determinant, exact.
    pub graded_determinant: BigRational,
    /// The full determinant of the (infinite-sum) symbol, floating point.
    pub toeplitz_determinant: f64,
    /// |schur_sum − toeplitz_determinant|
    pub residual: f64,
    /// Rigorous bound on Σ_{|λ| > max_weight} |s_λ(x) s_λ(y)|.
    pub tail_bound: f64,
}

impl GesselReport {
    pub fn passes(&self) -> bool {
        self.schur_sum == self.graded_determinant
            && self.residual <= self.tail_bound + 1e-12 * (1.0 + self.toeplitz_determinant.abs())
    }
}

/// Π(1 − p·a_ij)⁻¹ minus its expansion through p^W, evaluated at p = 1.
fn cauchy_tail(rates: &[BigRational], max_weight: u32) -> Result<f64> {
    let order = max_weight as usize;
    let mut product = BigRational::one();
    let mut series = RationalSeries::one(order);
    for a in rates {
        let one = BigRational::one();
        if *a >= one {
            return Err(Error::Nonconvergent(format!("rate {a} ≥ 1")));
        }
        product /= &one - a;
        let mut c = Vec::with_capacity(order + 1);
        let mut p = BigRational::one();
        for _ in 0..=order {
            c.push(p.clone());
            p *= a;
        }
        series = &series * &RationalSeries::new(c, order);
    }
    let partial: BigRational = series.coeffs().iter().cloned().sum();
    Ok(to_f64(&(product - partial)))
}

/// Compare Σ_{ℓ(λ) ≤ n} s_λ(x) s_λ(y), truncated at |λ| ≤ max_weight, with
/// det T_n of the symbol Π(1 − y/z)⁻¹ Π(1 − x z)⁻¹.
pub fn gessel_check(
    n: usize,
    assignment: &VariableAssignment,
    max_weight: u32,
) -> Result<GesselReport> {
    let x = assignment.x();
    let y = assignment.y();
    let depth = n.min(x.len()).min(y.len());
    let mut schur_sum = BigRational::zero();
    for w in 0..=max_weight {
        for lambda in partitions(w, depth, w) {
            schur_sum += schur_polynomial(&lambda, x) * schur_polynomial(&lambda, y);
        }
    }

    // Grade x, y by q: A_i(q) = Σ_ℓ q^{2ℓ+i} h_{ℓ+i}(x) h_ℓ(y).
    let order = 2 * max_weight as usize;
    let hx = complete_homogeneous(order, x);
    let hy = complete_homogeneous(order, y);
    let graded = toeplitz_det_from_symbol(
        n,
        |i| {
            let mut c = vec![BigRational::zero(); order + 1];
            for l in 0..=order {
                let deg = 2 * l as i64 + i;
                if deg < 0 || deg as usize > order || (l as i64 + i) < 0 {
                    continue;
                }
                c[deg as usize] = at(&hx, l as i64 + i) * &hy[l];
            }
            RationalSeries::new(c, order)
        },
        order,
    );
    let graded_determinant: BigRational = graded.coeffs().iter().cloned().sum();

    let rates: Vec<BigRational> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| (a * b).abs()))
        .collect();
    let tail_bound = cauchy_tail(&rates, max_weight)?;
    if !tail_bound.is_finite() || tail_bound >= 1.0 {
        return Err(Error::Nonconvergent(format!(
            "tail bound {tail_bound} beyond weight {max_weight} is not small"
        )));
    }
    let symbol = SymbolCoefficients::new(SymbolMode::General(assignment.clone()))?;
    let toeplitz_determinant = toeplitz_det_f64(n, &symbol)?;
    let residual = (to_f64(&schur_sum) - toeplitz_determinant).abs();
    Ok(GesselReport {
        n,
        max_weight,
        schur_sum,
        graded_determinant,
        toeplitz_determinant,
        residual,
        tail_bound,
    })
}

/// The dual identity Σ_{λ₁ ≤ n} s_λ(x) s_λ(y) = det T_n(Π(1 + y/z) Π(1 + x z)).
/// With finitely many variables both sides are finite sums; returns
/// (Schur side, determinant side), both exact.
pub fn dual_gessel_check(n: usize, assignment: &VariableAssignment) -> (BigRational, BigRational) {
    let x = assignment.x();
    let y = assignment.y();
    let depth = x.len().min(y.len());
    let mut lhs = BigRational::zero();
    for w in 0..=(depth * n) as u32 {
        for lambda in partitions(w, depth, n as u32) {
            lhs += schur_polynomial(&lambda, x) * schur_polynomial(&lambda, y);
        }
    }
    let ex = elementary(x);
    let ey = elementary(y);
    let symbol = |i: i64| -> BigRational {
        (0..ey.len() as i64)
            .map(|l| at(&ex, l + i) * &ey[l as usize])
            .sum()
    };
    let m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| symbol(i as i64 - j as i64)).collect())
        .collect();
    (lhs, det_rational(&m))
}

/// Σ_λ s_λ(x) s_{λ′}(y) and Π(1 + x_i y_j), both exact.
pub fn dual_cauchy_check(assignment: &VariableAssignment) -> (BigRational, BigRational) {
    let x = assignment.x();
    let y = assignment.y();
    let mut lhs = BigRational::zero();
    // s_λ(x) needs ℓ(λ) ≤ |x|; s_{λ′}(y) needs λ₁ ≤ |y|.
    for w in 0..=(x.len() * y.len()) as u32 {
        for lambda in partitions(w, x.len(), y.len() as u32) {
            lhs += schur_polynomial(&lambda, x) * schur_polynomial_conjugate(&lambda, y);
        }
    }
    let rhs = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| BigRational::one() + a * b))
        .fold(BigRational::one(), |acc, f| acc * f);
    (lhs, rhs)
}

/// R_n and its dual, in floating point, against the common limit
/// Π(1 − x_i y_j)⁻¹.
#[derive(Debug, Clone)]
pub struct CauchyReport {
    pub limit: f64,
    /// (n, R_n, R̃_n)
    pub rows: Vec<(usize, f64, f64)>,
}

impl CauchyReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| (r.1 - self.limit).abs()).collect()
    }

    pub fn dual_errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| (r.2 - self.limit).abs()).collect()
    }

    /// Both error sequences nonincreasing in n, up to roundoff.
    pub fn monotone(&self) -> bool {
        let slack = 1e-13 * self.limit;
        let ok = |e: Vec<f64>| e.windows(2).all(|w| w[1] <= w[0] + slack);
        ok(self.errors()) && ok(self.dual_errors())
    }
}

pub fn cauchy_limit_check(assignment: &VariableAssignment, n_max: usize) -> Result<CauchyReport> {
    let general = SymbolCoefficients::new(SymbolMode::General(assignment.clone()))?;
    let dual = SymbolCoefficients::new(SymbolMode::Dual(assignment.clone()))?;
    let limit = assignment
        .x_f64()
        .iter()
        .flat_map(|a| {
            assignment
                .y_f64()
                .into_iter()
                .map(move |b| 1.0 / (1.0 - a * b))
        })
        .product();
    let rows = (1..=n_max)
        .map(|n| {
            Ok((
                n,
                toeplitz_det_f64(n, &general)?,
                toeplitz_det_f64(n, &dual)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CauchyReport { limit, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::semistandard_tableaux_count;
    use crate::exact::{int, ratio};
    use crate::series::{symbol_coefficient, SymbolKind};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn assign(x: &[(i64, i64)], y: &[(i64, i64)]) -> VariableAssignment {
        let f = |v: &[(i64, i64)]| v.iter().map(|&(p, q)| ratio(p, q)).collect();
        VariableAssignment::new(f(x), f(y)).unwrap()
    }

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn assignment_validation() {
        assert!(VariableAssignment::new(vec![int(1)], vec![]).is_err());
        assert!(VariableAssignment::new(vec![ratio(-1, 1)], vec![]).is_err());
    }

    #[test]
    fn cauchy_binet_examples() {
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(cauchy_binet(&id, &id).unwrap(), int(1));
        let a = vec![
            vec![int(1), int(2), int(3)],
            vec![int(0), ratio(1, 2), int(-1)],
        ];
        let b = vec![
            vec![int(2), int(1)],
            vec![int(1), int(1)],
            vec![int(0), ratio(1, 3)],
        ];
        // AB = [[4, 4], [1/2, 1/6]], det = 4/6 − 2 = −4/3
        assert_eq!(cauchy_binet(&a, &b).unwrap(), ratio(-4, 3));
        assert!(cauchy_binet(&b, &a).is_err());
    }

    #[test]
    fn schur_examples() {
        let x = vec![ratio(1, 3), ratio(1, 5)];
        assert_eq!(schur_polynomial(&part(&[1]), &x), ratio(8, 15));
        assert_eq!(schur_polynomial(&part(&[2, 1]), &[int(1), int(1)]), int(2));
        assert_eq!(schur_polynomial(&part(&[1, 1, 1]), &x), int(0));
        assert_eq!(schur_polynomial(&Partition::empty(), &x), int(1));
    }

    #[test]
    fn schur_at_ones_is_hook_content() {
        for k in 1..=4usize {
            let ones = vec![int(1); k];
            for w in 0..=8 {
                for lambda in partitions(w, w as usize, w) {
                    let count = BigRational::from_integer(BigInt::from(
                        semistandard_tableaux_count(&lambda, k as u32),
                    ));
                    assert_eq!(schur_polynomial(&lambda, &ones), count, "{lambda:?} k={k}");
                    assert_eq!(
                        schur_polynomial_conjugate(&lambda.conjugate(), &ones),
                        count
                    );
                }
            }
        }
    }

    #[test]
    fn gessel_small_examples() {
        // n = 1, one variable each: R_1 = Σ (xy)^m.
        let v = assign(&[(1, 2)], &[(1, 3)]);
        let r = gessel_check(1, &v, 12).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!((r.toeplitz_determinant - 1.2).abs() < 1e-14);
        let empty = assign(&[], &[(1, 3)]);
        let r = gessel_check(2, &empty, 6).unwrap();
        assert_eq!(r.schur_sum, int(1));
        assert!((r.toeplitz_determinant - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gessel_with_several_variables() {
        let v = assign(&[(1, 2), (-1, 3)], &[(2, 5), (1, 4)]);
        for n in 1..=4 {
            let r = gessel_check(n, &v, 10).unwrap();
            assert!(r.passes(), "n={n} {r:?}");
            assert!(r.tail_bound < 1e-3);
        }
    }

    #[test]
    fn dual_identity_is_exact() {
        let v = assign(&[(1, 2), (-1, 3), (1, 7)], &[(2, 5), (1, 4)]);
        for n in 0..=4 {
            let (lhs, rhs) = dual_gessel_check(n, &v);
            assert_eq!(lhs, rhs, "n={n}");
        }
        let (lhs, rhs) = dual_cauchy_check(&v);
        assert_eq!(lhs, rhs);
        let (lhs, rhs) = dual_cauchy_check(&assign(&[(1, 2)], &[(1, 2)]));
        assert_eq!((lhs.clone(), rhs), (ratio(5, 4), ratio(5, 4)));
    }

    #[test]
    fn cauchy_limits() {
        let r = cauchy_limit_check(&assign(&[(1, 2)], &[(1, 2)]), 6).unwrap();
        assert!((r.limit - 4.0 / 3.0).abs() < 1e-15);
        assert!(r.monotone());
        assert!(r.errors()[5] < 1e-14);
        // Two y variables: R_n is already the full Cauchy sum at n = 2, while
        // the dual restricts λ₁ and converges geometrically.
        let r =
            cauchy_limit_check(&assign(&[(1, 2), (1, 3), (1, 5)], &[(1, 2), (2, 3)]), 30).unwrap();
        assert!(r.monotone());
        assert!(r.errors()[1..].iter().all(|e| *e < 1e-12));
        assert!(r.dual_errors()[4] > 1e-2 && r.dual_errors()[29] < 1e-10);
        let r = cauchy_limit_check(&assign(&[], &[(1, 2)]), 3).unwrap();
        assert!(r.rows.iter().all(|row| row.1 == 1.0 && row.2 == 1.0));
    }

    #[test]
    fn specialized_symbols_match_series() {
        for &(k, t) in &[(1u32, 0.5), (3, 1.25), (5, 4.0)] {
            let i = SymbolCoefficients::new(SymbolMode::I { k: k as f64, t }).unwrap();
            let d = SymbolCoefficients::new(SymbolMode::D { k: k as f64, t }).unwrap();
            let p = SymbolCoefficients::new(SymbolMode::P { t }).unwrap();
            for j in -6i64..=6 {
                for (sym, kind) in [
                    (&i, SymbolKind::I { k }),
                    (&d, SymbolKind::D { k }),
                    (&p, SymbolKind::P),
                ] {
                    let exact = symbol_coefficient(kind, j, 80).eval(t);
                    let got = sym.coefficient(j);
                    assert!(
                        (got - exact).abs() <= 1e-14 * exact.abs().max(1.0),
                        "{kind:?} j={j}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn negative_alphabet_is_the_signed_d_symbol() {
        // C(−k, r) = (−1)^r C(k + r − 1, r), so f_j^I(−k, −t) = (−1)^j f_j^D(k, t).
        for &(k, t) in &[(2.0, 0.7), (3.0, 2.5)] {
            let neg = SymbolCoefficients::new(SymbolMode::I { k: -k, t: -t }).unwrap();
            let d = SymbolCoefficients::new(SymbolMode::D { k, t }).unwrap();
            for j in -5i64..=5 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                assert!(
                    (neg.coefficient(j) - sign * d.coefficient(j)).abs()
                        < 1e-13 * d.coefficient(j).abs().max(1.0)
                );
            }
        }
    }

    proptest! {
        #[test]
        fn cauchy_binet_equals_det_of_product(
            m in 1usize..=3, extra in 0usize..=2,
            seed in prop::collection::vec(-5i64..=5, 30),
        ) {
            let n = m + extra;
            let a: Vec<Vec<BigRational>> = (0..m).map(|i| (0..n).map(|j| ratio(seed[i * n + j], 2)).collect()).collect();
            let b: Vec<Vec<BigRational>> = (0..n).map(|i| (0..m).map(|j| ratio(seed[15 + (i * m + j) % 15], 3)).collect()).collect();
            let ab: Vec<Vec<BigRational>> = (0..m)
                .map(|i| (0..m).map(|j| (0..n).map(|l| &a[i][l] * &b[l][j]).sum()).collect())
                .collect();
            prop_assert_eq!(cauchy_binet(&a, &b).unwrap(), det_rational(&ab));
        }

        #[test]
        fn gessel_holds_for_random_variables(
            xs in prop::collection::vec(-4i64..=4, 0..=2),
            ys in prop::collection::vec(-4i64..=4, 0..=2),
            n in 1usize..=4,
        ) {
            let x: Vec<(i64, i64)> = xs.iter().map(|&p| (p, 9)).collect();
            let y: Vec<(i64, i64)> = ys.iter().map(|&p| (p, 9)).collect();
            let r = gessel_check(n, &assign(&x, &y), 8).unwrap();
            prop_assert!(r.passes(), "{:?}", r);
        }
    }
}
