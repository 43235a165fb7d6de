//! Truncated power series in t with exact rational coefficients, and Toeplitz
//! determinants over that ring.
//!
//! The symbols I and D reduce to the identity-like unit lower triangular
//! matrix at t = 0, so every leading principal minor is a unit in Q[[t]] and
//! fraction-free elimination stays exact modulo t^{M+1}.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{DistributionTable, Route, Which};
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, to_f64};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 12;

/// c₀ + c₁t + … + c_M t^M, known modulo t^{M+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

impl RationalSeries {
    /// Coefficients beyond `order` are dropped; missing ones are zero.
    pub fn new(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The series t.
    pub fn variable(order: usize) -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Substitute t → c·t.
    pub fn dilate(&self, c: &BigRational) -> Self {
        let mut power = BigRational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a * &power;
                power *= c;
                v
            })
            .collect();
        Self { coeffs }
    }

    /// d/dt; the result has order one less (or 0).
    pub fn derivative(&self) -> Self {
        let m = self.order();
        let coeffs = (1..=m).map(|i| &self.coeffs[i] * BigInt::from(i)).collect();
        Self::new(coeffs, m.saturating_sub(1))
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::InvalidParameter(
                "series with zero constant term is not invertible".into(),
            ));
        }
        let m = self.order();
        let inv0 = c0.recip();
        let mut out = vec![inv0.clone()];
        for i in 1..=m {
            let mut acc = BigRational::zero();
            for j in 1..=i {
                acc += &self.coeffs[j] * &out[i - j];
            }
            out.push(-acc * &inv0);
        }
        Ok(Self { coeffs: out })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + to_f64(c))
    }
}

impl Add for &RationalSeries {
    type Output = RationalSeries;
    fn add(self, rhs: Self) -> RationalSeries {
        let m = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..=m).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &RationalSeries {
    type Output = RationalSeries;
    fn sub(self, rhs: Self) -> RationalSeries {
        let m = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..=m).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;
    fn mul(self, rhs: Self) -> RationalSeries {
        let m = self.order().min(rhs.order());
        let mut coeffs = vec![BigRational::zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(m + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        RationalSeries { coeffs }
    }
}

impl Neg for &RationalSeries {
    type Output = RationalSeries;
    fn neg(self) -> RationalSeries {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Symbol whose Fourier coefficients fill the Toeplitz matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// e^{t/z} (1 + z)^k
    I { k: u32 },
    /// e^{t/z} (1 − z)^{−k}
    D { k: u32 },
    /// e^{t (z + 1/z)}
    P,
}

impl SymbolKind {
    pub fn for_statistic(which: Which, k: u32) -> Self {
        match which {
            Which::Increasing => SymbolKind::I { k },
            Which::Decreasing => SymbolKind::D { k },
        }
    }
}

fn inv_factorial(m: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(factorial(m)))
}

fn from_uint(v: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// The Fourier coefficient f_j(t) as a series to order `order`.
pub fn symbol_coefficient(kind: SymbolKind, j: i64, order: usize) -> RationalSeries {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    match kind {
        SymbolKind::I { k } => {
            for (m, c) in coeffs.iter_mut().enumerate() {
                let r = j + m as i64;
                if r >= 0 {
                    *c = from_uint(binomial(k as u64, r as u64)) * inv_factorial(m as u32);
                }
            }
        }
        SymbolKind::D { k } => {
            for (m, c) in coeffs.iter_mut().enumerate() {
                let r = j + m as i64;
                if r >= 0 {
                    let top = k as u64 + r as u64 - 1;
                    *c = from_uint(binomial(top, r as u64)) * inv_factorial(m as u32);
                }
            }
        }
        SymbolKind::P => {
            let a = j.unsigned_abs() as usize;
            let mut m = 0usize;
            while 2 * m + a <= order {
                coeffs[2 * m + a] = inv_factorial(m as u32) * inv_factorial((m + a) as u32);
                m += 1;
            }
        }
    }
    RationalSeries { coeffs }
}

/// det T_n(f) as a series, by Bareiss elimination over Q[[t]].
pub fn toeplitz_det_series(n: usize, kind: SymbolKind, order: usize) -> RationalSeries {
    toeplitz_det_from_symbol(n, |j| symbol_coefficient(kind, j, order), order)
}

/// det (f_{i−j}) for any symbol whose Toeplitz matrix is the identity at t = 0
/// modulo strictly lower triangular terms, so that all leading minors are units.
pub fn toeplitz_det_from_symbol(
    n: usize,
    symbol: impl Fn(i64) -> RationalSeries,
    order: usize,
) -> RationalSeries {
    if n == 0 {
        return RationalSeries::one(order);
    }
    let symbols: Vec<RationalSeries> = (0..2 * n - 1)
        .map(|idx| symbol(idx as i64 - (n as i64 - 1)).truncate(order))
        .collect();
    let mut a: Vec<Vec<RationalSeries>> = (0..n)
        .map(|i| (0..n).map(|j| symbols[i + n - 1 - j].clone()).collect())
        .collect();
    let mut prev = RationalSeries::one(order);
    for p in 0..n - 1 {
        let prev_inv = prev.inverse().expect("leading minor is a unit");
        for i in p + 1..n {
            for j in p + 1..n {
                let num = &(&a[i][j] * &a[p][p]) - &(&a[i][p] * &a[p][j]);
                a[i][j] = &num * &prev_inv;
            }
        }
        prev = a[p][p].clone();
    }
    a[n - 1][n - 1].clone()
}

/// [t^N] det · N!/k^N.
pub fn coefficient_to_probability(
    det: &RationalSeries,
    k: u32,
    length: u32,
) -> Result<BigRational> {
    let idx = length as usize;
    if idx > det.order() {
        return Err(Error::TruncationOrder {
            requested: idx,
            order: det.order(),
        });
    }
    let scale = BigRational::new(BigInt::from(factorial(length)), BigInt::from(k).pow(length));
    Ok(det.coeff(idx) * scale)
}

/// F_I(n; k, N) or F_D(n; k, N) from the Toeplitz determinant series.
pub fn extract_distribution(n: u32, k: u32, which: Which, length: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "alphabet size must be positive".into(),
        ));
    }
    let det = toeplitz_det_series(
        n as usize,
        SymbolKind::for_statistic(which, k),
        length as usize,
    );
    coefficient_to_probability(&det, k, length)
}

/// The whole table n = 0..=N from the series route.
pub fn series_distribution(k: u32, length: u32, which: Which) -> Result<DistributionTable> {
    let cdf = (0..=length)
        .map(|n| extract_distribution(n, k, which, length))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionTable::from_cdf(
        Route::Series,
        which,
        k,
        length,
        cdf,
    ))
}

/// Number of permutations of N with longest increasing subsequence ≤ n,
/// read off as [u^{2N}] det T_n(e^{u(z+1/z)}) · (N!)².
pub fn permutations_with_lis_at_most(n: u32, length: u32) -> BigUint {
    let order = 2 * length as usize;
    let det = toeplitz_det_series(n as usize, SymbolKind::P, order);
    let nf = BigInt::from(factorial(length));
    let value = det.coeff(order) * (&nf * &nf);
    debug_assert!(value.is_integer() && !value.is_negative());
    value.to_integer().to_biguint().unwrap_or_default()
}

/// Prob(ℓ_N(π) ≤ n) for a uniform random permutation of N.
pub fn permutation_distribution(n: u32, length: u32) -> BigRational {
    BigRational::new(
        BigInt::from(permutations_with_lis_at_most(n, length)),
        BigInt::from(factorial(length)),
    )
}
