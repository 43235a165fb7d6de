//! Exact integer and rational helpers shared by the combinatorial routes.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Binomial coefficient C(n, r) for nonnegative n; zero when r > n.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Generalized binomial C(a, q) = a (a-1) ... (a-q+1) / q! for any integer a.
pub fn binomial_signed(a: i64, q: u64) -> BigInt {
    let mut acc = BigRational::one();
    for i in 0..q {
        acc *= BigRational::new(BigInt::from(a - i as i64), BigInt::from(i + 1));
    }
    debug_assert!(acc.is_integer());
    acc.to_integer()
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Nearest double to an exact rational (NaN is never produced for finite input).
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a log-scaled quotient for magnitudes outside the f64 range.
        let (n, d) = (r.numer(), r.denom());
        let sign = if n.sign() == num_bigint::Sign::Minus {
            -1.0
        } else {
            1.0
        };
        let ln = ln_abs(n) - ln_abs(d);
        sign * ln.exp()
    })
}

fn ln_abs(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().map(f64::abs).unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (v.magnitude() >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Determinant by fraction-exact Gaussian elimination with nonzero pivoting.
pub fn det_rational(matrix: &[Vec<BigRational>]) -> BigRational {
    let n = matrix.len();
    let mut a: Vec<Vec<BigRational>> = matrix.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Solve `a x = b` for each right-hand side by exact Gaussian elimination.
/// None when `a` is singular.
pub fn solve_rational(
    a: &[Vec<BigRational>],
    rhs: &[Vec<BigRational>],
) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let m = rhs.len();
    // Augmented rows [a | b₁ … b_m].
    let mut w: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            a[i].iter()
                .cloned()
                .chain(rhs.iter().map(|b| b[i].clone()))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !w[r][col].is_zero())?;
        w.swap(pivot, col);
        let inv = w[col][col].recip();
        for c in col..n + m {
            w[col][c] *= &inv;
        }
        for r in 0..n {
            if r == col || w[r][col].is_zero() {
                continue;
            }
            let factor = w[r][col].clone();
            for c in col..n + m {
                let delta = &factor * &w[col][c];
                w[r][c] -= delta;
            }
        }
    }
    Some(
        (0..m)
            .map(|j| (0..n).map(|i| w[i][n + j].clone()).collect())
            .collect(),
    )
}

/// Render as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_solve() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve_rational(&a, &[vec![int(1), int(0)]]).unwrap();
        assert_eq!(x[0], vec![ratio(3, 5), ratio(-1, 5)]);
        let singular = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve_rational(&singular, &[vec![int(1), int(1)]]).is_none());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial_signed(-2, 3), BigInt::from(-4));
        assert_eq!(binomial_signed(0, 1), BigInt::zero());
        assert_eq!(binomial_signed(-1, 5), BigInt::from(-1));
    }

    #[test]
    fn rational_det() {
        let m = vec![
            vec![int(0), int(1), int(2)],
            vec![int(1), int(0), int(3)],
            vec![int(4), int(-3), int(8)],
        ];
        assert_eq!(det_rational(&m), int(-2));
        assert_eq!(det_rational(&[]), int(1));
    }

    #[test]
    fn huge_ratio_to_float() {
        let big = BigInt::from(3).pow(2000);
        let r = BigRational::new(big.clone() * 2, big);
        assert_eq!(to_f64(&r), 2.0);
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
    }
}
