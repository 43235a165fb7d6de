//! Double-double arithmetic: an unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2,
//! about 32 significant digits. Built on the error-free transforms TwoSum and
//! TwoProd (fused multiply-add).

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn renorm(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }
}

impl From<Dd> for f64 {
    fn from(v: Dd) -> f64 {
        v.to_f64()
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::renorm(s, e + f)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        Dd::renorm(p, e + (self.hi * y.lo + self.lo * y.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from(q2);
        let q3 = r.hi / y.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd::from(q3)
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<f64> for Dd {
            type Output = Dd;
            fn $f(self, y: f64) -> Dd {
                self.$f(Dd::from(y))
            }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign for Dd {
    fn add_assign(&mut self, y: Dd) {
        *self = *self + y;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, y: Dd) {
        *self = *self - y;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, y: Dd) {
        *self = *self * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn exact(v: Dd) -> BigRational {
        BigRational::from_float(v.hi).unwrap() + BigRational::from_float(v.lo).unwrap()
    }

    #[test]
    fn thirds_and_sevenths() {
        for d in [3.0, 7.0, 49.0, 0.1] {
            let q = Dd::ONE / Dd::from(d);
            let err = exact(q * d - 1.0);
            assert!(err.to_f64().unwrap().abs() < 1e-31, "{d}: {err}");
        }
    }

    #[test]
    fn sums_keep_the_low_part() {
        let a = Dd::from(1.0) + Dd::from(1e-20);
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-20);
        assert_eq!((a - Dd::ONE).to_f64(), 1e-20);
    }

    #[test]
    fn products_against_rationals() {
        let x = Dd::from(0.1) + Dd::from(3e-19);
        let y = Dd::from(-7.25) / Dd::from(3.0);
        let got = exact(x * y);
        let want = exact(x) * exact(y);
        let rel = ((got - want.clone()) / want).to_f64().unwrap().abs();
        assert!(rel < 1e-31, "{rel:e}");
    }
}
