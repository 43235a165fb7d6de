//! Dense LU factorization with partial pivoting.
//!
//! Toeplitz recursion quantities need solves with both `T` and `Tᵀ`, so the
//! factorization keeps its pivots and supports transposed solves from the same
//! factors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Lu {
    lu: DMatrix<f64>,
    perm: Vec<usize>,
    sign: f64,
    norm1: f64,
}

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl Lu {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let norm = norm1(a);
        for col in 0..n {
            let (p, pmax) =
                (col..n)
                    .map(|r| (r, lu[(r, col)].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pmax == 0.0 || pmax <= f64::EPSILON * norm * 1e-4 {
                return Err(Error::Singular {
                    condition: if pmax == 0.0 {
                        f64::INFINITY
                    } else {
                        norm / pmax
                    },
                });
            }
            if p != col {
                lu.swap_rows(p, col);
                perm.swap(p, col);
                sign = -sign;
            }
            let pivot = lu[(col, col)];
            for r in (col + 1)..n {
                let factor = lu[(r, col)] / pivot;
                lu[(r, col)] = factor;
                if factor != 0.0 {
                    for c in (col + 1)..n {
                        let v = lu[(col, c)];
                        lu[(r, c)] -= factor * v;
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            sign,
            norm1: norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn det(&self) -> f64 {
        self.sign * self.lu.diagonal().iter().product::<f64>()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut x = DVector::from_fn(n, |i, _| b[self.perm[i]]);
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Solve `Aᵀ x = b` with the same factors.
    pub fn solve_transpose(&self, b: &DVector<f64>) -> DVector<f64> {
        // A = Pᵀ L U, so Aᵀ = Uᵀ Lᵀ P.
        let n = self.dim();
        let mut y = b.clone();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[(j, i)] * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                y[i] -= self.lu[(j, i)] * y[j];
            }
        }
        let mut x = DVector::zeros(n);
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut inv = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.solve(&DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 }));
            inv.set_column(j, &col);
        }
        inv
    }

    /// 1-norm condition number, from an explicit inverse (the matrices here are small).
    pub fn condition(&self) -> f64 {
        self.norm1 * norm1(&self.inverse())
    }
}

/// Σ aᵢbᵢ as if accumulated in twice the working precision (Dot2 of Ogita,
/// Rump and Oishi).
pub fn dot2(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (a, b) in pairs {
        let p = a * b;
        let pe = a.mul_add(b, -p);
        let t = s + p;
        let z = t - s;
        let se = (s - (t - z)) + (p - z);
        s = t;
        c += pe + se;
    }
    s + c
}

impl Lu {
    /// Solve `a x = b` (or `aᵀ x = b`), then refine with residuals from
    /// [`dot2`]. Small solution components come out with a small relative
    /// error, not only a small error against ‖x‖.
    pub fn solve_refined(
        &self,
        a: &DMatrix<f64>,
        b: &DVector<f64>,
        transpose: bool,
        steps: usize,
    ) -> DVector<f64> {
        let solve = |v: &DVector<f64>| {
            if transpose {
                self.solve_transpose(v)
            } else {
                self.solve(v)
            }
        };
        let n = b.len();
        let mut x = solve(b);
        for _ in 0..steps {
            let r = DVector::from_fn(n, |i, _| {
                let row = (0..n).map(|j| {
                    let aij = if transpose { a[(j, i)] } else { a[(i, j)] };
                    (-aij, x[j])
                });
                dot2(std::iter::once((b[i], 1.0)).chain(row))
            });
            x += solve(&r);
        }
        x
    }
}
