//! Small dense matrices and the Cholesky factorization used by IRLS.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pivots at or below this value reject a matrix as not positive definite.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..i).all(|j| {
                    let (a, b) = (self[(i, j)], self[(j, i)]);
                    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
                })
            })
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Factors a symmetric matrix, reading only its lower triangle.
    pub fn factor(a: &Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                got: a.cols,
            });
        }
        let n = a.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > PIVOT_FLOOR) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[(i, k)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l[(k, i)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e).expect("dimension checked");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        // symmetrize away round-off
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = avg;
                inv[(j, i)] = avg;
            }
        }
        inv
    }
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            got: b.len(),
        });
    }
    Cholesky::factor(a)?.solve(b)
}

/// Cholesky of `D^{-1/2} A D^{-1/2}` with `D = diag(A)`, so the pivot floor
/// acts on a unit-diagonal matrix and the rejection is scale-free.
#[derive(Debug, Clone)]
pub struct ScaledCholesky {
    chol: Cholesky,
    scale: Vec<f64>,
}

impl ScaledCholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.rows;
        let mut scale = Vec::with_capacity(n);
        for (i, d) in a.diagonal().into_iter().enumerate() {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: i, pivot: d });
            }
            scale.push(1.0 / d.sqrt());
        }
        let mut s = a.clone();
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] *= scale[i] * scale[j];
            }
        }
        Ok(Self {
            chol: Cholesky::factor(&s)?,
            scale,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let scaled: Vec<f64> = b.iter().zip(&self.scale).map(|(v, s)| v * s).collect();
        let x = self.chol.solve(&scaled)?;
        Ok(x.iter().zip(&self.scale).map(|(v, s)| v * s).collect())
    }

    pub fn inverse(&self) -> Matrix {
        let mut inv = self.chol.inverse();
        let n = self.scale.len();
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] *= self.scale[i] * self.scale[j];
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve_returns_rhs() {
        let x = solve_spd(&Matrix::identity(3), &[1.0, -2.0, 3.5]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 3.5]);
    }

    #[test]
    fn two_by_two_hand_solution() {
        let a = Matrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let x = solve_spd(&a, &[2.0, 5.0]).unwrap();
        assert!((x[0] + 0.5).abs() < 1e-14);
        assert!((x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_indefinite_and_singular() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_spd(&a, &[1.0, 1.0]),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
        let s = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(solve_spd(&s, &[1.0, 1.0]).is_err());
        assert!(ScaledCholesky::factor(&s).is_err());
        assert!(solve_spd(&Matrix::identity(2), &[1.0]).is_err());
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        for inv in [
            Cholesky::factor(&a).unwrap().inverse(),
            ScaledCholesky::factor(&a).unwrap().inverse(),
        ] {
            for j in 0..3 {
                let col: Vec<f64> = (0..3).map(|i| inv[(i, j)]).collect();
                let e = a.mul_vec(&col);
                for (i, v) in e.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-13);
                }
            }
            assert!(inv.is_symmetric(0.0));
        }
    }

    #[test]
    fn scaled_factor_handles_badly_scaled_spd() {
        let a = Matrix::from_rows(&[vec![1e-14, 1e-15], vec![1e-15, 1e-14]]).unwrap();
        assert!(Cholesky::factor(&a).is_err());
        let x = ScaledCholesky::factor(&a)
            .unwrap()
            .solve(&[1e-14, 1e-14])
            .unwrap();
        let r = a.mul_vec(&x);
        assert!((r[0] - 1e-14).abs() < 1e-26 && (r[1] - 1e-14).abs() < 1e-26);
    }
}
