//! Small dense linear algebra: symmetric eigen-decomposition by cyclic Jacobi
//! rotations, Cholesky, LU inversion and the symmetric matrix exponential.
//! Sizes here are tiny (2×2 operators up to a few hundred Galerkin modes), so
//! everything is straightforward O(n³).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::num;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
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

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid("matrix data length does not match its shape"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(invalid("ragged matrix rows"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().copied()).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(invalid("matrix product shape mismatch"));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for i in 0..self.rows {
            out[i] = num::dot(self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `out = selfᵀ · x`.
    pub fn tmul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        for j in 0..self.cols {
            out[j] = 0.0;
        }
        for i in 0..self.rows {
            let xi = x[i];
            for j in 0..self.cols {
                out[j] += self[(i, j)] * xi;
            }
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, num::abs(*v)))
    }

    /// Largest `|a_ij - a_ji|`; infinite for non-square matrices.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max(num::abs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    pub fn symmetrized(&self) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition `A = Q Λ Qᵀ`; `vectors` holds the eigenvectors as
/// columns. Eigenvalues are sorted ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (0..n).map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)]).sum();
            }
        }
        m
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }
}

/// Cyclic Jacobi eigen-solver for a symmetric matrix.
pub fn jacobi_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    const MAX_SWEEPS: usize = 100;
    if !a.is_square() {
        return Err(invalid("eigen-decomposition needs a square matrix"));
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if a.asymmetry() > 1e-10 * scale {
        return Err(invalid("eigen-decomposition needs a symmetric matrix"));
    }
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut q = Matrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m[(i, i)] * m[(i, i)];
            for j in 0..i {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = m[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let arr = m[(r, r)];
                let theta = (arr - app) / (2.0 * apr);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (num::abs(theta) + num::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / num::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkr = m[(k, r)];
                    m[(k, p)] = c * mkp - s * mkr;
                    m[(k, r)] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mrk = m[(r, k)];
                    m[(p, k)] = c * mpk - s * mrk;
                    m[(r, k)] = s * mpk + c * mrk;
                }
                m[(p, r)] = 0.0;
                m[(r, p)] = 0.0;
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = q[(k, src)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Lower-triangular Cholesky factor. A pivot below `rel_tol` times the largest
/// diagonal entry is reported as rank deficiency at that index.
pub fn cholesky(a: &Matrix, rel_tol: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(invalid("Cholesky needs a square matrix"));
    }
    let n = a.rows();
    let dmax = (0..n).map(|i| num::abs(a[(i, i)])).fold(0.0, f64::max);
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > rel_tol * dmax) {
            return Err(Error::RankDeficient { index: j });
        }
        let djj = num::sqrt(d);
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Eigenvalues of the symmetric pencil `A v = λ B v` with `B` positive
/// definite, via `L⁻¹ A L⁻ᵀ` where `B = L Lᵀ`. Ascending order.
pub fn generalized_eigenvalues(a: &Matrix, b: &Matrix, rank_tol: f64) -> Result<Vec<f64>> {
    let l = cholesky(b, rank_tol)?;
    let reduced = congruence_by_inverse_factor(a, &l);
    Ok(jacobi_eigen(&reduced)?.values)
}

/// `L⁻¹ A L⁻ᵀ` for lower-triangular `L`.
pub fn congruence_by_inverse_factor(a: &Matrix, l: &Matrix) -> Matrix {
    let n = a.rows();
    // Y = L⁻¹ A (forward substitution column by column)
    let mut y = Matrix::zeros(n, n);
    for col in 0..n {
        for i in 0..n {
            let mut s = a[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * y[(k, col)];
            }
            y[(i, col)] = s / l[(i, i)];
        }
    }
    // Z = Y L⁻ᵀ  ⇔  Zᵀ = L⁻¹ Yᵀ
    let mut z = Matrix::zeros(n, n);
    for row in 0..n {
        for j in 0..n {
            let mut s = y[(row, j)];
            for k in 0..j {
                s -= l[(j, k)] * z[(row, k)];
            }
            z[(row, j)] = s / l[(j, j)];
        }
    }
    z.symmetrized()
}

/// LU factorization with partial pivoting, returned as the inverse.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(invalid("only square matrices are invertible"));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    let scale = a.max_abs();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if num::abs(m[(r, col)]) > num::abs(m[(piv, col)]) {
                piv = r;
            }
        }
        if num::abs(m[(piv, col)]) <= 1e-14 * scale || scale == 0.0 {
            return Err(Error::SingularOperator("matrix is not invertible".into()));
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(col * n + j, piv * n + j);
                inv.data.swap(col * n + j, piv * n + j);
            }
        }
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[(r, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                m[(r, j)] -= f * m[(col, j)];
                inv[(r, j)] -= f * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}

pub fn determinant(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(invalid("determinant needs a square matrix"));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if num::abs(m[(r, col)]) > num::abs(m[(piv, col)]) {
                piv = r;
            }
        }
        if m[(piv, col)] == 0.0 {
            return Ok(0.0);
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for r in (col + 1)..n {
            let f = m[(r, col)] / d;
            for j in col..n {
                m[(r, j)] -= f * m[(col, j)];
            }
        }
    }
    Ok(det)
}

/// `e^{tA}` for symmetric `A` through its spectral decomposition.
///
/// Rejects matrices whose asymmetry exceeds `1e-12`. `t = 0` returns the
/// identity exactly.
pub fn expm_symmetric(a: &Matrix, t: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(invalid("matrix exponential needs a square matrix"));
    }
    if a.asymmetry() > 1e-12 {
        return Err(invalid("matrix exponential requires a symmetric matrix"));
    }
    let n = a.rows();
    if t == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let eig = jacobi_eigen(a)?;
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (0..n)
                .map(|k| eig.vectors[(i, k)] * num::exp(t * eig.values[k]) * eig.vectors[(j, k)])
                .sum();
        }
    }
    Ok(out.symmetrized())
}
