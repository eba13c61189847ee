//! Small dense linear algebra over [`Scalar`].
//!
//! Row-major matrices sized for desk-scale problems (context dimensions of a
//! few hundred, regression designs of a few thousand rows). Provides exactly
//! what the toolkit needs: symmetric rank-1 updates, Cholesky factors with
//! stable rank-1 factor updates, triangular solves, and Householder QR.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

pub fn scale_in_place<S: Scalar>(a: &mut [S], c: S) {
    for v in a {
        *v *= c;
    }
}

pub fn axpy<S: Scalar>(y: &mut [S], alpha: S, x: &[S]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    /// y = M x
    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// M += xyᵀ
    pub fn add_outer(&mut self, x: &[S], y: &[S]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for (i, &xi) in x.iter().enumerate() {
            let row = self.row_mut(i);
            for (rij, &yj) in row.iter_mut().zip(y) {
                *rij += xi * yj;
            }
        }
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn max_symmetry_gap(&self) -> S {
        let mut gap = S::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                gap = gap.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        gap
    }
}

impl<S: Scalar> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor L of a symmetric positive-definite A,
/// A = L Lᵀ. Fails on non-PD input.
pub fn cholesky<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Usage("cholesky requires a square matrix".into()));
    }
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= S::zero() || !s.is_finite() {
                    return Err(Error::Numeric(format!(
                        "matrix not positive definite at pivot {i}"
                    )));
                }
                l[(i, j)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Rank-1 update of a lower Cholesky factor in place: after the call,
/// L Lᵀ equals the old L Lᵀ + x xᵀ. Stable Givens-style sweep.
pub fn cholesky_update<S: Scalar>(l: &mut Matrix<S>, x: &[S]) {
    let n = l.rows();
    debug_assert_eq!(x.len(), n);
    let mut w = x.to_vec();
    for k in 0..n {
        let lkk = l[(k, k)];
        let r = lkk.hypot(w[k]);
        let c = r / lkk;
        let s = w[k] / lkk;
        l[(k, k)] = r;
        for i in (k + 1)..n {
            let lik = (l[(i, k)] + s * w[i]) / c;
            l[(i, k)] = lik;
            w[i] = c * w[i] - s * lik;
        }
    }
}

/// Solve L z = b for lower-triangular L.
pub fn solve_lower<S: Scalar>(l: &Matrix<S>, b: &[S]) -> Vec<S> {
    let n = l.rows();
    let mut z = vec![S::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    z
}

/// Solve Lᵀ z = b for lower-triangular L.
pub fn solve_lower_transpose<S: Scalar>(l: &Matrix<S>, b: &[S]) -> Vec<S> {
    let n = l.rows();
    let mut z = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    z
}

/// Solve A x = b for symmetric positive-definite A via Cholesky.
pub fn solve_spd<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Vec<S>> {
    let l = cholesky(a)?;
    let z = solve_lower(&l, b);
    Ok(solve_lower_transpose(&l, &z))
}

/// Householder QR of an n×k matrix with n ≥ k.
///
/// Returns the k×k upper-triangular R and Qᵀy. Rank deficiency shows up as a
/// (near-)zero diagonal entry in R; callers decide what counts as zero.
pub struct QrFactors<S> {
    pub r: Matrix<S>,
    pub qty: Vec<S>,
}

pub fn householder_qr<S: Scalar>(x: &Matrix<S>, y: &[S]) -> Result<QrFactors<S>> {
    let n = x.rows();
    let k = x.cols();
    if y.len() != n {
        return Err(Error::Usage("row count of X must match length of y".into()));
    }
    if n < k {
        return Err(Error::Usage(format!(
            "need at least as many rows as columns (n={n}, k={k})"
        )));
    }
    let mut a = x.clone();
    let mut qty = y.to_vec();

    for j in 0..k {
        // Householder vector for column j, rows j..n.
        let mut alpha = S::zero();
        for i in j..n {
            alpha = alpha.hypot(a[(i, j)]);
        }
        if alpha == S::zero() {
            continue; // zero column below the diagonal; R[j][j] stays 0
        }
        if a[(j, j)] > S::zero() {
            alpha = -alpha;
        }
        let mut v: Vec<S> = (j..n).map(|i| a[(i, j)]).collect();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 > S::zero() {
            // Reflect remaining columns and the rhs.
            for col in j..k {
                let mut s = S::zero();
                for (t, i) in (j..n).enumerate() {
                    s += v[t] * a[(i, col)];
                }
                let f = S::cast(2.0) * s / vnorm2;
                for (t, i) in (j..n).enumerate() {
                    a[(i, col)] -= f * v[t];
                }
            }
            let mut s = S::zero();
            for (t, i) in (j..n).enumerate() {
                s += v[t] * qty[i];
            }
            let f = S::cast(2.0) * s / vnorm2;
            for (t, i) in (j..n).enumerate() {
                qty[i] -= f * v[t];
            }
        }
        a[(j, j)] = alpha;
        for i in (j + 1)..n {
            a[(i, j)] = S::zero();
        }
    }

    let mut r = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r[(i, j)] = a[(i, j)];
        }
    }
    Ok(QrFactors { r, qty })
}

/// Invert an upper-triangular matrix by back substitution.
pub fn invert_upper<S: Scalar>(r: &Matrix<S>) -> Result<Matrix<S>> {
    let k = r.rows();
    let mut inv = Matrix::zeros(k, k);
    for col in 0..k {
        let mut e = vec![S::zero(); k];
        e[col] = S::one();
        for i in (0..k).rev() {
            let mut s = e[i];
            for j in (i + 1)..k {
                s -= r[(i, j)] * inv[(j, col)];
            }
            if r[(i, i)] == S::zero() {
                return Err(Error::Numeric("singular triangular matrix".into()));
            }
            inv[(i, col)] = s / r[(i, i)];
        }
    }
    Ok(inv)
}
