//! Small dense linear algebra over complex scalars.
//!
//! Matrices in this crate are finite sections of kernels (tens of rows at
//! most), so everything here is a plain row-major `Vec` with cyclic Jacobi
//! iterations. Hermitian eigenvalues are obtained from the real symmetric
//! embedding `[[A, -B], [B, A]]` of `H = A + iB`, whose spectrum is that of
//! `H` with every eigenvalue doubled.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        Ok(CMatrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from separate real and imaginary parts.
    pub fn from_parts(re: &[Vec<T>], im: &[Vec<T>]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len(),
                found: im.len(),
            });
        }
        let rows = re
            .iter()
            .zip(im)
            .map(|(r, i)| {
                if r.len() != i.len() {
                    return Err(Error::DimensionMismatch {
                        expected: r.len(),
                        found: i.len(),
                    });
                }
                Ok(r.iter().zip(i).map(|(&a, &b)| Complex::new(a, b)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
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

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn re_parts(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.re).collect())
            .collect()
    }

    pub fn im_parts(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.im).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Complex::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)])
        }))
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect())
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn scale(&self, c: T) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `D M D*` for the diagonal matrix `D = diag(d)`.
    pub fn diag_congruence(&self, d: &[Complex<T>]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| d[i] * self[(i, j)] * d[j].conj())
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |a, b| self[(idx[a], idx[b])])
    }

    /// First position where `M[i][j] != conj(M[j][i])` exactly.
    pub fn hermitian_violation(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if self[(i, j)] != self[(j, i)].conj() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric matrix (row-major `n x n`), ascending.
pub fn symmetric_eigenvalues<T: Real>(mut a: Vec<T>, n: usize) -> Result<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    let frob = a.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    if frob == T::zero() {
        return Ok(vec![T::zero(); n]);
    }
    let eps = T::epsilon();
    let noise = eps * frob / T::from_usize(n).unwrap_or_else(T::one);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + a[i * n + j] * a[i * n + j])
            .sqrt();
        if off <= eps * frob {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                // Entries below the rounding level of their diagonal pair are final.
                let floor = eps * (a[p * n + p].abs() * a[q * n + q].abs()).sqrt();
                if apq.abs() <= floor.max(noise) {
                    continue;
                }
                rotated = true;
                let theta = (a[q * n + q] - a[p * n + p]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ev)
}

/// Eigenvalues of a Hermitian matrix, ascending. The caller guarantees the
/// input is Hermitian; only the lower triangle's conjugate symmetry is used
/// implicitly through the real embedding.
pub fn hermitian_eigenvalues<T: Real>(h: &CMatrix<T>) -> Result<Vec<T>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            found: h.cols(),
        });
    }
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * m + j] = z.re;
            a[(i + n) * m + j + n] = z.re;
            a[i * m + j + n] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(a, m)?;
    // Each eigenvalue appears twice; averaging the pair damps rounding.
    Ok(doubled
        .chunks(2)
        .map(|pair| (pair[0] + pair[1]) / T::lit(2.0))
        .collect())
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix, or `None`
/// when a nonpositive pivot appears.
pub fn cholesky<T: Real>(h: &CMatrix<T>) -> Option<CMatrix<T>> {
    let n = h.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d = d - l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex::new(djj, T::zero());
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn forward_substitute<T: Real>(l: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let n = l.rows();
    let mut x = CMatrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = b[(i, c)];
            for k in 0..i {
                s = s - l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Singular values of a real `rows x cols` matrix (row-major), descending,
/// by one-sided Jacobi orthogonalization of the columns.
pub fn singular_values(mut a: Vec<f64>, rows: usize, cols: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), rows * cols);
    let eps = f64::EPSILON;
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols.saturating_sub(1) {
            for j in i + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..rows {
                    let (x, y) = (a[k * cols + i], a[k * cols + j]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let (x, y) = (a[k * cols + i], a[k * cols + j]);
                    a[k * cols + i] = c * x - s * y;
                    a[k * cols + j] = s * x + c * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }
    let mut sv: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|k| a[k * cols + j].powi(2)).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn symmetric_two_by_two() {
        let ev = symmetric_eigenvalues(vec![2.0f64, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!((ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_with_imaginary_part() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let h = CMatrix::from_rows(vec![vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-13);
        assert!((ev[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn trace_and_determinant_preserved() {
        let h = CMatrix::from_rows(vec![
            vec![c(4.0, 0.0), c(1.0, 2.0), c(0.5, -0.5)],
            vec![c(1.0, -2.0), c(3.0, 0.0), c(0.0, 1.0)],
            vec![c(0.5, 0.5), c(0.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let ev = hermitian_eigenvalues(&h).unwrap();
        let trace: f64 = ev.iter().sum();
        assert!((trace - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_reconstructs() {
        let h = CMatrix::from_rows(vec![vec![c(4.0, 0.0), c(2.0, 1.0)], vec![c(2.0, -1.0), c(3.0, 0.0)]]).unwrap();
        let l = cholesky(&h).unwrap();
        let back = l.matmul(&l.adjoint()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((back[(i, j)] - h[(i, j)]).norm() < 1e-14);
            }
        }
        let indefinite =
            CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(cholesky(&indefinite).is_none());
    }

    #[test]
    fn singular_values_of_rank_one() {
        // Outer product of (1, 2) and (3, 4, 5).
        let a = vec![3.0, 4.0, 5.0, 6.0, 8.0, 10.0];
        let sv = singular_values(a, 2, 3).unwrap();
        let expected = 5.0_f64.sqrt() * 50.0_f64.sqrt();
        assert!((sv[0] - expected).abs() < 1e-12);
        assert!(sv[1].abs() < 1e-12 && sv[2].abs() < 1e-12);
    }
}
