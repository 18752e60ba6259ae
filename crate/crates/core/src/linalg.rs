//! Small dense linear algebra over any [`Scalar`].

use std::ops::{Index, IndexMut};

use crate::dual::{Dual, Scalar};
use crate::error::{GeometryError, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_mat(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows);
        Mat::from_fn(self.rows, o.cols, |i, j| {
            let mut s = T::zero();
            for k in 0..self.cols {
                s += self[(i, k)] * o[(k, j)];
            }
            s
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ A w`.
    pub fn bilinear(&self, v: &[T], w: &[T]) -> T {
        dot(v, &self.mul_vec(w))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(|v| v.value())
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.value().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.value()).collect())
            .collect()
    }
}

impl<T: Scalar> Mat<Dual<T>> {
    pub fn re(&self) -> Mat<T> {
        self.map(|d| d.re)
    }

    pub fn eps(&self) -> Mat<T> {
        self.map(|d| d.eps)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        s += *x * *y;
    }
    s
}

pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

pub fn sub_vec<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn add_vec<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn scale_vec<T: Scalar>(c: T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| c * *x).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `A X = B` column by column with partial pivoting on real values.
pub fn solve_many<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    assert_eq!(n, b.rows());
    let m = b.cols();
    let mut lu = a.clone();
    let mut rhs = b.clone();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| {
                lu[(i, k)]
                    .value()
                    .abs()
                    .total_cmp(&lu[(j, k)].value().abs())
            })
            .unwrap_or(k);
        if lu[(piv, k)].value().abs() < 1e-300 {
            return Err(GeometryError::Singular);
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..m {
                let t = rhs[(k, j)];
                rhs[(k, j)] = rhs[(piv, j)];
                rhs[(piv, j)] = t;
            }
        }
        let inv = T::one() / lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] * inv;
            for j in k..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= factor * t;
            }
            for j in 0..m {
                let t = rhs[(k, j)];
                rhs[(i, j)] -= factor * t;
            }
        }
    }
    let mut x = Mat::zeros(n, m);
    for j in 0..m {
        for i in (0..n).rev() {
            let mut s = rhs[(i, j)];
            for k in i + 1..n {
                s -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

pub fn solve<T: Scalar>(a: &Mat<T>, b: &[T]) -> Result<Vec<T>> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = solve_many(a, &rhs)?;
    Ok((0..b.len()).map(|i| x[(i, 0)]).collect())
}

pub fn inverse<T: Scalar>(a: &Mat<T>) -> Result<Mat<T>> {
    solve_many(a, &Mat::identity(a.rows()))
}

/// Smallest Cholesky pivot of a symmetric matrix; fails below `tol`.
pub fn cholesky_min_pivot(a: &Mat<f64>, tol: f64) -> Result<f64> {
    let n = a.rows();
    let mut l = Mat::<f64>::zeros(n, n);
    let mut min_pivot = f64::INFINITY;
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return Err(GeometryError::DegenerateMetric {
                row: j,
                pivot: d,
                tol,
            });
        }
        min_pivot = min_pivot.min(d);
        let s = d.sqrt();
        l[(j, j)] = s;
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / s;
        }
    }
    Ok(min_pivot)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &Mat<f64>) -> Vec<f64> {
    let n = a.rows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(a: &Mat<f64>) -> f64 {
    symmetric_eigenvalues(a)[0]
}
