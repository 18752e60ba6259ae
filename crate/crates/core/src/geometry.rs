//! Point-local tensor data shared by the frame, connection and contact
//! computations, generic over the scalar type so that any of it can be
//! differentiated again by lifting the base point to dual numbers.
//!
//! Vectors on `TM` are stored in the natural basis as `2n` components:
//! the first `n` along `∂/∂x^i`, the last `n` along `∂/∂y^i`.

use crate::dual::{seed_coordinate, Scalar};
use crate::error::Result;
use crate::finsler::{spray_jet, FinslerFunction};
use crate::linalg::{dot, solve, Mat};

/// Index of the fiber coordinate left out when building `E_a^i`:
/// the largest `|y^i|`, smallest index on ties.
pub fn pivot_index(y: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in y.iter().enumerate() {
        if v.abs() > y[best].abs() {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct LocalGeometry<T> {
    pub n: usize,
    pub q: Vec<T>,
    pub f: T,
    pub g: Mat<T>,
    pub g_inv: Mat<T>,
    /// `G^i`
    pub spray: Vec<T>,
    /// `nonlinear[(i, j)] = G_i^j`
    pub nonlinear: Mat<T>,
    /// `e[(a, i)] = E_a^i`, `(n−1) × n`
    pub e: Mat<T>,
    pub pivot: usize,
}

impl<T: Scalar> LocalGeometry<T> {
    pub fn compute<M: FinslerFunction>(m: &M, q: &[T], pivot: usize) -> Result<Self> {
        let n = q.len() / 2;
        let mut nonlinear = Mat::zeros(n, n);
        let mut base = None;
        for i in 0..n {
            let jet = spray_jet(m, &seed_coordinate(q, n + i))?;
            for j in 0..n {
                nonlinear[(i, j)] = jet.spray[j].eps;
            }
            if i == 0 {
                base = Some(jet);
            }
        }
        let jet = base.expect("n >= 1");
        let g = jet.g.re();
        let g_inv = jet.g_inv.re();
        let spray: Vec<T> = jet.spray.iter().map(|v| v.re).collect();
        let y = &q[n..];
        let gy = g.mul_vec(y);
        let ygy = dot(y, &gy);
        let mut e = Mat::zeros(n - 1, n);
        for (a, k) in (0..n).filter(|&k| k != pivot).enumerate() {
            let c = gy[k] / ygy;
            for i in 0..n {
                e[(a, i)] = -(c * y[i]);
            }
            e[(a, k)] += T::one();
        }
        Ok(LocalGeometry {
            n,
            q: q.to_vec(),
            f: jet.f.re,
            g,
            g_inv,
            spray,
            nonlinear,
            e,
            pivot,
        })
    }

    pub fn x(&self) -> &[T] {
        &self.q[..self.n]
    }

    pub fn y(&self) -> &[T] {
        &self.q[self.n..]
    }

    pub fn e_row(&self, a: usize) -> &[T] {
        self.e.row(a)
    }

    /// Natural components of the horizontal lift `h^i δ/δx^i`.
    pub fn horizontal_lift(&self, h: &[T]) -> Vec<T> {
        let n = self.n;
        let mut v = vec![T::zero(); 2 * n];
        for i in 0..n {
            v[i] = h[i];
            for j in 0..n {
                v[n + j] -= h[i] * self.nonlinear[(i, j)];
            }
        }
        v
    }

    /// Natural components of the vertical vector `w^i ∂/∂y^i`.
    pub fn vertical_lift(&self, w: &[T]) -> Vec<T> {
        let n = self.n;
        let mut v = vec![T::zero(); 2 * n];
        v[n..].copy_from_slice(w);
        v
    }

    /// `(dx(v), δy(v))` with `δy^i = dy^i + G_j^i dx^j`.
    pub fn split(&self, v: &[T]) -> (Vec<T>, Vec<T>) {
        let n = self.n;
        let h = v[..n].to_vec();
        let mut w = v[n..].to_vec();
        for i in 0..n {
            for j in 0..n {
                w[i] += self.nonlinear[(j, i)] * h[j];
            }
        }
        (h, w)
    }

    /// Sasaki metric `g_ij dx^i dx^j + g_ij δy^i δy^j` on two vectors.
    pub fn sasaki(&self, v: &[T], w: &[T]) -> T {
        let (vh, vv) = self.split(v);
        let (wh, wv) = self.split(w);
        self.g.bilinear(&vh, &wh) + self.g.bilinear(&vv, &wv)
    }

    /// The `2n × 2n` Gram matrix of the Sasaki metric in the natural basis.
    pub fn sasaki_matrix(&self) -> Mat<T> {
        let n = self.n;
        let nl = &self.nonlinear;
        // δy = dy + Nᵀ dx
        let ng = nl.mul_mat(&self.g);
        let ngnt = ng.mul_mat(&nl.transpose());
        Mat::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
            (true, true) => self.g[(a, b)] + ngnt[(a, b)],
            (true, false) => ng[(a, b - n)],
            (false, true) => ng[(b, a - n)],
            (false, false) => self.g[(a - n, b - n)],
        })
    }

    /// `J = δ/δx^i ⊗ δy^i − ∂/∂y^i ⊗ dx^i`.
    pub fn apply_j(&self, v: &[T]) -> Vec<T> {
        let (h, w) = self.split(v);
        let mut out = self.horizontal_lift(&w);
        for i in 0..self.n {
            out[self.n + i] -= h[i];
        }
        out
    }

    /// Coefficients of `v` in the adapted frame, ordered
    /// `(δ̄_1..δ̄_{n−1}, ξ, ∂̄_1..∂̄_{n−1}, L)`.
    pub fn adapted_coeffs(&self, v: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        let (h, w) = self.split(v);
        // columns: E_1 .. E_{n−1}, y
        let basis = Mat::from_fn(n, n, |i, c| {
            if c + 1 < n {
                self.e[(c, i)]
            } else {
                self.y()[i]
            }
        });
        let mut out = solve(&basis, &h)?;
        out.extend(solve(&basis, &w)?);
        Ok(out)
    }

    /// Natural components from adapted-frame coefficients.
    pub fn from_adapted(&self, c: &[T]) -> Vec<T> {
        let n = self.n;
        let mut h = vec![T::zero(); n];
        let mut w = vec![T::zero(); n];
        for i in 0..n {
            h[i] = c[n - 1] * self.y()[i];
            w[i] = c[2 * n - 1] * self.y()[i];
            for a in 0..n - 1 {
                h[i] += c[a] * self.e[(a, i)];
                w[i] += c[n + a] * self.e[(a, i)];
            }
        }
        let mut v = self.horizontal_lift(&h);
        for i in 0..n {
            v[n + i] += w[i];
        }
        v
    }

    /// `g_ab = g_ij E_a^i E_b^j`.
    pub fn g_ab(&self) -> Mat<T> {
        let et = self.e.transpose();
        self.e.mul_mat(&self.g).mul_mat(&et)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Metric;

    #[test]
    fn pivot_tie_prefers_smallest_index() {
        assert_eq!(pivot_index(&[1.0, -1.0, 0.5]), 0);
        assert_eq!(pivot_index(&[0.2, -1.0, 1.0]), 1);
    }

    #[test]
    fn euclidean_frame_at_axis() {
        let m = Metric::euclidean(2);
        let q = [0.3, 0.1, 1.0, 0.0];
        let geo = LocalGeometry::compute(&m, &q, 0).unwrap();
        assert_eq!(geo.e.row(0), &[0.0, 1.0]);
        assert_eq!(geo.nonlinear.max_abs(), 0.0);
        let gm = geo.sasaki_matrix();
        assert_eq!(gm, Mat::identity(4));
    }

    #[test]
    fn adapted_roundtrip() {
        let m = Metric::randers_var(3);
        let q = [0.2, -0.4, 0.7, 0.5, 1.2, -0.3];
        let geo = LocalGeometry::compute(&m, &q, pivot_index(&q[3..])).unwrap();
        let v = [0.1, -0.2, 0.3, 0.9, -1.1, 0.25];
        let c = geo.adapted_coeffs(&v).unwrap();
        let back = geo.from_adapted(&c);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
