//! Fundamental function, fundamental tensor, lowered Cartan tensor and
//! homogeneity diagnostics.

use serde::{Deserialize, Serialize};

use crate::dual::{lift, seed_along, seed_coordinate, Dual, Scalar};
use crate::error::Result;
use crate::jet::{partial, JetPoint, ScalarField, Slot};
use crate::linalg::{cholesky_min_pivot, inverse, Mat};

/// Pivot tolerance for the positive-definiteness check of `g_ij`.
pub const PD_PIVOT_TOL: f64 = 1e-10;

/// A Finsler fundamental function `F(x, y)`; [`ScalarField::eval`] returns `F`.
pub trait FinslerFunction: ScalarField {
    fn dim(&self) -> usize;
    fn name(&self) -> String;
}

/// `F²` as a scalar field.
pub struct Energy<'a, M>(pub &'a M);

impl<M: FinslerFunction> ScalarField for Energy<'_, M> {
    fn eval<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        let f = self.0.eval(x, y);
        f * f
    }
}

#[inline]
pub(crate) fn energy_at<T: Scalar, M: FinslerFunction>(m: &M, q: &[T]) -> T {
    let f = m.eval_coords(q);
    f * f
}

/// `½ ∂²F²/∂y^i∂y^j` over any scalar type.
pub(crate) fn fundamental_matrix<T: Scalar, M: FinslerFunction>(m: &M, q: &[T]) -> Mat<T> {
    let n = q.len() / 2;
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        let inner = seed_coordinate(q, n + i);
        for j in i..n {
            let outer = seed_coordinate(&inner, n + j);
            let v = energy_at(m, &outer).eps.eps.scale(0.5);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Spray coefficients together with the tensor data they were built from.
pub(crate) struct SprayJet<T> {
    pub f: T,
    pub g: Mat<T>,
    pub g_inv: Mat<T>,
    pub spray: Vec<T>,
}

/// `G^i = ¼ g^{ij} (∂²F²/∂y^j∂x^k y^k − ∂F²/∂x^j)` over any scalar type.
pub(crate) fn spray_jet<T: Scalar, M: FinslerFunction>(m: &M, q: &[T]) -> Result<SprayJet<T>> {
    let n = q.len() / 2;
    let g = fundamental_matrix(m, q);
    let g_inv = inverse(&g)?;
    // outer direction: move x along y
    let mut dir: Vec<Dual<T>> = lift(&vec![T::zero(); 2 * n]);
    for k in 0..n {
        dir[k] = Dual::constant(q[n + k]);
    }
    let mut rhs = vec![T::zero(); n];
    for (j, r) in rhs.iter_mut().enumerate() {
        let inner = seed_coordinate(q, n + j);
        let mixed = energy_at(m, &seed_along(&inner, &dir)).eps.eps;
        let dx = energy_at(m, &seed_coordinate(q, j)).eps;
        *r = mixed - dx;
    }
    let spray = g_inv
        .mul_vec(&rhs)
        .into_iter()
        .map(|v| v.scale(0.25))
        .collect();
    Ok(SprayJet {
        f: m.eval_coords(q),
        g,
        g_inv,
        spray,
    })
}

/// `g_ij`, its inverse and `F` at a point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FundamentalTensor {
    pub g: Vec<Vec<f64>>,
    pub g_inv: Vec<Vec<f64>>,
    pub f_value: f64,
    pub point: JetPoint,
    /// Smallest Cholesky pivot of `g`.
    pub min_pivot: f64,
}

impl FundamentalTensor {
    pub fn g_mat(&self) -> Mat<f64> {
        let n = self.g.len();
        Mat::from_fn(n, n, |i, j| self.g[i][j])
    }

    /// `y^i g_ij y^j`.
    pub fn norm_sq(&self) -> f64 {
        self.g_mat().bilinear(self.point.y(), self.point.y())
    }
}

pub fn fundamental_tensor<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<FundamentalTensor> {
    check_dim(m, p)?;
    let q = p.coords();
    let g = fundamental_matrix(m, &q);
    let min_pivot = cholesky_min_pivot(&g, PD_PIVOT_TOL)?;
    let g_inv = inverse(&g)?;
    Ok(FundamentalTensor {
        g: g.to_rows(),
        g_inv: g_inv.to_rows(),
        f_value: m.eval_coords(&q),
        point: p.clone(),
        min_pivot,
    })
}

pub(crate) fn check_dim<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<()> {
    if m.dim() != p.dim() {
        return Err(crate::GeometryError::DimensionMismatch {
            expected: m.dim(),
            got: p.dim(),
        });
    }
    Ok(())
}

/// `g_ijk = ∂g_ij/∂y^k`, stored flat as `[i][j][k]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CartanLowered {
    pub n: usize,
    pub g3: Vec<f64>,
    pub point: JetPoint,
}

impl CartanLowered {
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.g3[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.g3.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|g_ijk y^k|` over `(i, j)`.
    pub fn euler_defect(&self) -> f64 {
        let y = self.point.y();
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| self.get(i, j, k) * y[k]).sum();
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    /// Largest deviation from total symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for w in [self.get(j, i, k), self.get(i, k, j), self.get(k, j, i)] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }
}

pub fn cartan_lowered<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<CartanLowered> {
    check_dim(m, p)?;
    let n = p.dim();
    let e = Energy(m);
    let mut g3 = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v = 0.5 * partial(&e, p, &[Slot::Y(i), Slot::Y(j), Slot::Y(k)])?;
                for (a, b, c) in permutations(i, j, k) {
                    g3[(a * n + b) * n + c] = v;
                }
            }
        }
    }
    Ok(CartanLowered {
        n,
        g3,
        point: p.clone(),
    })
}

fn permutations(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 6] {
    [
        (i, j, k),
        (i, k, j),
        (j, i, k),
        (j, k, i),
        (k, i, j),
        (k, j, i),
    ]
}

pub const DEFAULT_LAMBDAS: [f64; 3] = [0.5, 2.0, 3.0];

/// Threshold above which a homogeneity defect is flagged.
pub const HOMOGENEITY_FLAG_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomogeneityReport {
    /// max relative defect of `F(x, λy) − λF(x, y)`
    pub f_defect: f64,
    /// max relative defect of `g(x, λy) − g(x, y)`
    pub g_defect: f64,
    /// max relative defect of `G^i(x, λy) − λ²G^i(x, y)`
    pub spray_defect: f64,
    pub flagged: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn homogeneity_report<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    lambdas: &[f64],
) -> Result<HomogeneityReport> {
    check_dim(m, p)?;
    let q = p.coords();
    let n = p.dim();
    let base = spray_jet(m, &q)?;
    let mut report = HomogeneityReport {
        f_defect: 0.0,
        g_defect: 0.0,
        spray_defect: 0.0,
        flagged: false,
    };
    for &lam in lambdas {
        let mut ql = q.clone();
        for v in &mut ql[n..] {
            *v *= lam;
        }
        let scaled = spray_jet(m, &ql)?;
        report.f_defect = report.f_defect.max(rel(scaled.f, lam * base.f));
        for i in 0..n {
            for j in 0..n {
                report.g_defect = report.g_defect.max(rel(scaled.g[(i, j)], base.g[(i, j)]));
            }
            report.spray_defect = report
                .spray_defect
                .max(rel(scaled.spray[i], lam * lam * base.spray[i]));
        }
    }
    report.flagged = report
        .f_defect
        .max(report.g_defect)
        .max(report.spray_defect)
        > HOMOGENEITY_FLAG_TOL;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Metric;

    fn pt(x: &[f64], y: &[f64]) -> JetPoint {
        JetPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_tensor_is_identity() {
        let t = fundamental_tensor(&Metric::euclidean(2), &pt(&[0.4, -0.3], &[0.7, 1.1])).unwrap();
        assert!((t.g[0][0] - 1.0).abs() < 1e-14 && (t.g[1][1] - 1.0).abs() < 1e-14);
        assert!(t.g[0][1].abs() < 1e-14);
    }

    #[test]
    fn randers_tensor_at_axis() {
        let m = Metric::randers_const(vec![0.1, 0.0]).unwrap();
        let t = fundamental_tensor(&m, &pt(&[0.0, 0.0], &[1.0, 0.0])).unwrap();
        assert!((t.g[0][0] - 1.21).abs() < 1e-12);
        assert!((t.g[1][1] - 1.1).abs() < 1e-12);
        assert!(t.g[0][1].abs() < 1e-12);
        assert!((t.norm_sq() - t.f_value * t.f_value).abs() < 1e-12);
    }

    #[test]
    fn riemannian_cartan_vanishes() {
        let c = cartan_lowered(&Metric::Riemannian2d, &pt(&[0.5, 0.1], &[0.3, -0.9])).unwrap();
        assert!(c.max_abs() < 1e-10);
    }

    #[test]
    fn randers_cartan_obeys_euler() {
        let m = Metric::randers_const(vec![0.1, 0.0]).unwrap();
        let c = cartan_lowered(&m, &pt(&[0.0, 0.0], &[1.0, 0.5])).unwrap();
        assert!(c.euler_defect() < 1e-10);
        assert!(c.max_abs() > 1e-3);
        assert!(c.symmetry_defect() < 1e-12);
        // y parallel to b: the Randers Cartan tensor degenerates
        let c = cartan_lowered(&m, &pt(&[0.0, 0.0], &[1.0, 0.0])).unwrap();
        assert!(c.max_abs() < 1e-12);
    }

    struct Squared;
    impl ScalarField for Squared {
        fn eval<T: Scalar>(&self, _x: &[T], y: &[T]) -> T {
            y[0] * y[0] + y[1] * y[1]
        }
    }
    impl FinslerFunction for Squared {
        fn dim(&self) -> usize {
            2
        }
        fn name(&self) -> String {
            "squared_norm".into()
        }
    }

    #[test]
    fn homogeneity_flags_two_homogeneous_input() {
        let p = pt(&[0.1, 0.2], &[0.8, 0.6]);
        let r = homogeneity_report(&Squared, &p, &DEFAULT_LAMBDAS).unwrap();
        assert!(r.flagged);
        assert!(r.f_defect > 0.1);
        let r = homogeneity_report(&Metric::euclidean(2), &p, &DEFAULT_LAMBDAS).unwrap();
        assert!(!r.flagged);
        assert_eq!(r.f_defect, 0.0);
    }

    #[test]
    fn indefinite_hessian_is_degenerate() {
        struct Lorentz;
        impl ScalarField for Lorentz {
            fn eval<T: Scalar>(&self, _x: &[T], y: &[T]) -> T {
                (y[0] * y[0] - y[1] * y[1]).sqrt()
            }
        }
        impl FinslerFunction for Lorentz {
            fn dim(&self) -> usize {
                2
            }
            fn name(&self) -> String {
                "lorentz".into()
            }
        }
        let err = fundamental_tensor(&Lorentz, &pt(&[0.0, 0.0], &[2.0, 1.0])).unwrap_err();
        assert!(matches!(
            err,
            crate::GeometryError::DegenerateMetric { row: 1, .. }
        ));
    }
}
