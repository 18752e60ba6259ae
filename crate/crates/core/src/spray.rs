//! Spray, nonlinear connection, Berwald coefficients, the horizontal
//! derivative `δ/δx^i` and the curvature `R^k_ij` of the nonlinear
//! connection.

use serde::{Deserialize, Serialize};

use crate::dual::{seed_coordinate, Dual};
use crate::error::Result;
use crate::finsler::{check_dim, FinslerFunction};
use crate::geometry::{pivot_index, LocalGeometry};
use crate::jet::{partial, JetPoint, ScalarField, Slot};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SprayData {
    pub n: usize,
    /// `G^i`
    pub spray: Vec<f64>,
    /// `nonlinear[i][j] = G_i^j`
    pub nonlinear: Vec<Vec<f64>>,
    /// flat `[i][j][k] = G_ij^k`
    pub berwald: Vec<f64>,
    /// flat `[k][i][j] = R^k_ij`
    pub curvature: Vec<f64>,
    pub point: JetPoint,
}

impl SprayData {
    pub fn compute<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Self> {
        check_dim(m, p)?;
        let n = p.dim();
        let q = p.coords();
        let pivot = pivot_index(p.y());
        // dx[j][(i,k)] = ∂G_i^k/∂x^j, dy[j][(i,k)] = ∂G_i^k/∂y^j
        let mut dx = Vec::with_capacity(n);
        let mut dy = Vec::with_capacity(n);
        let mut base = None;
        for c in 0..2 * n {
            let geo = LocalGeometry::<Dual<f64>>::compute(m, &seed_coordinate(&q, c), pivot)?;
            let d = geo.nonlinear.eps();
            if c < n {
                dx.push(d);
            } else {
                dy.push(d);
            }
            if c == 0 {
                base = Some((
                    geo.spray.iter().map(|v| v.re).collect::<Vec<_>>(),
                    geo.nonlinear.re(),
                ));
            }
        }
        let (spray, nl) = base.expect("2n > 0");
        let mut berwald = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    berwald[(i * n + j) * n + k] = dy[j][(i, k)];
                }
            }
        }
        // δ_j G_i^k = ∂_{x^j} G_i^k − G_j^m G_im^k
        let delta = |j: usize, i: usize, k: usize| -> f64 {
            let mut v = dx[j][(i, k)];
            for mm in 0..n {
                v -= nl[(j, mm)] * dy[mm][(i, k)];
            }
            v
        };
        let mut curvature = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    curvature[(k * n + i) * n + j] = delta(j, i, k) - delta(i, j, k);
                }
            }
        }
        Ok(SprayData {
            n,
            spray,
            nonlinear: nl.to_rows(),
            berwald,
            curvature,
            point: p.clone(),
        })
    }

    /// `G_ij^k`
    #[inline]
    pub fn berwald(&self, i: usize, j: usize, k: usize) -> f64 {
        self.berwald[(i * self.n + j) * self.n + k]
    }

    /// `R^k_ij`
    #[inline]
    pub fn curvature(&self, k: usize, i: usize, j: usize) -> f64 {
        self.curvature[(k * self.n + i) * self.n + j]
    }

    pub fn curvature_norm(&self) -> f64 {
        self.curvature.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn spray_coeffs<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Vec<f64>> {
    check_dim(m, p)?;
    Ok(crate::finsler::spray_jet(m, &p.coords())?.spray)
}

pub fn nonlinear_connection<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Vec<Vec<f64>>> {
    check_dim(m, p)?;
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y()))?;
    Ok(geo.nonlinear.to_rows())
}

pub fn berwald_coeffs<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Vec<f64>> {
    Ok(SprayData::compute(m, p)?.berwald)
}

pub fn hv_curvature<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Vec<f64>> {
    Ok(SprayData::compute(m, p)?.curvature)
}

/// `δf/δx^i = ∂f/∂x^i − G_i^j ∂f/∂y^j`.
pub fn delta_derivative<F: ScalarField, M: FinslerFunction>(
    f: &F,
    m: &M,
    p: &JetPoint,
    i: usize,
) -> Result<f64> {
    let nl = nonlinear_connection(m, p)?;
    let mut v = partial(f, p, &[Slot::X(i)])?;
    for (j, nij) in nl[i].iter().enumerate() {
        v -= nij * partial(f, p, &[Slot::Y(j)])?;
    }
    Ok(v)
}
