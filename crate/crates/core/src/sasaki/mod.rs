//! The Sasaki metric on `TM`, its Levi-Civita connection, the induced
//! connection on level sets of `F`, and their curvature.

mod closed_form;
mod curvature;
mod koszul;

pub use closed_form::{
    closed_form_nabla, connection_table, connection_table_with, AlternativeResidual,
    ConnectionEntry, ConnectionTable, Discrepancy, Hypothesis, PairKind, RbadReading, RijReading,
    StanzaSummary, Symbols, CONNECTION_TOL,
};
pub use curvature::{
    curvature, curvature_relation_check, curvature_with, equal_combination_count,
    induced_curvature, CurvatureRelationReport, RelationResidual, RELATION_TOL,
};
pub use koszul::{koszul_nabla, Connection, Covariant, Induced, LeviCivita};

use serde::{Deserialize, Serialize};

use crate::dual::{seed_along, Dual, Scalar};
use crate::error::{GeometryError, Result};
use crate::finsler::{check_dim, FinslerFunction};
use crate::frame::{FrameField, TangentVector, VectorField};
use crate::geometry::{pivot_index, LocalGeometry};
use crate::jet::JetPoint;
use crate::linalg::Mat;

/// `|F − 1|` allowed for a point of the indicatrix bundle.
pub const INDICATRIX_TOL: f64 = 1e-9;
/// `|dF(v)|` allowed for a vector tangent to the indicatrix bundle.
pub const TANGENCY_TOL: f64 = 1e-8;

pub fn metric_eval<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    v: &TangentVector,
    w: &TangentVector,
) -> Result<f64> {
    check_dim(m, p)?;
    let n = p.dim();
    for t in [v, w] {
        if t.comps.len() != 2 * n {
            return Err(GeometryError::DimensionMismatch {
                expected: 2 * n,
                got: t.comps.len(),
            });
        }
    }
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y()))?;
    Ok(geo.sasaki(&v.comps, &w.comps))
}

/// Gram matrix of the Sasaki metric in the adapted frame.
pub fn adapted_gram<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Mat<f64>> {
    check_dim(m, p)?;
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y()))?;
    let frame: Vec<Vec<f64>> = FrameField::adapted(geo.n)
        .iter()
        .map(|f| f.components(&geo))
        .collect();
    let k = frame.len();
    Ok(Mat::from_fn(k, k, |a, b| geo.sasaki(&frame[a], &frame[b])))
}

/// The block form `diag(g_ab, F², g_ab, F²)`.
pub fn block_gram<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Mat<f64>> {
    check_dim(m, p)?;
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y()))?;
    let n = geo.n;
    let gab = geo.g_ab();
    let f2 = geo.f * geo.f;
    Ok(Mat::from_fn(2 * n, 2 * n, |a, b| {
        let (ba, ia) = (a / n, a % n);
        let (bb, ib) = (b / n, b % n);
        if ba != bb {
            0.0
        } else if ia == n - 1 && ib == n - 1 {
            f2
        } else if ia == n - 1 || ib == n - 1 {
            0.0
        } else {
            gab[(ia, ib)]
        }
    }))
}

/// `dF(v)`, via a directional derivative of `F`.
pub fn df_along<T: Scalar, M: FinslerFunction>(m: &M, q: &[T], v: &[T]) -> T {
    let n = q.len() / 2;
    let s = seed_along(q, v);
    let f: Dual<T> = m.eval(&s[..n], &s[n..]);
    f.eps
}

pub fn check_indicatrix<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<()> {
    check_dim(m, p)?;
    let defect = (m.eval_coords(&p.coords()) - 1.0).abs();
    if !(defect < INDICATRIX_TOL) {
        return Err(GeometryError::OffIndicatrix { defect });
    }
    Ok(())
}

/// The second fundamental form of a level set of `F` in `(TM, G)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecondFundamentalForm {
    /// `H(X, Y)` in natural components
    pub vector: TangentVector,
    /// `H(X, Y) = coefficient · L`
    pub coefficient: f64,
}

/// `H(X, Y) = G(∇_X Y, L) / G(L, L) · L` at a point of the indicatrix bundle.
pub fn second_fundamental_form<M: FinslerFunction, X: VectorField, Y: VectorField>(
    m: &M,
    p: &JetPoint,
    x: &X,
    y: &Y,
) -> Result<SecondFundamentalForm> {
    check_indicatrix(m, p)?;
    let q = p.coords();
    let geo = LocalGeometry::compute(m, &q, pivot_index(p.y()))?;
    for v in [x.eval(m, &geo)?, y.eval(m, &geo)?] {
        let defect = df_along(m, &q, &v).abs();
        if !(defect < TANGENCY_TOL) {
            return Err(GeometryError::NotTangent { defect });
        }
    }
    let nabla = koszul_nabla(m, &q, geo.pivot, x, y)?;
    let l = FrameField::Liouville.components(&geo);
    let c = geo.sasaki(&nabla, &l) / geo.sasaki(&l, &l);
    Ok(SecondFundamentalForm {
        vector: TangentVector::new(l.iter().map(|v| c * v).collect()),
        coefficient: c,
    })
}

/// Natural components of `∇_X Y` at `p`.
pub fn nabla_at<M: FinslerFunction, X: VectorField, Y: VectorField>(
    m: &M,
    p: &JetPoint,
    x: &X,
    y: &Y,
) -> Result<TangentVector> {
    check_dim(m, p)?;
    Ok(TangentVector::new(koszul_nabla(
        m,
        &p.coords(),
        pivot_index(p.y()),
        x,
        y,
    )?))
}

/// Torsion and metric-compatibility residuals of the oracle on every pair
/// and triple of adapted-frame fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KoszulSelfCheck {
    /// `max |∇_X Y − ∇_Y X − [X,Y]|`
    pub torsion: f64,
    /// `max |X G(Y,Z) − G(∇_X Y, Z) − G(Y, ∇_X Z)|`
    pub compatibility: f64,
}

pub fn koszul_self_check<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<KoszulSelfCheck> {
    check_dim(m, p)?;
    let q = p.coords();
    let pivot = pivot_index(p.y());
    let geo = LocalGeometry::compute(m, &q, pivot)?;
    let frame = FrameField::adapted(geo.n);
    let vals: Vec<Vec<f64>> = frame.iter().map(|f| f.components(&geo)).collect();
    let mut nab = Vec::with_capacity(frame.len());
    for x in &frame {
        let row: Result<Vec<Vec<f64>>> = frame
            .iter()
            .map(|y| koszul_nabla(m, &q, pivot, x, y))
            .collect();
        nab.push(row?);
    }
    let mut torsion: f64 = 0.0;
    for (i, x) in frame.iter().enumerate() {
        for (j, y) in frame.iter().enumerate().skip(i + 1) {
            let br = crate::frame::lie_bracket(m, &q, pivot, x, y)?;
            for c in 0..q.len() {
                torsion = torsion.max((nab[i][j][c] - nab[j][i][c] - br[c]).abs());
            }
        }
    }
    let mut compatibility: f64 = 0.0;
    for (i, xv) in vals.iter().enumerate() {
        let gd = LocalGeometry::<Dual<f64>>::compute(m, &seed_along(&q, xv), pivot)?;
        let dvals: Vec<Vec<Dual<f64>>> = frame.iter().map(|f| f.components(&gd)).collect();
        for j in 0..frame.len() {
            for k in 0..frame.len() {
                let d = gd.sasaki(&dvals[j], &dvals[k]).eps;
                let r = d - geo.sasaki(&nab[i][j], &vals[k]) - geo.sasaki(&vals[j], &nab[i][k]);
                compatibility = compatibility.max(r.abs());
            }
        }
    }
    Ok(KoszulSelfCheck {
        torsion,
        compatibility,
    })
}
