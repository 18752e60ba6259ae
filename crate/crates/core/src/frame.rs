//! The adapted frame `{δ̄/δ̄x^a, ξ, ∂̄/∂̄y^a, L}`, the almost complex
//! structure `J`, Lie brackets of vector fields on `TM`, and the bracket
//! table of the adapted frame.

use serde::{Deserialize, Serialize};

use crate::dual::{seed_along, Dual, Scalar};
use crate::error::Result;
use crate::finsler::{check_dim, FinslerFunction};
use crate::geometry::{pivot_index, LocalGeometry};
use crate::jet::JetPoint;
use crate::linalg::{max_abs, sub_vec, Mat};
use crate::spray::SprayData;

/// Bracket-table residual threshold.
pub const BRACKET_TOL: f64 = 1e-8;

/// A tangent vector of `TM` in the natural basis `(∂/∂x^i, ∂/∂y^i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub comps: Vec<f64>,
}

impl TangentVector {
    pub fn new(comps: Vec<f64>) -> Self {
        TangentVector { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len() / 2
    }

    pub fn horizontal(&self) -> &[f64] {
        &self.comps[..self.dim()]
    }

    pub fn vertical(&self) -> &[f64] {
        &self.comps[self.dim()..]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.comps)
    }
}

/// A smooth vector field near a point, evaluable over any scalar type.
pub trait VectorField: Sync {
    fn eval<T: Scalar, M: FinslerFunction>(&self, m: &M, geo: &LocalGeometry<T>) -> Result<Vec<T>>;
}

impl<V: VectorField> VectorField for &V {
    fn eval<T: Scalar, M: FinslerFunction>(&self, m: &M, geo: &LocalGeometry<T>) -> Result<Vec<T>> {
        (**self).eval(m, geo)
    }
}

/// Frame and coordinate fields; indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameField {
    /// `δ̄/δ̄x^a = E_a^i δ/δx^i`
    HBar(usize),
    /// `ξ = y^i δ/δx^i`
    Xi,
    /// `∂̄/∂̄y^a = E_a^i ∂/∂y^i`
    VBar(usize),
    /// `L = y^i ∂/∂y^i`
    Liouville,
    /// `δ/δx^i`
    Delta(usize),
    /// `∂/∂y^i`
    DotY(usize),
    /// `∂/∂x^i`
    CoordX(usize),
}

impl FrameField {
    pub fn components<T: Scalar>(&self, geo: &LocalGeometry<T>) -> Vec<T> {
        let n = geo.n;
        let unit = |i: usize| {
            let mut v = vec![T::zero(); n];
            v[i] = T::one();
            v
        };
        match *self {
            FrameField::HBar(a) => geo.horizontal_lift(geo.e_row(a)),
            FrameField::Xi => geo.horizontal_lift(geo.y()),
            FrameField::VBar(a) => geo.vertical_lift(geo.e_row(a)),
            FrameField::Liouville => geo.vertical_lift(geo.y()),
            FrameField::Delta(i) => geo.horizontal_lift(&unit(i)),
            FrameField::DotY(i) => geo.vertical_lift(&unit(i)),
            FrameField::CoordX(i) => {
                let mut v = vec![T::zero(); 2 * n];
                v[i] = T::one();
                v
            }
        }
    }

    /// Short label such as `hbar1`, `xi`, `vbar2`, `L`.
    pub fn label(&self) -> String {
        match *self {
            FrameField::HBar(a) => format!("hbar{}", a + 1),
            FrameField::Xi => "xi".into(),
            FrameField::VBar(a) => format!("vbar{}", a + 1),
            FrameField::Liouville => "L".into(),
            FrameField::Delta(i) => format!("delta{}", i + 1),
            FrameField::DotY(i) => format!("dy{}", i + 1),
            FrameField::CoordX(i) => format!("dx{}", i + 1),
        }
    }

    /// The adapted frame in coefficient order.
    pub fn adapted(n: usize) -> Vec<FrameField> {
        let mut v: Vec<FrameField> = (0..n - 1).map(FrameField::HBar).collect();
        v.push(FrameField::Xi);
        v.extend((0..n - 1).map(FrameField::VBar));
        v.push(FrameField::Liouville);
        v
    }
}

impl VectorField for FrameField {
    fn eval<T: Scalar, M: FinslerFunction>(
        &self,
        _m: &M,
        geo: &LocalGeometry<T>,
    ) -> Result<Vec<T>> {
        Ok(self.components(geo))
    }
}

/// `J` applied point-wise to another field.
#[derive(Clone, Debug)]
pub struct JField<V>(pub V);

impl<V: VectorField> VectorField for JField<V> {
    fn eval<T: Scalar, M: FinslerFunction>(&self, m: &M, geo: &LocalGeometry<T>) -> Result<Vec<T>> {
        Ok(geo.apply_j(&self.0.eval(m, geo)?))
    }
}

/// A field with constant natural components.
#[derive(Clone, Debug)]
pub struct ConstantField(pub Vec<f64>);

impl VectorField for ConstantField {
    fn eval<T: Scalar, M: FinslerFunction>(
        &self,
        _m: &M,
        _geo: &LocalGeometry<T>,
    ) -> Result<Vec<T>> {
        Ok(self.0.iter().map(|&v| T::from_f64(v)).collect())
    }
}

/// A real multiple of another field.
#[derive(Clone, Debug)]
pub struct Scaled<V>(pub f64, pub V);

impl<V: VectorField> VectorField for Scaled<V> {
    fn eval<T: Scalar, M: FinslerFunction>(&self, m: &M, geo: &LocalGeometry<T>) -> Result<Vec<T>> {
        Ok(self
            .1
            .eval(m, geo)?
            .into_iter()
            .map(|v| v.scale(self.0))
            .collect())
    }
}

/// Derivative of the natural components of `field` along `dir` at `q`.
pub fn derivative_along<T: Scalar, M: FinslerFunction, V: VectorField>(
    m: &M,
    q: &[T],
    pivot: usize,
    dir: &[T],
    field: &V,
) -> Result<Vec<T>> {
    let geo = LocalGeometry::<Dual<T>>::compute(m, &seed_along(q, dir), pivot)?;
    Ok(field.eval(m, &geo)?.iter().map(|d| d.eps).collect())
}

/// `[X, Y]^A = X(Y^A) − Y(X^A)`.
pub fn lie_bracket<T: Scalar, M: FinslerFunction, X: VectorField, Y: VectorField>(
    m: &M,
    q: &[T],
    pivot: usize,
    x: &X,
    y: &Y,
) -> Result<Vec<T>> {
    let geo = LocalGeometry::compute(m, q, pivot)?;
    let xv = x.eval(m, &geo)?;
    let yv = y.eval(m, &geo)?;
    let y_along_x = derivative_along(m, q, pivot, &xv, y)?;
    let x_along_y = derivative_along(m, q, pivot, &yv, x)?;
    Ok(sub_vec(&y_along_x, &x_along_y))
}

pub fn lie_bracket_field<M: FinslerFunction, X: VectorField, Y: VectorField>(
    m: &M,
    p: &JetPoint,
    x: &X,
    y: &Y,
) -> Result<TangentVector> {
    check_dim(m, p)?;
    Ok(TangentVector::new(lie_bracket(
        m,
        &p.coords(),
        pivot_index(p.y()),
        x,
        y,
    )?))
}

/// The adapted frame at a point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdaptedFrame {
    pub point: JetPoint,
    pub pivot: usize,
    /// `e[a][i] = E_a^i`
    pub e: Vec<Vec<f64>>,
    pub hbar: Vec<TangentVector>,
    pub xi: TangentVector,
    pub vbar: Vec<TangentVector>,
    pub liouville: TangentVector,
    pub g_ab: Vec<Vec<f64>>,
    pub f_value: f64,
}

impl AdaptedFrame {
    /// Frame vectors in coefficient order.
    pub fn vectors(&self) -> Vec<&TangentVector> {
        let mut v: Vec<&TangentVector> = self.hbar.iter().collect();
        v.push(&self.xi);
        v.extend(self.vbar.iter());
        v.push(&self.liouville);
        v
    }

    pub fn g_ab_mat(&self) -> Mat<f64> {
        let k = self.g_ab.len();
        Mat::from_fn(k, k, |a, b| self.g_ab[a][b])
    }

    /// `max_a |E_a^i g_ij y^j|`.
    pub fn annihilation_defect(&self, g: &Mat<f64>) -> f64 {
        let gy = g.mul_vec(self.point.y());
        self.e
            .iter()
            .map(|row| row.iter().zip(&gy).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

pub fn build_adapted_frame<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<AdaptedFrame> {
    // rejects degenerate metrics
    crate::finsler::fundamental_tensor(m, p)?;
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y()))?;
    let n = geo.n;
    let tv = |f: FrameField| TangentVector::new(f.components(&geo));
    Ok(AdaptedFrame {
        point: p.clone(),
        pivot: geo.pivot,
        e: geo.e.to_rows(),
        hbar: (0..n - 1).map(|a| tv(FrameField::HBar(a))).collect(),
        xi: tv(FrameField::Xi),
        vbar: (0..n - 1).map(|a| tv(FrameField::VBar(a))).collect(),
        liouville: tv(FrameField::Liouville),
        g_ab: geo.g_ab().to_rows(),
        f_value: geo.f,
    })
}

pub fn apply_j<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    v: &TangentVector,
) -> Result<TangentVector> {
    check_dim(m, p)?;
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y()))?;
    Ok(TangentVector::new(geo.apply_j(&v.comps)))
}

/// Point data plus derivatives of `E_a^i` along arbitrary directions, used
/// to evaluate the closed-form bracket and connection tables.
pub(crate) struct FrameCalculus<'m, M> {
    pub m: &'m M,
    pub q: Vec<f64>,
    pub geo: LocalGeometry<f64>,
    pub spray: SprayData,
}

impl<'m, M: FinslerFunction> FrameCalculus<'m, M> {
    pub fn new(m: &'m M, p: &JetPoint) -> Result<Self> {
        check_dim(m, p)?;
        let q = p.coords();
        let geo = LocalGeometry::compute(m, &q, pivot_index(p.y()))?;
        let spray = SprayData::compute(m, p)?;
        Ok(FrameCalculus { m, q, geo, spray })
    }

    pub fn n(&self) -> usize {
        self.geo.n
    }

    pub fn field(&self, f: FrameField) -> Vec<f64> {
        f.components(&self.geo)
    }

    /// `v(E_a^i)` as an `(n−1) × n` matrix.
    pub fn e_along(&self, v: &[f64]) -> Result<Mat<f64>> {
        let geo =
            LocalGeometry::<Dual<f64>>::compute(self.m, &seed_along(&self.q, v), self.geo.pivot)?;
        Ok(geo.e.eps())
    }

    /// `v(g_ij)`.
    pub fn g_along(&self, v: &[f64]) -> Result<Mat<f64>> {
        let geo =
            LocalGeometry::<Dual<f64>>::compute(self.m, &seed_along(&self.q, v), self.geo.pivot)?;
        Ok(geo.g.eps())
    }

    pub fn e_along_field(&self, f: FrameField) -> Result<Mat<f64>> {
        self.e_along(&self.field(f))
    }

    pub fn bracket(&self, x: FrameField, y: FrameField) -> Result<Vec<f64>> {
        lie_bracket(self.m, &self.q, self.geo.pivot, &x, &y)
    }

    /// `h^i δ/δx^i + w^k ∂/∂y^k`.
    pub fn combine(&self, h: &[f64], w: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut v = self.geo.horizontal_lift(h);
        for k in 0..n {
            v[n + k] += w[k];
        }
        v
    }
}

/// Residuals of the eight adapted-frame bracket identities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketReport {
    /// items (1)–(7), then (8) as the max over its three parts
    pub residuals: [f64; 8],
    /// `|[ξ, L] + ξ|`
    pub xi_l_minus: f64,
    /// `|[ξ, L] − ξ|`
    pub xi_l_plus: f64,
    /// sign `s` with `[ξ, L] = s·ξ`, as determined numerically
    pub xi_l_sign: i8,
    pub pass: bool,
}

pub fn verify_bracket_table<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<BracketReport> {
    let c = FrameCalculus::new(m, p)?;
    let n = c.n();
    let geo = &c.geo;
    let s = &c.spray;
    let y = geo.y().to_vec();
    let e = |a: usize| geo.e_row(a).to_vec();
    let mut res = [0.0f64; 8];
    let mut bump = |k: usize, lhs: &[f64], rhs: &[f64]| {
        res[k] = res[k].max(max_abs(&sub_vec(lhs, rhs)));
    };
    let xi = c.field(FrameField::Xi);
    let l = c.field(FrameField::Liouville);
    let e_xi = c.e_along(&xi)?;
    let e_l = c.e_along(&l)?;
    let mut e_h = Vec::new();
    let mut e_v = Vec::new();
    for a in 0..n - 1 {
        e_h.push(c.e_along_field(FrameField::HBar(a))?);
        e_v.push(c.e_along_field(FrameField::VBar(a))?);
    }
    for a in 0..n - 1 {
        let ea = e(a);
        for b in 0..n - 1 {
            let eb = e(b);
            // (1)
            let lhs = c.bracket(FrameField::HBar(a), FrameField::HBar(b))?;
            let h: Vec<f64> = (0..n).map(|i| e_h[a][(b, i)] - e_h[b][(a, i)]).collect();
            let w: Vec<f64> = (0..n)
                .map(|k| {
                    let mut v = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            v += ea[i] * eb[j] * s.curvature(k, i, j);
                        }
                    }
                    v
                })
                .collect();
            bump(0, &lhs, &c.combine(&h, &w));
            // (2)
            let lhs = c.bracket(FrameField::HBar(a), FrameField::VBar(b))?;
            let h: Vec<f64> = (0..n).map(|i| -e_v[b][(a, i)]).collect();
            let w: Vec<f64> = (0..n)
                .map(|k| {
                    let mut v = e_h[a][(b, k)];
                    for i in 0..n {
                        for j in 0..n {
                            v += ea[i] * eb[j] * s.berwald(i, j, k);
                        }
                    }
                    v
                })
                .collect();
            bump(1, &lhs, &c.combine(&h, &w));
            // (3)
            let lhs = c.bracket(FrameField::VBar(a), FrameField::VBar(b))?;
            let w: Vec<f64> = (0..n).map(|i| e_v[a][(b, i)] - e_v[b][(a, i)]).collect();
            bump(2, &lhs, &c.combine(&vec![0.0; n], &w));
        }
        // E_a^i G_i^j
        let eg: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| ea[i] * geo.nonlinear[(i, j)]).sum())
            .collect();
        // (4)
        let lhs = c.bracket(FrameField::HBar(a), FrameField::Xi)?;
        let h: Vec<f64> = (0..n).map(|j| -(eg[j] + e_xi[(a, j)])).collect();
        let w: Vec<f64> = (0..n)
            .map(|k| {
                let mut v = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        v += ea[i] * y[j] * s.curvature(k, i, j);
                    }
                }
                v
            })
            .collect();
        bump(3, &lhs, &c.combine(&h, &w));
        // (5)
        let lhs = c.bracket(FrameField::VBar(a), FrameField::Xi)?;
        let w: Vec<f64> = (0..n).map(|j| -(e_xi[(a, j)] + eg[j])).collect();
        bump(4, &lhs, &c.combine(&ea, &w));
        // (6)
        let lhs = c.bracket(FrameField::HBar(a), FrameField::Liouville)?;
        let h: Vec<f64> = (0..n).map(|i| -e_l[(a, i)]).collect();
        bump(5, &lhs, &c.combine(&h, &vec![0.0; n]));
        // (7)
        let lhs = c.bracket(FrameField::VBar(a), FrameField::Liouville)?;
        let w: Vec<f64> = (0..n).map(|i| ea[i] - e_l[(a, i)]).collect();
        bump(6, &lhs, &c.combine(&vec![0.0; n], &w));
    }
    // (8)
    let zero = vec![0.0; 2 * n];
    bump(7, &c.bracket(FrameField::Xi, FrameField::Xi)?, &zero);
    bump(
        7,
        &c.bracket(FrameField::Liouville, FrameField::Liouville)?,
        &zero,
    );
    let xl = c.bracket(FrameField::Xi, FrameField::Liouville)?;
    let neg_xi: Vec<f64> = xi.iter().map(|v| -v).collect();
    let xi_l_minus = max_abs(&sub_vec(&xl, &neg_xi));
    let xi_l_plus = max_abs(&sub_vec(&xl, &xi));
    res[7] = res[7].max(xi_l_minus);
    let xi_l_sign = if xi_l_minus <= xi_l_plus { -1 } else { 1 };
    let pass = res.iter().all(|r| *r < BRACKET_TOL);
    Ok(BracketReport {
        residuals: res,
        xi_l_minus,
        xi_l_plus,
        xi_l_sign,
        pass,
    })
}
