//! The contact metric structure `(φ, η, ξ, Ḡ)` of the indicatrix bundle,
//! the connection `∇̃` built from it, the Sasakian obstruction `∇̃φ`, and the
//! Nijenhuis tensor of `J`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{seed_along, Dual, Scalar};
use crate::error::Result;
use crate::finsler::{check_dim, FinslerFunction};
use crate::frame::{lie_bracket, ConstantField, FrameField, JField, TangentVector, VectorField};
use crate::geometry::{pivot_index, LocalGeometry};
use crate::jet::JetPoint;
use crate::linalg::{add_vec, max_abs, min_eigenvalue, scale_vec, sub_vec};
use crate::sasaki::{check_indicatrix, Connection, Induced};
use crate::spray::SprayData;

/// Threshold for the contact identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Below this `N_J` or `R^k_ij` counts as zero.
pub const FLAT_TOL: f64 = 1e-8;
/// Threshold for the `N_J` component identities.
pub const NIJENHUIS_TOL: f64 = 1e-7;
/// Fewest points over which integrable-iff-flat is judged.
pub const FLATNESS_MIN_POINTS: usize = 10;
/// Margin under `λ_min(g_ab)` allowed for the Sasakian obstruction.
pub const OBSTRUCTION_MARGIN: f64 = 1e-6;

/// `η(v) = y^i g_ij dx^j(v)`.
pub fn eta<T: Scalar>(geo: &LocalGeometry<T>, v: &[T]) -> T {
    let n = geo.n;
    let y = geo.y();
    let mut out = T::zero();
    for i in 0..n {
        for j in 0..n {
            out += y[i] * geo.g[(i, j)] * v[j];
        }
    }
    out
}

/// `φ(v) = J v + η(v)/F² L`: `J` on `D`, zero on `ξ`, and tangent to the
/// level sets of `F` for every `v`.
pub fn phi<T: Scalar>(geo: &LocalGeometry<T>, v: &[T]) -> Vec<T> {
    let l = geo.vertical_lift(geo.y());
    let c = eta(geo, v) / (geo.f * geo.f);
    add_vec(&geo.apply_j(v), &scale_vec(c, &l))
}

/// `φ` applied point-wise to another field.
#[derive(Clone, Debug)]
pub struct PhiField<V>(pub V);

impl<V: VectorField> VectorField for PhiField<V> {
    fn eval<T: Scalar, M: FinslerFunction>(&self, m: &M, geo: &LocalGeometry<T>) -> Result<Vec<T>> {
        Ok(phi(geo, &self.0.eval(m, geo)?))
    }
}

/// The contact structure at one point of the indicatrix bundle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContactData {
    pub point: JetPoint,
    /// `η` as a covector on the natural basis
    pub eta: Vec<f64>,
    pub xi: TangentVector,
    /// `φ` as a matrix on natural components, row-major
    pub phi: Vec<Vec<f64>>,
    /// `{δ̄_a, ∂̄_a}`, spanning `D`
    pub d_basis: Vec<TangentVector>,
    /// labels of `tangent_basis`
    pub tangent_labels: Vec<String>,
    /// `{δ̄_a, ξ, ∂̄_a}`, spanning `T(IM)`
    pub tangent_basis: Vec<TangentVector>,
    /// `Ḡ` on `tangent_basis`
    pub g_bar: Vec<Vec<f64>>,
}

impl ContactData {
    pub fn eta_of(&self, v: &[f64]) -> f64 {
        self.eta.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn phi_of(&self, v: &[f64]) -> Vec<f64> {
        self.phi
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn tangent_frame(n: usize) -> Vec<FrameField> {
    let mut v: Vec<FrameField> = (0..n - 1).map(FrameField::HBar).collect();
    v.push(FrameField::Xi);
    v.extend((0..n - 1).map(FrameField::VBar));
    v
}

fn d_frame(n: usize) -> Vec<FrameField> {
    (0..n - 1)
        .map(FrameField::HBar)
        .chain((0..n - 1).map(FrameField::VBar))
        .collect()
}

fn local<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<(Vec<f64>, usize, LocalGeometry<f64>)> {
    check_indicatrix(m, p)?;
    let q = p.coords();
    let pivot = pivot_index(p.y());
    let geo = LocalGeometry::compute(m, &q, pivot)?;
    Ok((q, pivot, geo))
}

pub fn contact_structure<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<ContactData> {
    let (_, _, geo) = local(m, p)?;
    let n = geo.n;
    let unit = |c: usize| {
        (0..2 * n)
            .map(|k| if k == c { 1.0 } else { 0.0 })
            .collect::<Vec<f64>>()
    };
    let eta_cov: Vec<f64> = (0..2 * n).map(|c| eta(&geo, &unit(c))).collect();
    let cols: Vec<Vec<f64>> = (0..2 * n).map(|c| phi(&geo, &unit(c))).collect();
    let phi_mat = (0..2 * n)
        .map(|r| (0..2 * n).map(|c| cols[c][r]).collect())
        .collect();
    let tf = tangent_frame(n);
    let tangent_basis: Vec<TangentVector> = tf
        .iter()
        .map(|f| TangentVector::new(f.components(&geo)))
        .collect();
    let g_bar = tangent_basis
        .iter()
        .map(|a| {
            tangent_basis
                .iter()
                .map(|b| geo.sasaki(&a.comps, &b.comps))
                .collect()
        })
        .collect();
    Ok(ContactData {
        point: p.clone(),
        eta: eta_cov,
        xi: TangentVector::new(FrameField::Xi.components(&geo)),
        phi: phi_mat,
        d_basis: d_frame(n)
            .iter()
            .map(|f| TangentVector::new(f.components(&geo)))
            .collect(),
        tangent_labels: tf.iter().map(|f| f.label()).collect(),
        tangent_basis,
        g_bar,
    })
}

/// Residuals of the contact metric identities on the tangent frame of `IM`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContactIdentities {
    /// `|η(ξ) − 1|`
    pub eta_xi: f64,
    /// `|φξ|`
    pub phi_xi: f64,
    /// `max |η(φX)|`
    pub eta_phi: f64,
    /// `max |φ²X + X − η(X)ξ|`
    pub phi_squared: f64,
    /// `max |Ḡ(φX,φY) − Ḡ(X,Y) + η(X)η(Y)|`
    pub metric_compatibility: f64,
    /// `max` over `|φ∂̄_a − δ̄_a|`, `|φδ̄_a + ∂̄_a|`, `|η(δ̄_a)|`, `|η(∂̄_a)|`
    pub frame_action: f64,
    /// every vector of the tangent frame is tangent to `IM`
    pub tangency: f64,
    pub pass: bool,
}

pub fn contact_identities<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<ContactIdentities> {
    let (q, _, geo) = local(m, p)?;
    let c = contact_structure(m, p)?;
    let n = geo.n;
    let xi = &c.xi.comps;
    let basis: Vec<&[f64]> = c.tangent_basis.iter().map(|v| v.comps.as_slice()).collect();
    let mut eta_phi: f64 = 0.0;
    let mut phi_squared: f64 = 0.0;
    let mut compat: f64 = 0.0;
    let mut tangency: f64 = 0.0;
    for x in &basis {
        let px = c.phi_of(x);
        eta_phi = eta_phi.max(c.eta_of(&px).abs());
        let ex = c.eta_of(x);
        let r: Vec<f64> = (0..2 * n)
            .map(|k| c.phi_of(&px)[k] + x[k] - ex * xi[k])
            .collect();
        phi_squared = phi_squared.max(max_abs(&r));
        tangency = tangency.max(crate::sasaki::df_along(m, &q, x).abs());
        for y in &basis {
            let py = c.phi_of(y);
            let r = geo.sasaki(&px, &py) - geo.sasaki(x, y) + ex * c.eta_of(y);
            compat = compat.max(r.abs());
        }
    }
    let mut frame_action: f64 = 0.0;
    for a in 0..n - 1 {
        let h = FrameField::HBar(a).components(&geo);
        let v = FrameField::VBar(a).components(&geo);
        frame_action = frame_action
            .max(max_abs(&sub_vec(&c.phi_of(&v), &h)))
            .max(max_abs(&add_vec(&c.phi_of(&h), &v)))
            .max(c.eta_of(&h).abs())
            .max(c.eta_of(&v).abs());
    }
    let eta_xi = (c.eta_of(xi) - 1.0).abs();
    let phi_xi = max_abs(&c.phi_of(xi));
    let pass = [
        eta_xi,
        phi_xi,
        eta_phi,
        phi_squared,
        compat,
        frame_action,
        tangency,
    ]
    .iter()
    .all(|v| *v < IDENTITY_TOL);
    Ok(ContactIdentities {
        eta_xi,
        phi_xi,
        eta_phi,
        phi_squared,
        metric_compatibility: compat,
        frame_action,
        tangency,
        pass,
    })
}

/// `(L_ξ G)(X,Z) = ξ(G(X,Z)) − G([ξ,X],Z) − G(X,[ξ,Z])`. For `X, Z`
/// tangent to `IM` this is `L_ξ Ḡ`, since `ξ` is tangent to `IM`.
pub fn lie_derivative_metric<M: FinslerFunction, X: VectorField, Z: VectorField>(
    m: &M,
    q: &[f64],
    pivot: usize,
    x: &X,
    z: &Z,
) -> Result<f64> {
    let geo = LocalGeometry::compute(m, q, pivot)?;
    let xi = FrameField::Xi.components(&geo);
    let gd = LocalGeometry::<Dual<f64>>::compute(m, &seed_along(q, &xi), pivot)?;
    let along = gd.sasaki(&x.eval(m, &gd)?, &z.eval(m, &gd)?).eps;
    let bx = lie_bracket(m, q, pivot, &FrameField::Xi, x)?;
    let bz = lie_bracket(m, q, pivot, &FrameField::Xi, z)?;
    Ok(along - geo.sasaki(&bx, &z.eval(m, &geo)?) - geo.sasaki(&x.eval(m, &geo)?, &bz))
}

/// `(L_ξ G)(X,Z)` for the vectors `x`, `z` by central differences of the
/// metric pulled back along the first-order flow of `ξ`. Uses only point
/// evaluations of `G` and `ξ`.
pub fn lie_derivative_metric_fd<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    x: &[f64],
    z: &[f64],
    h: f64,
) -> Result<f64> {
    check_dim(m, p)?;
    let q = p.coords();
    let pivot = pivot_index(p.y());
    let xi_at = |s: &[f64]| -> Result<Vec<f64>> {
        Ok(FrameField::Xi.components(&LocalGeometry::compute(m, s, pivot)?))
    };
    let shift =
        |v: &[f64], t: f64| -> Vec<f64> { q.iter().zip(v).map(|(a, b)| a + t * b).collect() };
    // Dξ·v by central differences
    let dxi = |v: &[f64]| -> Result<Vec<f64>> {
        let a = xi_at(&shift(v, h))?;
        let b = xi_at(&shift(v, -h))?;
        Ok(a.iter().zip(&b).map(|(u, w)| (u - w) / (2.0 * h)).collect())
    };
    let xi = xi_at(&q)?;
    let dx = dxi(x)?;
    let dz = dxi(z)?;
    let pulled = |t: f64| -> Result<f64> {
        let geo = LocalGeometry::compute(m, &shift(&xi, t), pivot)?;
        let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + t * b).collect();
        let zt: Vec<f64> = z.iter().zip(&dz).map(|(a, b)| a + t * b).collect();
        Ok(geo.sasaki(&xt, &zt))
    };
    Ok((pulled(h)? - pulled(-h)?) / (2.0 * h))
}

/// `∇̃_X Z = ∇̄_X Z − η(X)∇̄_Z ξ − η(Z)∇̄_X ξ + Ḡ(X, φZ)ξ + ½(L_ξḠ)(X,Z)ξ`
/// with `∇̄` the induced Levi-Civita connection of `Ḡ`.
pub fn tilde_nabla<M: FinslerFunction, X: VectorField, Z: VectorField>(
    m: &M,
    q: &[f64],
    pivot: usize,
    x: &X,
    z: &Z,
) -> Result<Vec<f64>> {
    let geo = LocalGeometry::compute(m, q, pivot)?;
    let xv = x.eval(m, &geo)?;
    let zv = z.eval(m, &geo)?;
    let xi = FrameField::Xi.components(&geo);
    let mut out = Induced.nabla(m, q, pivot, x, z)?;
    let ex = eta(&geo, &xv);
    let ez = eta(&geo, &zv);
    let nz = Induced.nabla(m, q, pivot, &ConstantField(zv.clone()), &FrameField::Xi)?;
    let nx = Induced.nabla(m, q, pivot, &ConstantField(xv.clone()), &FrameField::Xi)?;
    let c = geo.sasaki(&xv, &phi(&geo, &zv)) + 0.5 * lie_derivative_metric(m, q, pivot, x, z)?;
    for k in 0..out.len() {
        out[k] += -ex * nz[k] - ez * nx[k] + c * xi[k];
    }
    Ok(out)
}

/// `(∇̃_X φ)Y = ∇̃_X(φY) − φ(∇̃_X Y)`.
pub fn tilde_nabla_phi<M: FinslerFunction, X: VectorField, Y: VectorField>(
    m: &M,
    q: &[f64],
    pivot: usize,
    x: &X,
    y: &Y,
) -> Result<Vec<f64>> {
    let geo = LocalGeometry::compute(m, q, pivot)?;
    let a = tilde_nabla(m, q, pivot, x, &PhiField(y))?;
    let b = tilde_nabla(m, q, pivot, x, y)?;
    Ok(sub_vec(&a, &phi(&geo, &b)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObstructionEntry {
    pub x: String,
    pub y: String,
    /// `(∇̃_X φ)Y` in adapted coefficients `(δ̄.., ξ, ∂̄.., L)`
    pub coeffs: Vec<f64>,
    pub max_component: f64,
}

/// `(∇̃φ)` on `D × D`, plus the `ξ` row and column that the reduction to
/// `D` discards.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SasakianObstruction {
    pub metric: String,
    pub point: JetPoint,
    pub component_labels: Vec<String>,
    pub entries: Vec<ObstructionEntry>,
    /// max adapted component over `D × D`
    pub max_component: f64,
    /// pair and component realizing `max_component`
    pub flagged_pair: String,
    pub flagged_component: String,
    pub flagged_value: f64,
    /// `g_ab` at the flagged indices
    pub flagged_g_ab: f64,
    /// `flagged_value / flagged_g_ab`
    pub flagged_ratio: f64,
    pub lambda_min_g_ab: f64,
    /// `(∇̃_ξ φ)Y` and `(∇̃_X φ)ξ` for `X, Y` in the tangent frame
    pub xi_row: Vec<ObstructionEntry>,
    pub xi_column: Vec<ObstructionEntry>,
    pub xi_row_max: f64,
    pub xi_column_max: f64,
    /// `max |(∇̃_ξ φ)Y − (L_ξ φ)Y|` over the tangent frame
    pub xi_row_lie_residual: f64,
    pub pass: bool,
}

fn frame_index(f: FrameField) -> Option<usize> {
    match f {
        FrameField::HBar(a) | FrameField::VBar(a) => Some(a),
        _ => None,
    }
}

pub fn sasakian_obstruction<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
) -> Result<SasakianObstruction> {
    let (q, pivot, geo) = local(m, p)?;
    let n = geo.n;
    let g_ab = geo.g_ab();
    let labels: Vec<String> = FrameField::adapted(n).iter().map(|f| f.label()).collect();
    let entry = |x: FrameField, y: FrameField| -> Result<ObstructionEntry> {
        let r = tilde_nabla_phi(m, &q, pivot, &x, &y)?;
        let coeffs = geo.adapted_coeffs(&r)?;
        Ok(ObstructionEntry {
            x: x.label(),
            y: y.label(),
            max_component: max_abs(&coeffs),
            coeffs,
        })
    };
    let d = d_frame(n);
    let mut entries = Vec::new();
    let mut best = (0.0f64, String::new(), String::new(), 0.0, 0.0);
    for &x in &d {
        for &y in &d {
            let e = entry(x, y)?;
            for (k, c) in e.coeffs.iter().enumerate() {
                if c.abs() > best.0 || best.1.is_empty() {
                    // the g_ab paired with the flagged entry: a from X, b from Y
                    let gab = match (frame_index(x), frame_index(y)) {
                        (Some(a), Some(b)) => g_ab[(a, b)],
                        _ => f64::NAN,
                    };
                    best = (
                        c.abs(),
                        format!("{},{}", e.x, e.y),
                        labels[k].clone(),
                        *c,
                        gab,
                    );
                }
            }
            entries.push(e);
        }
    }
    let tf = tangent_frame(n);
    let xi_row: Vec<ObstructionEntry> = tf
        .iter()
        .map(|&y| entry(FrameField::Xi, y))
        .collect::<Result<_>>()?;
    let xi_column: Vec<ObstructionEntry> = tf
        .iter()
        .map(|&x| entry(x, FrameField::Xi))
        .collect::<Result<_>>()?;
    // ∇̃_ξ Y = [ξ, Y], so the ξ row is L_ξ φ
    let mut xi_row_lie_residual: f64 = 0.0;
    for &y in &tf {
        let r = tilde_nabla_phi(m, &q, pivot, &FrameField::Xi, &y)?;
        xi_row_lie_residual = xi_row_lie_residual.max(max_abs(&sub_vec(
            &r,
            &lie_derivative_phi(m, &q, pivot, &y)?,
        )));
    }
    let lambda = min_eigenvalue(&g_ab);
    let max_component = best.0;
    Ok(SasakianObstruction {
        metric: m.name(),
        point: p.clone(),
        component_labels: labels,
        xi_row_max: xi_row.iter().map(|e| e.max_component).fold(0.0, f64::max),
        xi_column_max: xi_column
            .iter()
            .map(|e| e.max_component)
            .fold(0.0, f64::max),
        entries,
        max_component,
        flagged_pair: best.1,
        flagged_component: best.2,
        flagged_value: best.3,
        flagged_g_ab: best.4,
        flagged_ratio: best.3 / best.4,
        lambda_min_g_ab: lambda,
        xi_row,
        xi_column,
        xi_row_lie_residual,
        pass: lambda > 0.0 && max_component >= lambda - OBSTRUCTION_MARGIN,
    })
}

/// `(L_ξ φ)Y = [ξ, φY] − φ[ξ, Y]`.
pub fn lie_derivative_phi<M: FinslerFunction, Y: VectorField>(
    m: &M,
    q: &[f64],
    pivot: usize,
    y: &Y,
) -> Result<Vec<f64>> {
    let geo = LocalGeometry::compute(m, q, pivot)?;
    let a = lie_bracket(m, q, pivot, &FrameField::Xi, &PhiField(y))?;
    let b = lie_bracket(m, q, pivot, &FrameField::Xi, y)?;
    Ok(sub_vec(&a, &phi(&geo, &b)))
}

/// `N_J(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]`.
pub fn nijenhuis<M: FinslerFunction, X: VectorField + Clone, Y: VectorField + Clone>(
    m: &M,
    p: &JetPoint,
    x: &X,
    y: &Y,
) -> Result<TangentVector> {
    check_dim(m, p)?;
    let q = p.coords();
    let pivot = pivot_index(p.y());
    let geo = LocalGeometry::compute(m, &q, pivot)?;
    let jx = JField(x.clone());
    let jy = JField(y.clone());
    let a = lie_bracket(m, &q, pivot, &jx, &jy)?;
    let b = geo.apply_j(&lie_bracket(m, &q, pivot, &jx, y)?);
    let c = geo.apply_j(&lie_bracket(m, &q, pivot, x, &jy)?);
    let d = lie_bracket(m, &q, pivot, x, y)?;
    Ok(TangentVector::new(sub_vec(
        &sub_vec(&sub_vec(&a, &b), &c),
        &d,
    )))
}

/// `N_J` on the natural basis against the curvature of the nonlinear
/// connection.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NijenhuisReport {
    pub metric: String,
    pub point: JetPoint,
    /// `max ‖N_J‖` over all pairs of `{δ/δx^i, ∂/∂y^i}`
    pub max_norm: f64,
    /// `max |R^k_ij|`
    pub curvature_norm: f64,
    /// `max |N_J(δ_i, ∂̇_j) + R^k_ij δ_k|`
    pub mixed_residual: f64,
    /// `max |N_J(δ_i, δ_j) + R^k_ij ∂̇_k|`
    pub hh_residual_minus: f64,
    /// `max |N_J(δ_i, δ_j) − R^k_ij ∂̇_k|`
    pub hh_residual_plus: f64,
    /// `max |N_J(∂̇_i, ∂̇_j) + N_J(δ_i, δ_j)|`
    pub vv_residual: f64,
}

pub fn nijenhuis_report<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<NijenhuisReport> {
    use FrameField::{Delta, DotY};
    check_dim(m, p)?;
    let n = p.dim();
    let sp = SprayData::compute(m, p)?;
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y()))?;
    let mut max_norm: f64 = 0.0;
    let mut mixed: f64 = 0.0;
    let mut minus: f64 = 0.0;
    let mut plus: f64 = 0.0;
    let mut vv: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let hv = nijenhuis(m, p, &Delta(i), &DotY(j))?.comps;
            let hh = nijenhuis(m, p, &Delta(i), &Delta(j))?.comps;
            let vvn = nijenhuis(m, p, &DotY(i), &DotY(j))?.comps;
            max_norm = max_norm
                .max(max_abs(&hv))
                .max(max_abs(&hh))
                .max(max_abs(&vvn));
            let r: Vec<f64> = (0..n).map(|k| sp.curvature(k, i, j)).collect();
            let r_delta = geo.horizontal_lift(&r);
            let mut r_dot = vec![0.0; 2 * n];
            r_dot[n..].copy_from_slice(&r);
            mixed = mixed.max(max_abs(&add_vec(&hv, &r_delta)));
            minus = minus.max(max_abs(&add_vec(&hh, &r_dot)));
            plus = plus.max(max_abs(&sub_vec(&hh, &r_dot)));
            vv = vv.max(max_abs(&add_vec(&vvn, &hh)));
        }
    }
    Ok(NijenhuisReport {
        metric: m.name(),
        point: p.clone(),
        max_norm,
        curvature_norm: sp.curvature_norm(),
        mixed_residual: mixed,
        hh_residual_minus: minus,
        hh_residual_plus: plus,
        vv_residual: vv,
    })
}

/// `J` is integrable exactly when the nonlinear connection is flat.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatnessEquivalence {
    pub metric: String,
    pub points: usize,
    pub max_nijenhuis: f64,
    /// where `max_nijenhuis` is attained
    pub witness: Option<JetPoint>,
    pub max_curvature: f64,
    pub integrable: bool,
    pub flat: bool,
    pub pass: bool,
}

pub fn flatness_equivalence_check<M: FinslerFunction>(
    m: &M,
    points: &[JetPoint],
) -> Result<FlatnessEquivalence> {
    let reports: Vec<NijenhuisReport> = points
        .par_iter()
        .map(|p| nijenhuis_report(m, p))
        .collect::<Result<_>>()?;
    let mut max_nijenhuis = 0.0;
    let mut witness = None;
    for (p, r) in points.iter().zip(&reports) {
        if witness.is_none() || r.max_norm > max_nijenhuis {
            max_nijenhuis = r.max_norm;
            witness = Some(p.clone());
        }
    }
    let max_curvature = reports.iter().map(|r| r.curvature_norm).fold(0.0, f64::max);
    let integrable = max_nijenhuis < FLAT_TOL;
    let flat = max_curvature < FLAT_TOL;
    Ok(FlatnessEquivalence {
        metric: m.name(),
        points: points.len(),
        max_nijenhuis,
        witness,
        max_curvature,
        integrable,
        flat,
        pass: points.len() >= FLATNESS_MIN_POINTS && integrable == flat,
    })
}

/// `J̄(X + fL) = φX − fξ + η(X)L` on `TM = IM × ℝ` against `J`, with the
/// `ℝ` direction read as `+L` and as `−L`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JbarComparison {
    pub samples: usize,
    /// `max |J̄(X + fL) − J(X + fL)|`
    pub residual_plus_l: f64,
    /// `max |J̄(X − fL) − J(X − fL)|` with `J̄(X + f∂_t) = φX − fξ + η(X)∂_t`, `∂_t = −L`
    pub residual_minus_l: f64,
}

pub fn jbar_comparison<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    samples: usize,
    seed: u64,
) -> Result<JbarComparison> {
    let (_, _, geo) = local(m, p)?;
    let n = geo.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = FrameField::Liouville.components(&geo);
    let xi = FrameField::Xi.components(&geo);
    let mut plus: f64 = 0.0;
    let mut minus: f64 = 0.0;
    for _ in 0..samples {
        let mut c: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        c[2 * n - 1] = 0.0;
        let x = geo.from_adapted(&c);
        let f: f64 = rng.random_range(-1.0..1.0);
        let ex = eta(&geo, &x);
        let px = phi(&geo, &x);
        // ∂_t = +L
        let jbar: Vec<f64> = (0..2 * n).map(|k| px[k] - f * xi[k] + ex * l[k]).collect();
        let v: Vec<f64> = (0..2 * n).map(|k| x[k] + f * l[k]).collect();
        plus = plus.max(max_abs(&sub_vec(&jbar, &geo.apply_j(&v))));
        // ∂_t = −L
        let jbar: Vec<f64> = (0..2 * n).map(|k| px[k] - f * xi[k] - ex * l[k]).collect();
        let v: Vec<f64> = (0..2 * n).map(|k| x[k] - f * l[k]).collect();
        minus = minus.max(max_abs(&sub_vec(&jbar, &geo.apply_j(&v))));
    }
    Ok(JbarComparison {
        samples,
        residual_plus_l: plus,
        residual_minus_l: minus,
    })
}

/// `dη(X,Y) = X(η(Y)) − Y(η(X)) − η([X,Y])` on `D` against `Ḡ(X, φY)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DEtaRatio {
    /// least-squares `c` in `dη(X,Y) = c Ḡ(X,φY)`
    pub constant: f64,
    /// `max |dη(X,Y) − c Ḡ(X,φY)|`
    pub residual: f64,
}

pub fn d_eta_ratio<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<DEtaRatio> {
    let (q, pivot, geo) = local(m, p)?;
    let n = geo.n;
    // η = θ_j dx^j with θ_j = g_ij y^i, so dη(X,Y) = X(θ)·Y^x − Y(θ)·X^x
    let theta_along = |v: &[f64]| -> Result<Vec<f64>> {
        let gd = LocalGeometry::<Dual<f64>>::compute(m, &seed_along(&q, v), pivot)?;
        let y = gd.y();
        Ok((0..n)
            .map(|j| {
                (0..n)
                    .map(|i| y[i] * gd.g[(i, j)])
                    .fold(Dual::zero(), |a, b| a + b)
                    .eps
            })
            .collect())
    };
    let d: Vec<Vec<f64>> = d_frame(n).iter().map(|f| f.components(&geo)).collect();
    let mut pairs = Vec::new();
    for x in &d {
        let tx = theta_along(x)?;
        for y in &d {
            let ty = theta_along(y)?;
            let de: f64 = (0..n).map(|j| tx[j] * y[j] - ty[j] * x[j]).sum();
            pairs.push((de, geo.sasaki(x, &phi(&geo, y))));
        }
    }
    let num: f64 = pairs.iter().map(|(a, b)| a * b).sum();
    let den: f64 = pairs.iter().map(|(_, b)| b * b).sum();
    let constant = num / den;
    let residual = pairs
        .iter()
        .map(|(a, b)| (a - constant * b).abs())
        .fold(0.0, f64::max);
    Ok(DEtaRatio { constant, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Metric;
    use crate::sampling::project_to_indicatrix;

    fn pt(x: &[f64], y: &[f64]) -> JetPoint {
        JetPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn on_im(m: &Metric, x: &[f64], y: &[f64]) -> JetPoint {
        project_to_indicatrix(m, &pt(x, y)).unwrap()
    }

    #[test]
    fn off_indicatrix_is_rejected() {
        let p = pt(&[0.0, 0.0], &[2.0, 0.0]);
        assert!(contact_structure(&Metric::euclidean(2), &p).is_err());
    }

    #[test]
    fn identities_hold_on_curved_metrics() {
        for m in [
            Metric::Riemannian2d,
            Metric::randers_var(3),
            Metric::randers_const(vec![0.2, -0.1]).unwrap(),
        ] {
            let y = [0.6, 0.8, -0.3];
            let p = on_im(&m, &vec![0.3; m.dim()], &y[..m.dim()]);
            let c = contact_identities(&m, &p).unwrap();
            assert!(c.pass, "{m:?} {c:?}");
        }
    }

    // Euclidean, n = 2, y = (1,0): ∂̄ = −y²∂/∂y¹ + y¹∂/∂y², δ̄ = J∂̄ and the
    // flat connection is the directional derivative. ∇_δ̄ of any frame field
    // vanishes, ∇_∂̄ ξ = δ̄, so (L_ξG)(δ̄,∂̄) = 1 and
    // (∇̃_δ̄ φ)δ̄ = ∇̃_δ̄(−∂̄) = (Ḡ(δ̄, −δ̄) − ½)ξ = −(3/2)ξ.
    #[test]
    fn euclidean_obstruction_is_three_halves_g11() {
        let p = pt(&[0.0, 0.0], &[1.0, 0.0]);
        let o = sasakian_obstruction(&Metric::euclidean(2), &p).unwrap();
        assert!(o.pass);
        assert_eq!(o.flagged_pair, "hbar1,hbar1");
        assert_eq!(o.flagged_component, "xi");
        assert!((o.flagged_value + 1.5).abs() < 1e-12, "{}", o.flagged_value);
        assert!((o.flagged_g_ab - 1.0).abs() < 1e-12);
        let mixed = o
            .entries
            .iter()
            .find(|e| e.x == "hbar1" && e.y == "vbar1")
            .unwrap();
        assert!(mixed.max_component < 1e-12);
    }

    #[test]
    fn obstruction_ratio_is_universal() {
        for m in [Metric::Riemannian2d, Metric::randers_var(3)] {
            let y = [0.6, 0.8, -0.3];
            let p = on_im(&m, &vec![0.3, -0.2, 0.1][..m.dim()], &y[..m.dim()]);
            let o = sasakian_obstruction(&m, &p).unwrap();
            assert!(o.pass);
            assert!(
                (o.flagged_ratio + 1.5).abs() < 1e-9,
                "{m:?} {}",
                o.flagged_ratio
            );
        }
    }

    #[test]
    fn xi_row_is_lie_derivative_of_phi() {
        let m = Metric::randers_var(2);
        let p = on_im(&m, &[0.1, 0.4], &[-0.7, 0.5]);
        let o = sasakian_obstruction(&m, &p).unwrap();
        assert!(o.xi_row_lie_residual < 1e-9, "{}", o.xi_row_lie_residual);
        assert!(o.xi_column_max < 1e-9);
        assert!(o.xi_row_max > 0.1);
    }

    #[test]
    fn lie_derivative_two_ways() {
        let m = Metric::euclidean(2);
        let p = pt(&[0.0, 0.0], &[1.0, 0.0]);
        let q = p.coords();
        let geo = LocalGeometry::compute(&m, &q, 0).unwrap();
        let h = FrameField::HBar(0).components(&geo);
        let v = FrameField::VBar(0).components(&geo);
        let jet =
            lie_derivative_metric(&m, &q, 0, &FrameField::VBar(0), &FrameField::VBar(0)).unwrap();
        let fd = lie_derivative_metric_fd(&m, &p, &v, &v, 1e-4).unwrap();
        assert!((jet - fd).abs() < 1e-7 && jet.abs() < 1e-12);
        let jet =
            lie_derivative_metric(&m, &q, 0, &FrameField::HBar(0), &FrameField::VBar(0)).unwrap();
        let fd = lie_derivative_metric_fd(&m, &p, &h, &v, 1e-4).unwrap();
        assert!((jet - 1.0).abs() < 1e-12 && (jet - fd).abs() < 1e-7);
        let m = Metric::randers_var(3);
        let p = on_im(&m, &[0.2, 0.1, -0.4], &[0.3, -0.9, 0.5]);
        let q = p.coords();
        let piv = pivot_index(p.y());
        let geo = LocalGeometry::compute(&m, &q, piv).unwrap();
        for (x, z) in [
            (FrameField::HBar(1), FrameField::VBar(0)),
            (FrameField::Xi, FrameField::HBar(0)),
        ] {
            let jet = lie_derivative_metric(&m, &q, piv, &x, &z).unwrap();
            let fd =
                lie_derivative_metric_fd(&m, &p, &x.components(&geo), &z.components(&geo), 1e-4)
                    .unwrap();
            assert!((jet - fd).abs() < 1e-7, "{jet} {fd}");
        }
    }

    #[test]
    fn d_eta_constant_is_minus_one() {
        for m in [Metric::euclidean(3), Metric::randers_var(2)] {
            let y = [0.6, 0.8, -0.3];
            let p = on_im(&m, &vec![0.3; m.dim()], &y[..m.dim()]);
            let r = d_eta_ratio(&m, &p).unwrap();
            assert!(
                (r.constant + 1.0).abs() < 1e-10 && r.residual < 1e-10,
                "{r:?}"
            );
        }
    }

    #[test]
    fn jbar_matches_j_with_reversed_liouville() {
        let m = Metric::randers_var(3);
        let p = on_im(&m, &[0.2, 0.1, -0.4], &[0.3, -0.9, 0.5]);
        let r = jbar_comparison(&m, &p, 20, 3).unwrap();
        assert!(r.residual_minus_l < 1e-10);
        assert!(r.residual_plus_l > 0.1);
    }

    #[test]
    fn nijenhuis_matches_curvature() {
        let m = Metric::Riemannian2d;
        let p = pt(&[0.3, -0.2], &[0.6, 0.8]);
        let r = nijenhuis_report(&m, &p).unwrap();
        assert!(r.curvature_norm > 0.1);
        assert!(
            r.mixed_residual < 1e-9 && r.hh_residual_minus < 1e-9 && r.vv_residual < 1e-9,
            "{r:?}"
        );
        let r = nijenhuis_report(&Metric::randers_const(vec![0.1, 0.0]).unwrap(), &p).unwrap();
        assert!(r.max_norm < 1e-10 && r.curvature_norm < 1e-10);
    }
}
