//! The Levi-Civita connection of the Sasaki metric from the Koszul formula,
//! with the `2n` coordinate fields as test vectors.

use crate::dual::{eps_parts, real_parts, seed_coordinate, Dual, Scalar};
use crate::error::Result;
use crate::finsler::FinslerFunction;
use crate::frame::VectorField;
use crate::geometry::LocalGeometry;
use crate::linalg::{solve, sub_vec, Mat};

/// `∇_X Y` at `q`, natural components.
///
/// For each coordinate field `Z = ∂_A` the right-hand side
/// `X G(Y,Z) + Y G(X,Z) − Z G(X,Y) − G([X,Z],Y) − G([Y,Z],X) + G([X,Y],Z)`
/// is assembled from first jets of `G`, `X` and `Y`, then `2 G(∇_X Y, ·)` is
/// inverted.
pub fn koszul_nabla<T: Scalar, M: FinslerFunction, X: VectorField, Y: VectorField>(
    m: &M,
    q: &[T],
    pivot: usize,
    x: &X,
    y: &Y,
) -> Result<Vec<T>> {
    let dim = q.len();
    let mut gm = Mat::zeros(dim, dim);
    let mut xv = Vec::new();
    let mut yv = Vec::new();
    // dg[A] = ∂_A G, dx[A] = ∂_A X, dy[A] = ∂_A Y
    let mut dg = Vec::with_capacity(dim);
    let mut dx = Vec::with_capacity(dim);
    let mut dy = Vec::with_capacity(dim);
    for a in 0..dim {
        let geo = LocalGeometry::<Dual<T>>::compute(m, &seed_coordinate(q, a), pivot)?;
        let s = geo.sasaki_matrix();
        let xa = x.eval(m, &geo)?;
        let ya = y.eval(m, &geo)?;
        if a == 0 {
            gm = s.re();
            xv = real_parts(&xa);
            yv = real_parts(&ya);
        }
        dg.push(s.eps());
        dx.push(eps_parts(&xa));
        dy.push(eps_parts(&ya));
    }
    // directional derivatives of G and of the fields
    let along_mat = |v: &[T]| {
        let mut out = Mat::zeros(dim, dim);
        for (b, &vb) in v.iter().enumerate() {
            for r in 0..dim {
                for c in 0..dim {
                    out[(r, c)] += vb * dg[b][(r, c)];
                }
            }
        }
        out
    };
    let along_vec = |v: &[T], d: &[Vec<T>]| {
        let mut out = vec![T::zero(); dim];
        for (b, &vb) in v.iter().enumerate() {
            for c in 0..dim {
                out[c] += vb * d[b][c];
            }
        }
        out
    };
    let dg_x = along_mat(&xv);
    let dg_y = along_mat(&yv);
    let y_along_x = along_vec(&xv, &dy);
    let x_along_y = along_vec(&yv, &dx);
    let bracket_xy = sub_vec(&y_along_x, &x_along_y);
    let g = |u: &[T], w: &[T]| gm.bilinear(u, w);
    let unit = |a: usize| {
        let mut e = vec![T::zero(); dim];
        e[a] = T::one();
        e
    };
    let neg = |v: &[T]| v.iter().map(|&t| -t).collect::<Vec<T>>();
    let mut rhs = vec![T::zero(); dim];
    for a in 0..dim {
        let z = unit(a);
        // X G(Y, Z)
        let t1 = dg_x.bilinear(&yv, &z) + g(&y_along_x, &z);
        // Y G(X, Z)
        let t2 = dg_y.bilinear(&xv, &z) + g(&x_along_y, &z);
        // Z G(X, Y)
        let t3 = dg[a].bilinear(&xv, &yv) + g(&dx[a], &yv) + g(&xv, &dy[a]);
        // [X, Z] = −∂_A X since Z has constant components
        let t4 = g(&neg(&dx[a]), &yv);
        let t5 = g(&neg(&dy[a]), &xv);
        let t6 = g(&bracket_xy, &z);
        rhs[a] = (t1 + t2 - t3 - t4 - t5 + t6).scale(0.5);
    }
    solve(&gm, &rhs)
}

/// A torsion-free connection on `TM` evaluable over any scalar type.
pub trait Connection: Copy + Sync {
    fn nabla<T: Scalar, M: FinslerFunction, X: VectorField, Y: VectorField>(
        &self,
        m: &M,
        q: &[T],
        pivot: usize,
        x: &X,
        y: &Y,
    ) -> Result<Vec<T>>;
}

/// The Levi-Civita connection of the Sasaki metric.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeviCivita;

impl Connection for LeviCivita {
    fn nabla<T: Scalar, M: FinslerFunction, X: VectorField, Y: VectorField>(
        &self,
        m: &M,
        q: &[T],
        pivot: usize,
        x: &X,
        y: &Y,
    ) -> Result<Vec<T>> {
        koszul_nabla(m, q, pivot, x, y)
    }
}

/// The connection induced on the level sets of `F`: the Levi-Civita result
/// with its `L` component removed. `L` is `G`-normal to every level set, so
/// for tangent fields this is the Gauss-formula projection.
#[derive(Clone, Copy, Debug, Default)]
pub struct Induced;

impl Connection for Induced {
    fn nabla<T: Scalar, M: FinslerFunction, X: VectorField, Y: VectorField>(
        &self,
        m: &M,
        q: &[T],
        pivot: usize,
        x: &X,
        y: &Y,
    ) -> Result<Vec<T>> {
        let v = koszul_nabla(m, q, pivot, x, y)?;
        let geo = LocalGeometry::compute(m, q, pivot)?;
        let l = geo.vertical_lift(geo.y());
        let c = geo.sasaki(&v, &l) / geo.sasaki(&l, &l);
        Ok(v.iter().zip(&l).map(|(&a, &b)| a - c * b).collect())
    }
}

/// The field `q ↦ ∇_X Y (q)`.
#[derive(Clone, Copy, Debug)]
pub struct Covariant<C, X, Y> {
    pub conn: C,
    pub x: X,
    pub y: Y,
}

impl<C: Connection, X: VectorField, Y: VectorField> VectorField for Covariant<C, X, Y> {
    fn eval<T: Scalar, M: FinslerFunction>(&self, m: &M, geo: &LocalGeometry<T>) -> Result<Vec<T>> {
        self.conn.nabla(m, &geo.q, geo.pivot, &self.x, &self.y)
    }
}
