//! Mixed partial derivatives of scalar fields on the slit tangent bundle.
//!
//! [`partial`] evaluates exact partials through nested dual numbers;
//! [`fd_oracle`] is an independent finite-difference cross-check.

use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Scalar};
use crate::error::{GeometryError, Result};

/// Smallest admissible Euclidean length of the fiber coordinate.
pub const MIN_FIBER_NORM: f64 = 1e-8;

/// A chart point `(x, y)` of `TM` with `y ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetPoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl JetPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(x.len()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < MIN_FIBER_NORM {
            return Err(GeometryError::SlitBundle {
                norm,
                min: MIN_FIBER_NORM,
            });
        }
        Ok(JetPoint { x, y })
    }

    /// Splits a `2n` coordinate vector `(x, y)`.
    pub fn from_coords(q: &[f64]) -> Result<Self> {
        let n = q.len() / 2;
        JetPoint::new(q[..n].to_vec(), q[n..2 * n].to_vec())
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// `(x¹..xⁿ, y¹..yⁿ)`.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }
}

/// A scalar function of `(x, y)` that can be evaluated over any [`Scalar`].
pub trait ScalarField: Sync {
    fn eval<T: Scalar>(&self, x: &[T], y: &[T]) -> T;

    fn eval_coords<T: Scalar>(&self, q: &[T]) -> T {
        let n = q.len() / 2;
        self.eval(&q[..n], &q[n..])
    }
}

impl<S: ScalarField> ScalarField for &S {
    fn eval<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        (**self).eval(x, y)
    }
}

/// One differentiation slot: `∂/∂x^i` or `∂/∂y^i` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    X(usize),
    Y(usize),
}

impl Slot {
    /// Position in the `2n` coordinate vector.
    pub fn coord(self, n: usize) -> usize {
        match self {
            Slot::X(i) => i,
            Slot::Y(i) => n + i,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        let i = match self {
            Slot::X(i) | Slot::Y(i) => i,
        };
        if i >= n {
            return Err(GeometryError::IndexOutOfRange { index: i, len: n });
        }
        Ok(())
    }
}

fn seeded<T: Scalar>(q: &[T], k: usize) -> Vec<Dual<T>> {
    crate::dual::seed_coordinate(q, k)
}

/// Exact mixed partial of total order ≤ 3.
pub fn partial<F: ScalarField>(f: &F, p: &JetPoint, idx: &[Slot]) -> Result<f64> {
    let n = p.dim();
    for s in idx {
        s.check(n)?;
    }
    let q = p.coords();
    let c: Vec<usize> = idx.iter().map(|s| s.coord(n)).collect();
    let v = match c.as_slice() {
        [] => f.eval_coords(&q),
        [a] => f.eval_coords(&seeded(&q, *a)).eps,
        [a, b] => f.eval_coords(&seeded(&seeded(&q, *b), *a)).eps.eps,
        [a, b, d] => {
            f.eval_coords(&seeded(&seeded(&seeded(&q, *d), *b), *a))
                .eps
                .eps
                .eps
        }
        _ => return Err(GeometryError::UnsupportedOrder(idx.len())),
    };
    Ok(v)
}

/// Step control for [`fd_oracle`].
#[derive(Clone, Copy, Debug)]
pub struct FdOptions {
    /// Base step per differentiation level, indexed by total order − 1.
    pub steps: [f64; 3],
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            steps: [1e-3, 2e-3, 6e-3],
        }
    }
}

/// Central differences with one Richardson extrapolation per level.
pub fn fd_oracle<F: ScalarField>(f: &F, p: &JetPoint, idx: &[Slot]) -> Result<f64> {
    fd_oracle_with(f, p, idx, FdOptions::default())
}

pub fn fd_oracle_with<F: ScalarField>(
    f: &F,
    p: &JetPoint,
    idx: &[Slot],
    opts: FdOptions,
) -> Result<f64> {
    let n = p.dim();
    if idx.len() > 3 {
        return Err(GeometryError::UnsupportedOrder(idx.len()));
    }
    for s in idx {
        s.check(n)?;
    }
    if idx.is_empty() {
        return Ok(f.eval_coords(&p.coords()));
    }
    let h = opts.steps[idx.len() - 1];
    let coords: Vec<usize> = idx.iter().map(|s| s.coord(n)).collect();
    let mut q = p.coords();
    fd_level(f, &mut q, &coords, h)
}

fn fd_level<F: ScalarField>(f: &F, q: &mut [f64], coords: &[usize], h: f64) -> Result<f64> {
    let Some((&k, rest)) = coords.split_first() else {
        return Ok(f.eval_coords(q));
    };
    let base = q[k];
    let mut central = |step: f64| -> Result<f64> {
        if base + step == base || base - step == base {
            return Err(GeometryError::OracleUnstable { step, coord: base });
        }
        q[k] = base + step;
        let plus = fd_level(f, q, rest, h);
        q[k] = base - step;
        let minus = fd_level(f, q, rest, h);
        q[k] = base;
        Ok((plus? - minus?) / (2.0 * step))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Cubic;
    impl ScalarField for Cubic {
        fn eval<T: Scalar>(&self, _x: &[T], y: &[T]) -> T {
            y[0] * y[0] * y[0]
        }
    }

    struct Bilinear;
    impl ScalarField for Bilinear {
        fn eval<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
            x[0] * y[1]
        }
    }

    struct SinY;
    impl ScalarField for SinY {
        fn eval<T: Scalar>(&self, _x: &[T], y: &[T]) -> T {
            y[0].sin()
        }
    }

    fn pt(x: [f64; 2], y: [f64; 2]) -> JetPoint {
        JetPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn cubic_third_partial() {
        let p = pt([0.3, -0.2], [1.7, 0.4]);
        let v = partial(&Cubic, &p, &[Slot::Y(0); 3]).unwrap();
        assert_eq!(v, 6.0);
    }

    #[test]
    fn bilinear_mixed_partial() {
        let p = pt([0.3, -0.2], [1.7, 0.4]);
        assert_eq!(
            partial(&Bilinear, &p, &[Slot::X(0), Slot::Y(1)]).unwrap(),
            1.0
        );
        assert_eq!(
            partial(&Bilinear, &p, &[Slot::Y(1), Slot::X(0)]).unwrap(),
            1.0
        );
        assert_eq!(partial(&Bilinear, &p, &[Slot::X(1)]).unwrap(), 0.0);
    }

    #[test]
    fn order_four_is_rejected() {
        let p = pt([0.0, 0.0], [1.0, 0.0]);
        assert_eq!(
            partial(&Cubic, &p, &[Slot::Y(0); 4]),
            Err(GeometryError::UnsupportedOrder(4))
        );
        assert_eq!(
            fd_oracle(&Cubic, &p, &[Slot::Y(0); 4]),
            Err(GeometryError::UnsupportedOrder(4))
        );
    }

    #[test]
    fn zero_fiber_is_rejected() {
        let err = JetPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap_err();
        assert!(matches!(err, GeometryError::SlitBundle { .. }));
        assert!(JetPoint::new(vec![0.0], vec![1.0]).is_err());
        assert!(JetPoint::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn out_of_range_slot() {
        let p = pt([0.0, 0.0], [1.0, 0.0]);
        assert!(matches!(
            partial(&Cubic, &p, &[Slot::Y(2)]),
            Err(GeometryError::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn fd_sine_derivative() {
        let p = pt([0.0, 0.0], [0.0, 1.0]);
        let v = fd_oracle(&SinY, &p, &[Slot::Y(0)]).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn fd_step_underflow() {
        let p = pt([1e30, 0.0], [1.0, 0.0]);
        let err = fd_oracle(&Bilinear, &p, &[Slot::X(0)]).unwrap_err();
        assert!(matches!(err, GeometryError::OracleUnstable { .. }));
    }
}
