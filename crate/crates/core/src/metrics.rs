//! Built-in Finsler metrics.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::{GeometryError, Result};
use crate::finsler::FinslerFunction;
use crate::jet::ScalarField;

/// Base value of the first component of `b` for `randers_var`.
pub const RANDERS_VAR_BASE: f64 = 0.1;
/// Slope of the first component of `b` along `x²` for `randers_var`.
pub const RANDERS_VAR_SLOPE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Metric {
    /// `F = |y|`.
    Euclidean { n: usize },
    /// `F² = (y¹)² + e^{2x¹}(y²)²`, a hyperbolic-plane metric.
    Riemannian2d,
    /// `F = |y| + b·y` with constant `b`, `|b| < 1`.
    RandersConst { b: Vec<f64> },
    /// `F = |y| + b(x)·y` with `b = (base + slope·x², 0, …)`.
    RandersVar { n: usize, base: f64, slope: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricInfo {
    pub name: &'static str,
    pub dims: &'static str,
    pub params: &'static str,
    pub description: &'static str,
}

pub const METRIC_NAMES: [&str; 4] = ["euclidean", "riemannian2d", "randers_const", "randers_var"];

impl Metric {
    pub fn euclidean(n: usize) -> Metric {
        Metric::Euclidean { n }
    }

    pub fn randers_const(b: Vec<f64>) -> Result<Metric> {
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if b.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(b.len()));
        }
        if !(norm < 1.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "|b| = {norm} must be < 1"
            )));
        }
        Ok(Metric::RandersConst { b })
    }

    pub fn randers_var(n: usize) -> Metric {
        Metric::RandersVar {
            n,
            base: RANDERS_VAR_BASE,
            slope: RANDERS_VAR_SLOPE,
        }
    }

    /// Resolves a registry name with optional dimension and `b` override.
    pub fn from_name(name: &str, dim: Option<usize>, b: Option<Vec<f64>>) -> Result<Metric> {
        let n = dim.unwrap_or(2);
        if n < 2 {
            return Err(GeometryError::DimensionTooSmall(n));
        }
        match name {
            "euclidean" => Ok(Metric::euclidean(n)),
            "riemannian2d" => {
                if n != 2 {
                    return Err(GeometryError::InvalidParameter(
                        "riemannian2d requires n = 2".into(),
                    ));
                }
                Ok(Metric::Riemannian2d)
            }
            "randers_const" => {
                let b = b.unwrap_or_else(|| {
                    let mut b = vec![0.0; n];
                    b[0] = 0.1;
                    b
                });
                if b.len() != n {
                    return Err(GeometryError::DimensionMismatch {
                        expected: n,
                        got: b.len(),
                    });
                }
                Metric::randers_const(b)
            }
            "randers_var" => Ok(Metric::randers_var(n)),
            other => Err(GeometryError::UnknownMetric(other.to_string())),
        }
    }

    pub fn registry() -> Vec<MetricInfo> {
        vec![
            MetricInfo {
                name: "euclidean",
                dims: "n >= 2",
                params: "",
                description: "F = |y|; flat, zero spray",
            },
            MetricInfo {
                name: "riemannian2d",
                dims: "n = 2",
                params: "",
                description: "g(x) = diag(1, exp(2 x1)); curvature -1, zero Cartan tensor",
            },
            MetricInfo {
                name: "randers_const",
                dims: "n >= 2",
                params: "b (default 0.1 e1), |b| < 1",
                description: "F = |y| + b.y; nonzero Cartan tensor, zero spray",
            },
            MetricInfo {
                name: "randers_var",
                dims: "n >= 2",
                params: "",
                description: "F = |y| + (0.1 + 0.05 x2) y1; every tensor nonzero",
            },
        ]
    }

    /// Whether `F²` is quadratic in `y`.
    pub fn is_riemannian(&self) -> bool {
        matches!(self, Metric::Euclidean { .. } | Metric::Riemannian2d)
    }
}

fn euclid_norm<T: Scalar>(y: &[T]) -> T {
    let mut s = T::zero();
    for &v in y {
        s += v * v;
    }
    s.sqrt()
}

impl ScalarField for Metric {
    fn eval<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        match self {
            Metric::Euclidean { .. } => euclid_norm(y),
            Metric::Riemannian2d => (y[0] * y[0] + (x[0].scale(2.0)).exp() * y[1] * y[1]).sqrt(),
            Metric::RandersConst { b } => {
                let mut beta = T::zero();
                for (bi, &yi) in b.iter().zip(y) {
                    beta += yi.scale(*bi);
                }
                euclid_norm(y) + beta
            }
            Metric::RandersVar { base, slope, .. } => {
                let b1 = T::from_f64(*base) + x[1].scale(*slope);
                euclid_norm(y) + b1 * y[0]
            }
        }
    }
}

impl FinslerFunction for Metric {
    fn dim(&self) -> usize {
        match self {
            Metric::Euclidean { n } | Metric::RandersVar { n, .. } => *n,
            Metric::Riemannian2d => 2,
            Metric::RandersConst { b } => b.len(),
        }
    }

    fn name(&self) -> String {
        match self {
            Metric::Euclidean { .. } => "euclidean",
            Metric::Riemannian2d => "riemannian2d",
            Metric::RandersConst { .. } => "randers_const",
            Metric::RandersVar { .. } => "randers_var",
        }
        .to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_names() {
        for name in METRIC_NAMES {
            let m = Metric::from_name(name, Some(2), None).unwrap();
            assert_eq!(m.name(), name);
            assert_eq!(m.dim(), 2);
        }
        assert_eq!(
            Metric::from_name("randers_var", Some(3), None)
                .unwrap()
                .dim(),
            3
        );
        assert!(matches!(
            Metric::from_name("kropina", None, None),
            Err(GeometryError::UnknownMetric(_))
        ));
        assert!(Metric::from_name("riemannian2d", Some(3), None).is_err());
        assert!(Metric::randers_const(vec![0.9, 0.9]).is_err());
    }

    #[test]
    fn randers_value() {
        let m = Metric::randers_const(vec![0.1, 0.0]).unwrap();
        assert!((m.eval(&[0.0, 0.0], &[1.0, 0.0]) - 1.1).abs() < 1e-15);
        let v = Metric::randers_var(2);
        assert!((v.eval(&[0.0, 1.0], &[1.0, 0.0]) - 1.15).abs() < 1e-15);
    }
}
