//! Deterministic point sampling on the slit tangent bundle and projection
//! onto the indicatrix bundle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dual::Dual;
use crate::error::{GeometryError, Result};
use crate::finsler::FinslerFunction;
use crate::jet::JetPoint;

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 25;
pub const RADIUS_RANGE: (f64, f64) = (0.5, 2.0);

/// `x` uniform in `[−1, 1]^n`, `y` uniform in direction with `|y|` uniform
/// in `[0.5, 2]`.
pub fn sample_points(n: usize, seed: u64, count: usize) -> Result<Vec<JetPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = rng.random_range(RADIUS_RANGE.0..=RADIUS_RANGE.1);
        if norm < 1e-6 {
            continue;
        }
        let y = dir.iter().map(|v| r * v / norm).collect();
        out.push(JetPoint::new(x, y)?);
    }
    Ok(out)
}

/// Rescales `y` so that `F(x, λy) = 1`, by Newton iteration in `λ`.
pub fn project_to_indicatrix<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<JetPoint> {
    let x: Vec<Dual<f64>> = p.x().iter().map(|&v| Dual::constant(v)).collect();
    let mut lambda = 1.0;
    for _ in 0..NEWTON_MAX_ITER {
        let l = Dual::variable(lambda);
        let y: Vec<Dual<f64>> = p.y().iter().map(|&v| l * Dual::constant(v)).collect();
        let f = m.eval(&x, &y);
        let defect = f.re - 1.0;
        if defect.abs() < NEWTON_TOL {
            return JetPoint::new(p.x().to_vec(), p.y().iter().map(|v| lambda * v).collect());
        }
        lambda -= defect / f.eps;
        if !(lambda.is_finite() && lambda > 0.0) {
            break;
        }
    }
    Err(GeometryError::NoConvergence(NEWTON_MAX_ITER))
}

pub fn sample_indicatrix<M: FinslerFunction>(
    m: &M,
    seed: u64,
    count: usize,
) -> Result<Vec<JetPoint>> {
    sample_points(m.dim(), seed, count)?
        .iter()
        .map(|p| project_to_indicatrix(m, p))
        .collect()
}
