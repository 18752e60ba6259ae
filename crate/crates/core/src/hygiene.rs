//! Engine self-checks: exact jets against the finite-difference oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::Result;
use crate::finsler::FinslerFunction;
use crate::jet::{fd_oracle, partial, JetPoint, ScalarField, Slot};
use crate::metrics::Metric;
use crate::sampling::sample_points;

/// `F²` of a metric.
#[derive(Clone, Debug)]
pub struct Squared<'a>(pub &'a Metric);

impl ScalarField for Squared<'_> {
    fn eval<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        let f = self.0.eval(x, y);
        f * f
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FdProbe {
    /// e.g. `randers_var(3).F^2`
    pub field: String,
    pub point: JetPoint,
    pub index: Vec<Slot>,
    pub jet: f64,
    pub fd: f64,
    /// `|jet − fd| / max(|jet|, |fd|, 1)`
    pub agreement: f64,
}

/// `count` random probes of `F` and `F²` over the registry, with
/// derivative orders 1 to 3.
pub fn fd_probes(seed: u64, count: usize) -> Result<Vec<FdProbe>> {
    let metrics = [
        Metric::euclidean(2),
        Metric::euclidean(3),
        Metric::Riemannian2d,
        Metric::randers_const(vec![0.1, 0.0])?,
        Metric::randers_const(vec![0.1, -0.2, 0.05])?,
        Metric::randers_var(2),
        Metric::randers_var(3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let m = &metrics[rng.random_range(0..metrics.len())];
        let n = m.dim();
        let p = sample_points(n, seed.wrapping_add(k as u64), 1)?.remove(0);
        let order = rng.random_range(1..=3);
        let index: Vec<Slot> = (0..order)
            .map(|_| {
                let i = rng.random_range(0..n);
                if rng.random_bool(0.5) {
                    Slot::X(i)
                } else {
                    Slot::Y(i)
                }
            })
            .collect();
        let squared = rng.random_bool(0.5);
        let (jet, fd) = if squared {
            (
                partial(&Squared(m), &p, &index)?,
                fd_oracle(&Squared(m), &p, &index)?,
            )
        } else {
            (partial(m, &p, &index)?, fd_oracle(m, &p, &index)?)
        };
        let agreement = (jet - fd).abs() / jet.abs().max(fd.abs()).max(1.0);
        let field = format!("{}({n}).{}", m.name(), if squared { "F^2" } else { "F" });
        out.push(FdProbe {
            field,
            point: p,
            index,
            jet,
            fd,
            agreement,
        });
    }
    Ok(out)
}
