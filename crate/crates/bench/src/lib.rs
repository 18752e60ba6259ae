//! Fixed inputs shared by the benchmarks.

use ftb_core::{project_to_indicatrix, sample_points, JetPoint, Metric};

/// The benchmark metrics, each with a point on its indicatrix.
pub fn fixtures() -> Vec<(Metric, JetPoint)> {
    [
        Metric::euclidean(3),
        Metric::Riemannian2d,
        Metric::randers_const(vec![0.3, -0.2]).unwrap(),
        Metric::randers_var(3),
    ]
    .into_iter()
    .map(|m| {
        let p = sample_points(ftb_core::FinslerFunction::dim(&m), 11, 1)
            .unwrap()
            .remove(0);
        let p = project_to_indicatrix(&m, &p).unwrap();
        (m, p)
    })
    .collect()
}
