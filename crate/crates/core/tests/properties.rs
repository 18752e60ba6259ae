use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use ftb_core::contact::{contact_identities, nijenhuis_report, phi};
use ftb_core::foliation::{bundle_like_defect, foliation_point, orthogonality_defect};
use ftb_core::frame::lie_bracket;
use ftb_core::geometry::{pivot_index, LocalGeometry};
use ftb_core::sasaki::koszul_self_check;
use ftb_core::{
    partial, project_to_indicatrix, sample_points, FinslerFunction, Foliation, FrameField,
    JetPoint, Metric, ScalarField, Slot,
};

fn metrics() -> Vec<Metric> {
    vec![
        Metric::euclidean(2),
        Metric::euclidean(3),
        Metric::Riemannian2d,
        Metric::randers_const(vec![0.3, -0.2]).unwrap(),
        Metric::randers_var(2),
        Metric::randers_var(3),
    ]
}

/// A metric from the registry and a point of its slit tangent bundle with
/// `|y| ∈ [0.5, 2]`.
fn metric_and_point() -> impl Strategy<Value = (Metric, JetPoint)> {
    (
        0..metrics().len(),
        prop::collection::vec(-1.0f64..1.0, 3),
        prop::collection::vec(-1.0f64..1.0, 3),
        0.5f64..2.0,
    )
        .prop_filter_map("y too short", |(k, x, y, r)| {
            let m = metrics().swap_remove(k);
            let n = m.dim();
            let norm = y[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 0.1 {
                return None;
            }
            let y: Vec<f64> = y[..n].iter().map(|v| v * r / norm).collect();
            Some((m, JetPoint::new(x[..n].to_vec(), y).ok()?))
        })
}

fn on_indicatrix() -> impl Strategy<Value = (Metric, JetPoint)> {
    metric_and_point().prop_map(|(m, p)| {
        let p = project_to_indicatrix(&m, &p).unwrap();
        (m, p)
    })
}

fn geo(m: &Metric, p: &JetPoint) -> LocalGeometry<f64> {
    LocalGeometry::compute(m, &p.coords(), pivot_index(p.y())).unwrap()
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn j_squares_to_minus_identity((m, p) in metric_and_point(), v in vector(3)) {
        let g = geo(&m, &p);
        let v = &v[..2 * g.n];
        let jj = g.apply_j(&g.apply_j(v));
        for (a, b) in jj.iter().zip(v) {
            assert_abs_diff_eq!(*a, -b, epsilon = 1e-12);
        }
    }

    #[test]
    fn j_is_an_isometry((m, p) in metric_and_point(), v in vector(3), w in vector(3)) {
        let g = geo(&m, &p);
        let (v, w) = (&v[..2 * g.n], &w[..2 * g.n]);
        let lhs = g.sasaki(&g.apply_j(v), &g.apply_j(w));
        assert_abs_diff_eq!(lhs, g.sasaki(v, w), epsilon = 1e-11 * (1.0 + g.sasaki(v, v).abs() + g.sasaki(w, w).abs()));
    }

    #[test]
    fn adapted_coefficients_round_trip((m, p) in metric_and_point(), v in vector(3)) {
        let g = geo(&m, &p);
        let v = &v[..2 * g.n];
        let back = g.from_adapted(&g.adapted_coeffs(v).unwrap());
        for (a, b) in back.iter().zip(v) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn mixed_partials_commute((m, p) in metric_and_point(), a in 0usize..6, b in 0usize..6, c in 0usize..6) {
        let n = m.dim();
        let slot = |k: usize| if k.is_multiple_of(2) { Slot::X((k / 2) % n) } else { Slot::Y((k / 2) % n) };
        let (a, b, c) = (slot(a), slot(b), slot(c));
        let abc = partial(&m, &p, &[a, b, c]).unwrap();
        for perm in [[b, a, c], [c, b, a], [a, c, b]] {
            let v = partial(&m, &p, &perm).unwrap();
            assert_abs_diff_eq!(v, abc, epsilon = 1e-9 * (1.0 + abc.abs()));
        }
    }

    #[test]
    fn f_is_positively_homogeneous((m, p) in metric_and_point(), lambda in 0.1f64..5.0) {
        let f = m.eval(p.x(), p.y());
        let y: Vec<f64> = p.y().iter().map(|v| lambda * v).collect();
        assert_abs_diff_eq!(m.eval(p.x(), &y), lambda * f, epsilon = 1e-12 * (1.0 + lambda * f));
    }

    #[test]
    fn bracket_is_antisymmetric_and_linear((m, p) in metric_and_point(), i in 0usize..4, j in 0usize..4) {
        let n = m.dim();
        let frame = FrameField::adapted(n);
        let (x, y) = (frame[i % frame.len()], frame[j % frame.len()]);
        let q = p.coords();
        let piv = pivot_index(p.y());
        let xy = lie_bracket(&m, &q, piv, &x, &y).unwrap();
        let yx = lie_bracket(&m, &q, piv, &y, &x).unwrap();
        let scaled = lie_bracket(&m, &q, piv, &x, &ftb_core::frame::Scaled(2.5, y)).unwrap();
        for k in 0..2 * n {
            assert_abs_diff_eq!(xy[k], -yx[k], epsilon = 1e-10);
            assert_abs_diff_eq!(scaled[k], 2.5 * xy[k], epsilon = 1e-10);
        }
    }

    #[test]
    fn oracle_is_levi_civita((m, p) in metric_and_point()) {
        let c = koszul_self_check(&m, &p).unwrap();
        prop_assert!(c.torsion < 1e-8 && c.compatibility < 1e-8, "{c:?}");
    }

    #[test]
    fn foliation_complements_are_orthogonal((m, p) in metric_and_point()) {
        for fol in Foliation::ALL {
            prop_assert!(orthogonality_defect(&m, &p, fol).unwrap() < 1e-9);
        }
    }

    #[test]
    fn vperp_is_bundle_like((m, p) in metric_and_point()) {
        let d = bundle_like_defect(&m, &p, Foliation::VperpTm).unwrap();
        prop_assert!(d.value < 1e-8, "{d:?}");
    }

    #[test]
    fn vprime_defect_is_the_cartan_witness((m, p) in on_indicatrix()) {
        let f = foliation_point(&m, &p).unwrap();
        prop_assert!((f.vprime_bundle_like.value - f.two_max_g_abc).abs() < 1e-8 * f.two_max_g_abc.max(1.0), "{f:?}");
        if m.is_riemannian() {
            prop_assert!(f.max_cartan < 1e-10);
        }
    }

    #[test]
    fn contact_identities_hold((m, p) in on_indicatrix()) {
        let c = contact_identities(&m, &p).unwrap();
        prop_assert!(c.pass, "{c:?}");
    }

    #[test]
    fn phi_is_tangent_to_level_sets((m, p) in metric_and_point(), v in vector(3)) {
        let g = geo(&m, &p);
        let v = &v[..2 * g.n];
        let l = FrameField::Liouville.components(&g);
        assert_abs_diff_eq!(g.sasaki(&phi(&g, v), &l), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn nijenhuis_is_the_curvature((m, p) in metric_and_point()) {
        let r = nijenhuis_report(&m, &p).unwrap();
        prop_assert!(r.mixed_residual < 1e-9 && r.hh_residual_minus < 1e-9 && r.vv_residual < 1e-9, "{r:?}");
    }
}

#[test]
fn sampling_is_deterministic() {
    let a = sample_points(3, 42, 10).unwrap();
    let b = sample_points(3, 42, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_points(3, 43, 10).unwrap());
    for p in &a {
        assert!(p.x().iter().all(|v| (-1.0..=1.0).contains(v)));
        let r = p.y().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((0.5..=2.0).contains(&r));
    }
}

#[test]
fn projection_lands_on_the_indicatrix() {
    for m in metrics() {
        for p in sample_points(m.dim(), 5, 10).unwrap() {
            let q = project_to_indicatrix(&m, &p).unwrap();
            assert!((m.eval_coords(&q.coords()) - 1.0).abs() < 1e-12);
            assert_eq!(q.x(), p.x());
        }
    }
}
