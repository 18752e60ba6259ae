//! End-to-end acceptance: ten criteria at their stated tolerances, one
//! PASS/FAIL line each. Runs without the libtest harness so the lines are
//! always printed.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::Instant;

use ftb_core::contact::{contact_identities, flatness_equivalence_check, nijenhuis_report};
use ftb_core::foliation::{bundle_like_defect, foliation_point};
use ftb_core::frame::verify_bracket_table;
use ftb_core::geometry::{pivot_index, LocalGeometry};
use ftb_core::hygiene::fd_probes;
use ftb_core::sasaki::{equal_combination_count, koszul_self_check};
use ftb_core::suite::ConnectionSuite;
use ftb_core::{
    cartan_lowered, connection_table, run_suite, sample_indicatrix, sample_points,
    sasakian_obstruction, FinslerFunction, Foliation, JetPoint, Metric, SuiteKind, SuiteOptions,
    SuiteReport,
};

mod common;

const SEED: u64 = 20_240_601;

fn registry() -> Vec<Metric> {
    vec![
        Metric::euclidean(2),
        Metric::euclidean(3),
        Metric::Riemannian2d,
        Metric::randers_const(vec![0.1, 0.0]).unwrap(),
        Metric::randers_const(vec![0.2, -0.1, 0.15]).unwrap(),
        Metric::randers_var(2),
        Metric::randers_var(3),
    ]
}

fn label(m: &Metric) -> String {
    format!("{}(n={})", m.name(), m.dim())
}

fn points(m: &Metric, count: usize) -> Vec<JetPoint> {
    sample_points(m.dim(), SEED, count).unwrap()
}

fn indicatrix(m: &Metric, count: usize) -> Vec<JetPoint> {
    sample_indicatrix(m, SEED, count).unwrap()
}

fn verdict(r: &SuiteReport, id: &str) -> Result<(), String> {
    let v = r
        .verdicts()
        .iter()
        .find(|v| v.id == id)
        .ok_or(format!("no verdict {id}"))?;
    if v.pass {
        Ok(())
    } else {
        Err(format!("{id} [{}] failed: {}", v.metric, v.detail))
    }
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn koszul_self_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in registry() {
        for p in points(&m, 20) {
            let c = koszul_self_check(&m, &p).map_err(|e| e.to_string())?;
            let r = c.torsion.max(c.compatibility);
            if !(r < 1e-8) {
                return Err(format!(
                    "{} torsion {:e} compatibility {:e} at {p:?}",
                    label(&m),
                    c.torsion,
                    c.compatibility
                ));
            }
            worst = worst.max(r);
        }
    }
    Ok(format!("max residual {worst:e} over 7 metrics x 20 points"))
}

fn connection_adjudication() -> Outcome {
    let opts = SuiteOptions {
        seed: SEED,
        ..SuiteOptions::default()
    };
    let mut recorded = 0;
    for m in [
        Metric::euclidean(2),
        Metric::euclidean(3),
        Metric::Riemannian2d,
    ] {
        let pts = points(&m, 20);
        let r = run_suite(SuiteKind::Connection, &m, &pts, &opts).map_err(|e| e.to_string())?;
        verdict(&r, "connection_table")?;
        verdict(&r, "connection_core_stanzas")?;
        let SuiteReport::Connection(ConnectionSuite { tables, .. }) = &r else {
            unreachable!()
        };
        for p in &pts {
            let t = connection_table(&m, p).map_err(|e| e.to_string())?;
            // every unmatched stanza must carry a discrepancy record
            for s in t.stanzas.iter().filter(|s| !s.matched) {
                if !t.discrepancies.iter().any(|d| d.stanza == s.stanza) {
                    return Err(format!(
                        "{} stanza {} mismatched silently at {p:?}",
                        label(&m),
                        s.stanza
                    ));
                }
            }
            if !(t.xi_xi < 1e-8 && t.l_l < 1e-8 && t.vbar_vbar_normal < 1e-8) {
                return Err(format!(
                    "{} unambiguous stanza off: xi_xi {:e}, l_l {:e}, vbar_vbar {:e}",
                    label(&m),
                    t.xi_xi,
                    t.l_l,
                    t.vbar_vbar_normal
                ));
            }
        }
        recorded += tables.iter().map(|t| t.discrepancies.len()).sum::<usize>();
    }
    Ok(format!(
        "no silent mismatches; {recorded} discrepancy records"
    ))
}

fn bracket_table() -> Outcome {
    let opts = SuiteOptions {
        seed: SEED,
        ..SuiteOptions::default()
    };
    for m in [Metric::euclidean(2), Metric::euclidean(3)] {
        for p in points(&m, 20) {
            let r = verify_bracket_table(&m, &p).map_err(|e| e.to_string())?;
            if let Some(k) = r.residuals.iter().position(|v| !(*v < 1e-8)) {
                return Err(format!(
                    "{} identity {} residual {:e}",
                    label(&m),
                    k + 1,
                    r.residuals[k]
                ));
            }
        }
    }
    let m = Metric::Riemannian2d;
    let pts = points(&m, 20);
    let r = run_suite(SuiteKind::Brackets, &m, &pts, &opts).map_err(|e| e.to_string())?;
    verdict(&r, "bracket_table")?;
    verdict(&r, "bracket_xi_l_sign")?;
    let SuiteReport::Brackets(b) = &r else {
        unreachable!()
    };
    for (bp, p) in b.points.iter().zip(&pts) {
        for k in 0..7 {
            let res = bp.report.residuals[k];
            if !(res < 1e-8)
                && !b
                    .discrepancies
                    .iter()
                    .any(|d| d.identity == k + 1 && &d.point == p)
            {
                return Err(format!(
                    "identity {} unrecorded on riemannian2d ({res:e})",
                    k + 1
                ));
            }
        }
        if bp.report.xi_l_sign != -1 {
            return Err(format!("[xi, L] sign resolved to {}", bp.report.xi_l_sign));
        }
    }
    Ok(format!(
        "8/8 on euclidean; riemannian2d {} records; [xi, L] = -xi",
        b.discrepancies.len()
    ))
}

/// `2 max |g_abc|` from the lowered Cartan tensor contracted with the frame.
fn cartan_witness(m: &Metric, p: &JetPoint) -> f64 {
    let c = cartan_lowered(m, p).unwrap();
    let geo = LocalGeometry::compute(m, &p.coords(), pivot_index(p.y())).unwrap();
    let n = m.dim();
    let mut worst: f64 = 0.0;
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            for d in 0..n - 1 {
                let (ea, eb, ed) = (geo.e_row(a), geo.e_row(b), geo.e_row(d));
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            s += c.get(i, j, k) * ea[i] * eb[j] * ed[k];
                        }
                    }
                }
                // g_abc carries the 1/2 of the Sasaki lift
                worst = worst.max((0.5 * s).abs());
            }
        }
    }
    2.0 * worst
}

fn vprime_both_directions() -> Outcome {
    let m = Metric::Riemannian2d;
    let mut riem: f64 = 0.0;
    for p in indicatrix(&m, 20) {
        riem = riem.max(
            bundle_like_defect(&m, &p, Foliation::VprimeTm)
                .map_err(|e| e.to_string())?
                .value,
        );
    }
    if !(riem < 1e-8) {
        return Err(format!("riemannian2d V'TM defect {riem:e}"));
    }
    let m = Metric::randers_const(vec![0.1, 0.0]).unwrap();
    let mut best: Option<(f64, f64)> = None;
    for p in indicatrix(&m, 20) {
        let f = foliation_point(&m, &p).map_err(|e| e.to_string())?;
        let d = f.vprime_bundle_like.value;
        if d > 1e-6 && best.is_none_or(|(b, _)| d > b) {
            best = Some((d, cartan_witness(&m, &p)));
        }
    }
    let (d, w) = best.ok_or("randers_const V'TM defect never exceeds 1e-6")?;
    let rel = (d - w).abs() / w;
    if !(rel < 1e-8) {
        return Err(format!(
            "defect {d:e} against 2 max|g_abc| = {w:e} (relative {rel:e})"
        ));
    }
    Ok(format!(
        "riemannian2d {riem:e}; randers_const {d:e} = 2 max|g_abc| to {rel:e}"
    ))
}

fn vperp_bundle_like() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in registry() {
        for p in points(&m, 20) {
            let d = bundle_like_defect(&m, &p, Foliation::VperpTm)
                .map_err(|e| e.to_string())?
                .value;
            if !(d < 1e-8) {
                return Err(format!("{} defect {d:e} at {p:?}", label(&m)));
            }
            worst = worst.max(d);
        }
    }
    Ok(format!("max defect {worst:e}"))
}

fn vertical_not_totally_geodesic() -> Outcome {
    let mut margin = f64::INFINITY;
    let mut sff: f64 = 0.0;
    for m in registry() {
        for p in indicatrix(&m, 20) {
            let f = foliation_point(&m, &p).map_err(|e| e.to_string())?;
            let low = f.lambda_min_g_ab - 1e-6;
            let d = f
                .vprime_totally_geodesic
                .value
                .min(f.vperp_totally_geodesic.value);
            if !(d >= low) {
                return Err(format!(
                    "{} defect {d:e} below lambda_min {:e}",
                    label(&m),
                    f.lambda_min_g_ab
                ));
            }
            if !(f.vertical_sff_residual < 1e-8) {
                return Err(format!(
                    "{} H(vbar, vbar) + g L residual {:e}",
                    label(&m),
                    f.vertical_sff_residual
                ));
            }
            margin = margin.min(d - f.lambda_min_g_ab);
            sff = sff.max(f.vertical_sff_residual);
        }
    }
    Ok(format!(
        "min defect - lambda_min = {margin:e}; H residual {sff:e}"
    ))
}

fn curvature_relations() -> Outcome {
    let opts = SuiteOptions {
        seed: SEED,
        curvature_extras: 5,
        ..SuiteOptions::default()
    };
    let mut worst: f64 = 0.0;
    for m in [
        Metric::euclidean(2),
        Metric::euclidean(3),
        Metric::Riemannian2d,
    ] {
        let pts = indicatrix(&m, 10);
        let r = run_suite(SuiteKind::Curvature, &m, &pts, &opts).map_err(|e| e.to_string())?;
        verdict(&r, "curvature_relations")?;
        let SuiteReport::Curvature(c) = &r else {
            unreachable!()
        };
        // the plane has only four such combinations; all of them are checked
        let extras = 5.min(equal_combination_count(m.dim()));
        for rep in &c.reports {
            if rep.relations.len() != 7 || rep.extras.len() != extras {
                return Err(format!(
                    "{} checked {} relations and {} extras",
                    label(&m),
                    rep.relations.len(),
                    rep.extras.len()
                ));
            }
            for rel in rep.relations.iter().chain(&rep.extras) {
                if !(rel.residual < 1e-7) {
                    return Err(format!(
                        "{} relation {} ({}) residual {:e}",
                        label(&m),
                        rel.relation,
                        rel.label,
                        rel.residual
                    ));
                }
                worst = worst.max(rel.residual);
            }
        }
    }
    Ok(format!(
        "7 relations + min(5, available) extras, max residual {worst:e}"
    ))
}

fn never_sasakian() -> Outcome {
    let mut floor = f64::INFINITY;
    for m in registry() {
        let mut min_max = f64::INFINITY;
        for p in indicatrix(&m, 20) {
            let o = sasakian_obstruction(&m, &p).map_err(|e| e.to_string())?;
            if !(o.max_component >= o.lambda_min_g_ab - 1e-6) {
                return Err(format!(
                    "{} obstruction {:e} below lambda_min {:e}",
                    label(&m),
                    o.max_component,
                    o.lambda_min_g_ab
                ));
            }
            min_max = min_max.min(o.max_component);
        }
        if !(min_max > 0.0) {
            return Err(format!("{} obstruction vanishes", label(&m)));
        }
        floor = floor.min(min_max);
    }
    Ok(format!("smallest obstruction {floor:e}"))
}

fn nijenhuis_equivalence() -> Outcome {
    let mut parts = Vec::new();
    for m in registry() {
        let pts = indicatrix(&m, 20);
        let f = flatness_equivalence_check(&m, &pts).map_err(|e| e.to_string())?;
        let expect_flat = matches!(m, Metric::Euclidean { .. } | Metric::RandersConst { .. });
        let integrable = f.max_nijenhuis < 1e-8;
        let flat = f.max_curvature < 1e-8;
        if integrable != flat || flat != expect_flat {
            return Err(format!(
                "{}: |N_J| {:e}, |R| {:e}",
                label(&m),
                f.max_nijenhuis,
                f.max_curvature
            ));
        }
        parts.push(format!(
            "{}={}",
            label(&m),
            if flat { "flat" } else { "curved" }
        ));
    }
    let m = Metric::Riemannian2d;
    let mut mixed: f64 = 0.0;
    for p in indicatrix(&m, 20) {
        mixed = mixed.max(
            nijenhuis_report(&m, &p)
                .map_err(|e| e.to_string())?
                .mixed_residual,
        );
    }
    if !(mixed < 1e-7) {
        return Err(format!(
            "riemannian2d N_J(delta, dot) + R delta = {mixed:e}"
        ));
    }
    Ok(format!("{}; mixed residual {mixed:e}", parts.join(" ")))
}

fn engine_hygiene() -> Outcome {
    let probes = fd_probes(SEED, 100).map_err(|e| e.to_string())?;
    let worst = probes
        .iter()
        .max_by(|a, b| a.agreement.total_cmp(&b.agreement))
        .ok_or("no probes")?;
    if probes.len() != 100 || !(worst.agreement < 1e-6) {
        return Err(format!(
            "jet vs FD {:e} on {} {:?}",
            worst.agreement, worst.field, worst.index
        ));
    }
    let mut contact: f64 = 0.0;
    for m in registry() {
        for p in indicatrix(&m, 20) {
            let c = contact_identities(&m, &p).map_err(|e| e.to_string())?;
            let r = c.eta_xi.max(c.phi_squared).max(c.metric_compatibility);
            if !(r < 1e-9) {
                return Err(format!("{} contact identity residual {r:e}", label(&m)));
            }
            contact = contact.max(r);
        }
    }
    common::check_golden()?;
    Ok(format!(
        "FD agreement {:e}; contact {contact:e}; golden byte-exact",
        worst.agreement
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("koszul_self_consistency", koszul_self_consistency),
        ("connection_adjudication", connection_adjudication),
        ("bracket_table", bracket_table),
        ("vprime_bundle_like_iff_riemannian", vprime_both_directions),
        ("vperp_bundle_like", vperp_bundle_like),
        (
            "vertical_not_totally_geodesic",
            vertical_not_totally_geodesic,
        ),
        ("curvature_relations", curvature_relations),
        ("never_sasakian", never_sasakian),
        ("nijenhuis_flatness_equivalence", nijenhuis_equivalence),
        ("engine_hygiene", engine_hygiene),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, msg) = match f() {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!(
            "criterion {:>2} {tag} {name} ({:.1}s): {msg}",
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
