//! Bundle-like and totally-geodesic defects of the natural foliations of
//! `(TM, G)`, and the verdicts built on them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::finsler::{cartan_lowered, check_dim, FinslerFunction};
use crate::frame::FrameField;
use crate::geometry::{pivot_index, LocalGeometry};
use crate::jet::JetPoint;
use crate::linalg::{min_eigenvalue, solve, Mat};
use crate::sasaki::{koszul_nabla, second_fundamental_form, Symbols};
use crate::verdict::{Tolerances, Verdict};

/// `max |g_ijk|` below this counts as Riemannian.
pub const CARTAN_ZERO_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Foliation {
    /// rays of the vertical Liouville field
    L,
    /// integral curves of the geodesic spray
    Xi,
    LPlusXi,
    /// the vertical foliation
    Vtm,
    /// the vertical complement of `L`
    VprimeTm,
    /// the `G`-orthogonal complement of `L`
    VperpTm,
}

impl Foliation {
    pub const ALL: [Foliation; 6] = [
        Foliation::L,
        Foliation::Xi,
        Foliation::LPlusXi,
        Foliation::Vtm,
        Foliation::VprimeTm,
        Foliation::VperpTm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Foliation::L => "L",
            Foliation::Xi => "XI",
            Foliation::LPlusXi => "L_PLUS_XI",
            Foliation::Vtm => "VTM",
            Foliation::VprimeTm => "VPRIME_TM",
            Foliation::VperpTm => "VPERP_TM",
        }
    }

    pub fn tangent(&self, n: usize) -> Vec<FrameField> {
        use FrameField::*;
        let hbar = (0..n - 1).map(HBar);
        let vbar = (0..n - 1).map(VBar);
        match self {
            Foliation::L => vec![Liouville],
            Foliation::Xi => vec![Xi],
            Foliation::LPlusXi => vec![Xi, Liouville],
            Foliation::Vtm => (0..n).map(DotY).collect(),
            Foliation::VprimeTm => vbar.collect(),
            Foliation::VperpTm => hbar.chain([Xi]).chain(vbar).collect(),
        }
    }

    /// Generators of the `G`-orthogonal complement.
    pub fn complement(&self, n: usize) -> Vec<FrameField> {
        use FrameField::*;
        let hbar = (0..n - 1).map(HBar);
        let vbar = (0..n - 1).map(VBar);
        match self {
            Foliation::L => hbar.chain([Xi]).chain(vbar).collect(),
            Foliation::Xi => hbar.chain(vbar).chain([Liouville]).collect(),
            Foliation::LPlusXi => hbar.chain(vbar).collect(),
            Foliation::Vtm => (0..n).map(Delta).collect(),
            Foliation::VprimeTm => hbar.chain([Xi, Liouville]).collect(),
            Foliation::VperpTm => vec![Liouville],
        }
    }
}

/// A defect value and the generators that realize it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Defect {
    pub value: f64,
    pub witness: String,
}

fn point_data<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
) -> Result<(Vec<f64>, usize, LocalGeometry<f64>)> {
    check_dim(m, p)?;
    let q = p.coords();
    let pivot = pivot_index(p.y());
    let geo = LocalGeometry::compute(m, &q, pivot)?;
    Ok((q, pivot, geo))
}

/// `max |G(X_t, Y_c)|` over tangent and complement generators.
pub fn orthogonality_defect<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    fol: Foliation,
) -> Result<f64> {
    let (_, _, geo) = point_data(m, p)?;
    let n = geo.n;
    let mut worst: f64 = 0.0;
    for t in fol.tangent(n) {
        for c in fol.complement(n) {
            worst = worst.max(geo.sasaki(&t.components(&geo), &c.components(&geo)).abs());
        }
    }
    Ok(worst)
}

/// `max |G(∇_X Y + ∇_Y X, Z)|` with `X, Y` over the complement generators and
/// `Z` over the tangent generators.
pub fn bundle_like_defect<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    fol: Foliation,
) -> Result<Defect> {
    let (q, pivot, geo) = point_data(m, p)?;
    let n = geo.n;
    let comp = fol.complement(n);
    let tang: Vec<(FrameField, Vec<f64>)> = fol
        .tangent(n)
        .into_iter()
        .map(|f| (f, f.components(&geo)))
        .collect();
    let mut best = Defect {
        value: 0.0,
        witness: String::new(),
    };
    for (i, x) in comp.iter().enumerate() {
        for y in &comp[i..] {
            let a = koszul_nabla(m, &q, pivot, x, y)?;
            let b = koszul_nabla(m, &q, pivot, y, x)?;
            let s: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
            for (z, zv) in &tang {
                let v = geo.sasaki(&s, zv).abs();
                if v > best.value || best.witness.is_empty() {
                    best = Defect {
                        value: v,
                        witness: format!("{},{};{}", x.label(), y.label(), z.label()),
                    };
                }
            }
        }
    }
    Ok(best)
}

/// `max ‖(∇_X Y)^⊥‖_G` over tangent generators, `⊥` the `G`-orthogonal
/// projection onto the complement.
pub fn totally_geodesic_defect<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    fol: Foliation,
) -> Result<Defect> {
    let (q, pivot, geo) = point_data(m, p)?;
    let n = geo.n;
    let tang = fol.tangent(n);
    let tv: Vec<Vec<f64>> = tang.iter().map(|f| f.components(&geo)).collect();
    let k = tv.len();
    let gram = Mat::from_fn(k, k, |a, b| geo.sasaki(&tv[a], &tv[b]));
    let mut best = Defect {
        value: 0.0,
        witness: String::new(),
    };
    for x in &tang {
        for y in &tang {
            let v = koszul_nabla(m, &q, pivot, x, y)?;
            let rhs: Vec<f64> = tv.iter().map(|t| geo.sasaki(&v, t)).collect();
            let coef = solve(&gram, &rhs)?;
            let mut perp = v.clone();
            for (c, t) in coef.iter().zip(&tv) {
                for (pi, ti) in perp.iter_mut().zip(t) {
                    *pi -= c * ti;
                }
            }
            let norm = geo.sasaki(&perp, &perp).max(0.0).sqrt();
            if norm > best.value || best.witness.is_empty() {
                best = Defect {
                    value: norm,
                    witness: format!("{},{}", x.label(), y.label()),
                };
            }
        }
    }
    Ok(best)
}

/// Per-point data behind the verdicts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoliationPoint {
    pub point: JetPoint,
    pub vperp_bundle_like: Defect,
    pub vprime_bundle_like: Defect,
    /// `max |G(∇_{δ̄_a} δ̄_b + ∇_{δ̄_b} δ̄_a, ∂̄_c)|` from the oracle
    pub vprime_hbar_component: f64,
    /// `2 max |g_abc|` from the Cartan tensor
    pub two_max_g_abc: f64,
    pub max_cartan: f64,
    pub vprime_totally_geodesic: Defect,
    pub vperp_totally_geodesic: Defect,
    pub lambda_min_g_ab: f64,
    /// `max |H(∂̄_a, ∂̄_b) + g_ab/F² L|`
    pub vertical_sff_residual: f64,
    pub l_bundle_like: Defect,
    pub l_plus_xi_bundle_like: Defect,
    /// `max |G(∇_{∂̄_a} ∂̄_b + ∇_{∂̄_b} ∂̄_a, L)|`
    pub l_vertical_component: f64,
    pub two_max_g_ab: f64,
}

pub fn foliation_point<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<FoliationPoint> {
    use FrameField::*;
    let (q, pivot, geo) = point_data(m, p)?;
    let n = geo.n;
    let s = Symbols::compute(m, p)?;
    let k = n - 1;
    let l = Liouville.components(&geo);
    let mut hbar_comp: f64 = 0.0;
    let mut l_comp: f64 = 0.0;
    let mut g3max: f64 = 0.0;
    let mut sff: f64 = 0.0;
    let on_indicatrix = (geo.f - 1.0).abs() < crate::sasaki::INDICATRIX_TOL;
    for a in 0..k {
        for b in 0..k {
            let hh = koszul_nabla(m, &q, pivot, &HBar(a), &HBar(b))?;
            let hh2 = koszul_nabla(m, &q, pivot, &HBar(b), &HBar(a))?;
            let sum: Vec<f64> = hh.iter().zip(&hh2).map(|(u, v)| u + v).collect();
            for c in 0..k {
                hbar_comp = hbar_comp.max(geo.sasaki(&sum, &VBar(c).components(&geo)).abs());
                g3max = g3max.max(s.g3(a, b, c).abs());
            }
            let vv = koszul_nabla(m, &q, pivot, &VBar(a), &VBar(b))?;
            let vv2 = koszul_nabla(m, &q, pivot, &VBar(b), &VBar(a))?;
            let sum: Vec<f64> = vv.iter().zip(&vv2).map(|(u, v)| u + v).collect();
            l_comp = l_comp.max(geo.sasaki(&sum, &l).abs());
            if on_indicatrix {
                let h = second_fundamental_form(m, p, &VBar(a), &VBar(b))?;
                let expect = -s.g_ab[(a, b)] / s.f2;
                for (hv, lv) in h.vector.comps.iter().zip(&l) {
                    sff = sff.max((hv - expect * lv).abs());
                }
            } else {
                sff = f64::NAN;
            }
        }
    }
    Ok(FoliationPoint {
        point: p.clone(),
        vperp_bundle_like: bundle_like_defect(m, p, Foliation::VperpTm)?,
        vprime_bundle_like: bundle_like_defect(m, p, Foliation::VprimeTm)?,
        vprime_hbar_component: hbar_comp,
        two_max_g_abc: 2.0 * g3max,
        max_cartan: cartan_lowered(m, p)?.max_abs(),
        vprime_totally_geodesic: totally_geodesic_defect(m, p, Foliation::VprimeTm)?,
        vperp_totally_geodesic: totally_geodesic_defect(m, p, Foliation::VperpTm)?,
        lambda_min_g_ab: min_eigenvalue(&s.g_ab),
        vertical_sff_residual: sff,
        l_bundle_like: bundle_like_defect(m, p, Foliation::L)?,
        l_plus_xi_bundle_like: bundle_like_defect(m, p, Foliation::LPlusXi)?,
        l_vertical_component: l_comp,
        two_max_g_ab: 2.0 * s.g_ab.max_abs(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoliationSuite {
    pub metric: String,
    pub points: Vec<FoliationPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<Verdict>,
}

fn arg_by(
    pts: &[FoliationPoint],
    key: impl Fn(&FoliationPoint) -> f64,
    max: bool,
) -> (f64, Option<&FoliationPoint>) {
    let mut best: Option<&FoliationPoint> = None;
    for p in pts {
        let better = match best {
            None => true,
            Some(b) => (key(p) > key(b)) == max && key(p) != key(b),
        };
        if better {
            best = Some(p);
        }
    }
    (best.map(&key).unwrap_or(f64::NAN), best)
}

/// Verdicts for the four foliation claims over `points`, which should lie
/// on the indicatrix bundle.
pub fn foliation_suite<M: FinslerFunction>(
    m: &M,
    points: &[JetPoint],
    tol: &Tolerances,
) -> Result<FoliationSuite> {
    let zero = tol.foliation_zero;
    let obstruction = tol.foliation_obstruction;
    let pts: Vec<FoliationPoint> = points
        .par_iter()
        .map(|p| foliation_point(m, p))
        .collect::<Result<_>>()?;
    let metric = m.name();
    let mut verdicts = Vec::new();
    let nonempty = !pts.is_empty();

    let (v, w) = arg_by(&pts, |p| p.vperp_bundle_like.value, true);
    verdicts.push(Verdict {
        id: "vperp_bundle_like".into(),
        metric: metric.clone(),
        pass: nonempty && v < zero,
        witness_value: v,
        witness_point: w.map(|p| p.point.clone()),
        detail: format!("max bundle-like defect of VPERP_TM, need < {zero:e}"),
    });

    // two-sided: at every point the defect is the Cartan witness 2 max|g_abc|,
    // so it vanishes exactly where the Cartan tensor does
    let consistent = pts.iter().all(|p| {
        (p.vprime_bundle_like.value - p.two_max_g_abc).abs()
            <= zero.min(1e-8 * p.two_max_g_abc.max(1.0))
    });
    let riemannian = pts.iter().all(|p| p.max_cartan < CARTAN_ZERO_TOL);
    let (v, w) = arg_by(&pts, |p| p.vprime_bundle_like.value, true);
    let (pass, detail) = if riemannian {
        (consistent && v < zero, format!("Cartan tensor zero at all points; max VPRIME_TM defect {v:e}; defect equals 2 max|g_abc| at every point: {consistent}"))
    } else {
        let wp = w.expect("nonempty");
        let rel = (wp.vprime_hbar_component - wp.two_max_g_abc).abs()
            / wp.two_max_g_abc.max(f64::MIN_POSITIVE);
        (
            consistent && v > obstruction && rel < 1e-8,
            format!(
                "max VPRIME_TM defect {v:e} at ({}); hbar component {:e} vs 2 max|g_abc| {:e}, relative difference {rel:e}; defect equals 2 max|g_abc| at every point: {consistent}",
                wp.vprime_bundle_like.witness, wp.vprime_hbar_component, wp.two_max_g_abc
            ),
        )
    };
    verdicts.push(Verdict {
        id: "vprime_bundle_like_iff_riemannian".into(),
        metric: metric.clone(),
        pass: nonempty && pass,
        witness_value: v,
        witness_point: w.map(|p| p.point.clone()),
        detail,
    });

    let margin = |p: &FoliationPoint| {
        p.vprime_totally_geodesic
            .value
            .min(p.vperp_totally_geodesic.value)
            - (p.lambda_min_g_ab - obstruction)
    };
    let (v, w) = arg_by(&pts, margin, false);
    let (sff, _) = arg_by(&pts, |p| p.vertical_sff_residual, true);
    let sff_ok = pts.iter().all(|p| p.vertical_sff_residual < zero);
    verdicts.push(Verdict {
        id: "vertical_not_totally_geodesic".into(),
        metric: metric.clone(),
        pass: nonempty && v >= 0.0 && pts.iter().all(|p| p.lambda_min_g_ab > 0.0) && sff_ok,
        witness_value: w.map(|p| p.vprime_totally_geodesic.value.min(p.vperp_totally_geodesic.value)).unwrap_or(f64::NAN),
        witness_point: w.map(|p| p.point.clone()),
        detail: format!(
            "min over points of (totally-geodesic defect - lambda_min(g_ab) + {obstruction:e}) = {v:e}; max |H(vbar_a,vbar_b) + g_ab/F^2 L| = {sff:e}"
        ),
    });

    let weakest = |p: &FoliationPoint| p.l_bundle_like.value.min(p.l_plus_xi_bundle_like.value);
    let (v, w) = arg_by(&pts, weakest, false);
    let witness_ok = pts
        .iter()
        .all(|p| (p.l_vertical_component - p.two_max_g_ab).abs() < 1e-8 * p.two_max_g_ab.max(1.0));
    verdicts.push(Verdict {
        id: "liouville_not_bundle_like".into(),
        metric,
        pass: nonempty && v > obstruction && witness_ok,
        witness_value: v,
        witness_point: w.map(|p| p.point.clone()),
        detail: format!(
            "min over points of the L and L_PLUS_XI defects {v:e}; |G(nabla_vbar_a vbar_b + nabla_vbar_b vbar_a, L)| = 2 max|g_ab| at every point: {witness_ok}"
        ),
    });
    Ok(FoliationSuite {
        metric: verdicts[0].metric.clone(),
        points: pts,
        verdicts,
    })
}
