//! The closed-form coordinate table of the Levi-Civita connection in the adapted
//! frame, evaluated literally and adjudicated against the Koszul oracle.

use serde::{Deserialize, Serialize};

use super::koszul::koszul_nabla;
use crate::error::{GeometryError, Result};
use crate::finsler::{cartan_lowered, CartanLowered, FinslerFunction};
use crate::frame::{FrameCalculus, FrameField};
use crate::jet::JetPoint;
use crate::linalg::{inverse, max_abs, Mat};
use crate::spray::SprayData;

/// Agreement threshold between the closed-form table and the oracle.
pub const CONNECTION_TOL: f64 = 1e-8;

/// Reading of the two-index symbol `R_ij`, which the table uses but never
/// defines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RijReading {
    /// `R_ij = R^k_ij g_kl y^l`
    LastLowered,
    /// `R_ij = g_ik R^k_lj y^l`
    YContracted,
}

/// Reading of `R_bad` in the mixed stanzas (`d` is the summed index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RbadReading {
    /// as `R_dab = E_a^i E_b^j E_d^k R^h_ij g_hk`
    Dab,
    /// the same pattern with the index order as tabulated, `E_a^i E_d^j E_b^k R^h_ij g_hk`
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub r_ij: RijReading,
    pub r_bad: RbadReading,
}

impl Hypothesis {
    pub const PRIMARY: Hypothesis = Hypothesis {
        r_ij: RijReading::LastLowered,
        r_bad: RbadReading::Dab,
    };

    pub fn all() -> [Hypothesis; 4] {
        use RbadReading::*;
        use RijReading::*;
        [
            Hypothesis {
                r_ij: LastLowered,
                r_bad: Dab,
            },
            Hypothesis {
                r_ij: LastLowered,
                r_bad: Literal,
            },
            Hypothesis {
                r_ij: YContracted,
                r_bad: Dab,
            },
            Hypothesis {
                r_ij: YContracted,
                r_bad: Literal,
            },
        ]
    }

    pub fn label(&self) -> String {
        let rij = match self.r_ij {
            RijReading::LastLowered => "R_ij=R^k_ij g_kl y^l",
            RijReading::YContracted => "R_ij=g_ik R^k_lj y^l",
        };
        let rbad = match self.r_bad {
            RbadReading::Dab => "R_bad read as R_dab",
            RbadReading::Literal => "R_bad literal",
        };
        format!("{rij}; {rbad}")
    }
}

/// Point values of every symbol the table refers to.
pub struct Symbols {
    pub n: usize,
    pub f2: f64,
    pub y: Vec<f64>,
    pub g: Mat<f64>,
    pub e: Mat<f64>,
    pub g_ab: Mat<f64>,
    pub g_ab_inv: Mat<f64>,
    /// `G_i^j`
    pub nonlinear: Mat<f64>,
    pub spray: SprayData,
    pub cartan: CartanLowered,
    /// `delta_g[i] = δg/δx^i`
    pub delta_g: Vec<Mat<f64>>,
    /// `de_hbar[a][(b, i)] = δ̄_a(E_b^i)`
    pub de_hbar: Vec<Mat<f64>>,
    /// `de_vbar[a][(b, i)] = ∂̄_a(E_b^i)`
    pub de_vbar: Vec<Mat<f64>>,
    pub de_xi: Mat<f64>,
    pub de_l: Mat<f64>,
}

impl Symbols {
    pub fn compute<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<Self> {
        let c = FrameCalculus::new(m, p)?;
        Self::from_calculus(&c, p)
    }

    pub(crate) fn from_calculus<M: FinslerFunction>(
        c: &FrameCalculus<M>,
        p: &JetPoint,
    ) -> Result<Self> {
        let n = c.n();
        let geo = &c.geo;
        let g_ab = geo.g_ab();
        let mut delta_g = Vec::with_capacity(n);
        for i in 0..n {
            delta_g.push(c.g_along(&c.field(FrameField::Delta(i)))?);
        }
        let mut de_hbar = Vec::with_capacity(n - 1);
        let mut de_vbar = Vec::with_capacity(n - 1);
        for a in 0..n - 1 {
            de_hbar.push(c.e_along_field(FrameField::HBar(a))?);
            de_vbar.push(c.e_along_field(FrameField::VBar(a))?);
        }
        Ok(Symbols {
            n,
            f2: geo.f * geo.f,
            y: geo.y().to_vec(),
            g: geo.g.clone(),
            e: geo.e.clone(),
            g_ab_inv: inverse(&g_ab)?,
            g_ab,
            nonlinear: geo.nonlinear.clone(),
            spray: c.spray.clone(),
            cartan: cartan_lowered(c.m, p)?,
            delta_g,
            de_hbar,
            de_vbar,
            de_xi: c.e_along_field(FrameField::Xi)?,
            de_l: c.e_along_field(FrameField::Liouville)?,
        })
    }

    /// `Σ E_a^i E_b^j E_d^k f(i, j, k)`
    fn eee(&self, a: usize, b: usize, d: usize, f: impl Fn(usize, usize, usize) -> f64) -> f64 {
        let n = self.n;
        let e = &self.e;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += e[(a, i)] * e[(b, j)] * e[(d, k)] * f(i, j, k);
                }
            }
        }
        s
    }

    /// `g_abd = ½ E_a^i E_b^j E_d^k g_ijk`
    pub fn g3(&self, a: usize, b: usize, d: usize) -> f64 {
        0.5 * self.eee(a, b, d, |i, j, k| self.cartan.get(i, j, k))
    }

    /// `R_cab = E_a^i E_b^j E_c^k R^h_ij g_hk`
    pub fn r3(&self, c: usize, a: usize, b: usize) -> f64 {
        let n = self.n;
        self.eee(a, b, c, |i, j, k| {
            (0..n)
                .map(|h| self.spray.curvature(h, i, j) * self.g[(h, k)])
                .sum()
        })
    }

    pub fn r_ij(&self, reading: RijReading, i: usize, j: usize) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                s += match reading {
                    RijReading::LastLowered => {
                        self.spray.curvature(k, i, j) * self.g[(k, l)] * self.y[l]
                    }
                    RijReading::YContracted => {
                        self.g[(i, k)] * self.spray.curvature(k, l, j) * self.y[l]
                    }
                };
            }
        }
        s
    }

    /// `R_ab = E_a^i E_b^j R_ij`
    pub fn r2(&self, reading: RijReading, a: usize, b: usize) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.e[(a, i)] * self.e[(b, j)] * self.r_ij(reading, i, j);
            }
        }
        s
    }

    /// `R̄_ab = (δ̄_a E_b^i − δ̄_b E_a^i) g_ij y^j`
    pub fn rbar(&self, a: usize, b: usize) -> f64 {
        let gy = self.g.mul_vec(&self.y);
        (0..self.n)
            .map(|i| (self.de_hbar[a][(b, i)] - self.de_hbar[b][(a, i)]) * gy[i])
            .sum()
    }

    fn r_bad(&self, reading: RbadReading, b: usize, a: usize, d: usize) -> f64 {
        match reading {
            RbadReading::Dab => self.r3(d, a, b),
            RbadReading::Literal => self.r3(b, a, d),
        }
    }

    /// `Γ_abd = E_a^i E_b^j E_d^k ½(δ_i g_jk + δ_j g_ik − δ_k g_ij)`
    pub fn gamma(&self, a: usize, b: usize, d: usize) -> f64 {
        let dg = &self.delta_g;
        self.eee(a, b, d, |i, j, k| {
            0.5 * (dg[i][(j, k)] + dg[j][(i, k)] - dg[k][(i, j)])
        })
    }

    /// `G_ij^h g_hk`
    fn berwald_low(&self, i: usize, j: usize, k: usize) -> f64 {
        (0..self.n)
            .map(|h| self.spray.berwald(i, j, h) * self.g[(h, k)])
            .sum()
    }

    /// `dE[(b, j)] E_d^k g_jk`
    fn de_g(&self, de: &Mat<f64>, b: usize, d: usize) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                s += de[(b, j)] * self.e[(d, k)] * self.g[(j, k)];
            }
        }
        s
    }

    /// `E_a^i G_i^h g_hk E_d^k`
    fn eng(&self, a: usize, d: usize) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for h in 0..n {
                for k in 0..n {
                    s += self.e[(a, i)] * self.nonlinear[(i, h)] * self.g[(h, k)] * self.e[(d, k)];
                }
            }
        }
        s
    }

    /// `v^e = Σ_d v_d g^{de}`
    fn raise(&self, f: impl Fn(usize) -> f64) -> Vec<f64> {
        let k = self.n - 1;
        let low: Vec<f64> = (0..k).map(f).collect();
        self.g_ab_inv.mul_vec(&low)
    }
}

/// The sixteen ordered pairs of adapted-frame symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    HbarHbar,
    HbarVbar,
    VbarHbar,
    VbarVbar,
    HbarXi,
    XiHbar,
    VbarXi,
    XiVbar,
    HbarL,
    LHbar,
    VbarL,
    LVbar,
    XiXi,
    XiL,
    LXi,
    LL,
}

impl PairKind {
    pub fn of(x: FrameField, y: FrameField) -> Result<PairKind> {
        use FrameField::*;
        Ok(match (x, y) {
            (HBar(_), HBar(_)) => PairKind::HbarHbar,
            (HBar(_), VBar(_)) => PairKind::HbarVbar,
            (VBar(_), HBar(_)) => PairKind::VbarHbar,
            (VBar(_), VBar(_)) => PairKind::VbarVbar,
            (HBar(_), Xi) => PairKind::HbarXi,
            (Xi, HBar(_)) => PairKind::XiHbar,
            (VBar(_), Xi) => PairKind::VbarXi,
            (Xi, VBar(_)) => PairKind::XiVbar,
            (HBar(_), Liouville) => PairKind::HbarL,
            (Liouville, HBar(_)) => PairKind::LHbar,
            (VBar(_), Liouville) => PairKind::VbarL,
            (Liouville, VBar(_)) => PairKind::LVbar,
            (Xi, Xi) => PairKind::XiXi,
            (Xi, Liouville) => PairKind::XiL,
            (Liouville, Xi) => PairKind::LXi,
            (Liouville, Liouville) => PairKind::LL,
            _ => {
                return Err(GeometryError::InvalidParameter(format!(
                    "{x:?} or {y:?} is not an adapted-frame field"
                )))
            }
        })
    }

    /// Stanza of the closed-form table, 1-based.
    pub fn stanza(&self) -> usize {
        use PairKind::*;
        match self {
            HbarHbar => 1,
            HbarVbar => 2,
            VbarHbar => 3,
            VbarVbar => 4,
            HbarXi => 5,
            XiHbar => 6,
            VbarXi => 7,
            XiVbar => 8,
            HbarL | LHbar => 9,
            VbarL | LVbar => 10,
            XiXi | XiL | LXi | LL => 11,
        }
    }
}

/// Adapted-frame coefficients `(δ̄_1.., ξ, ∂̄_1.., L)` of `∇_X Y` as tabulated.
pub fn closed_form_nabla(
    s: &Symbols,
    h: Hypothesis,
    x: FrameField,
    y: FrameField,
) -> Result<Vec<f64>> {
    use FrameField::*;
    let n = s.n;
    let k = n - 1;
    let mut c = vec![0.0; 2 * n];
    let xi = k;
    let l = 2 * n - 1;
    let put_h = |c: &mut Vec<f64>, v: Vec<f64>| c[..k].iter_mut().zip(v).for_each(|(t, v)| *t += v);
    let put_v =
        |c: &mut Vec<f64>, v: Vec<f64>| c[n..n + k].iter_mut().zip(v).for_each(|(t, v)| *t += v);
    let f2 = s.f2;
    let kind = PairKind::of(x, y)?;
    match (x, y) {
        (HBar(a), HBar(b)) => {
            put_h(
                &mut c,
                s.raise(|d| s.gamma(a, b, d) + s.de_g(&s.de_hbar[a], b, d)),
            );
            put_v(&mut c, s.raise(|d| -s.g3(a, b, d) + 0.5 * s.r3(d, a, b)));
            c[xi] = s.rbar(a, b) / (2.0 * f2);
        }
        (HBar(a), VBar(b)) => {
            put_v(
                &mut c,
                s.raise(|d| {
                    0.5 * s.eee(b, d, a, |j, kk, i| {
                        s.delta_g[i][(j, kk)] - s.berwald_low(i, kk, j) + s.berwald_low(i, j, kk)
                    }) + s.de_g(&s.de_hbar[a], b, d)
                }),
            );
            put_h(
                &mut c,
                s.raise(|d| s.g3(a, b, d) - 0.5 * s.r_bad(h.r_bad, b, a, d)),
            );
            c[xi] = s.r2(h.r_ij, a, b) / (2.0 * f2);
        }
        (VBar(b), HBar(a)) => {
            put_h(
                &mut c,
                s.raise(|d| {
                    s.g3(a, b, d) - 0.5 * s.r_bad(h.r_bad, b, a, d) + s.de_g(&s.de_vbar[b], a, d)
                }),
            );
            c[xi] = (0.5 * s.r2(h.r_ij, a, b) - s.g_ab[(a, b)]) / f2;
            put_v(
                &mut c,
                s.raise(|d| {
                    0.5 * s.eee(a, b, d, |i, j, kk| {
                        s.delta_g[i][(j, kk)] - s.berwald_low(i, kk, j) - s.berwald_low(i, j, kk)
                    })
                }),
            );
        }
        (VBar(a), VBar(b)) => {
            put_h(
                &mut c,
                s.raise(|d| {
                    0.5 * s.eee(a, b, d, |i, j, kk| {
                        s.berwald_low(i, kk, j) + s.berwald_low(j, kk, i) - s.delta_g[kk][(i, j)]
                    })
                }),
            );
            put_v(
                &mut c,
                s.raise(|d| s.g3(a, b, d) + s.de_g(&s.de_vbar[a], b, d)),
            );
            c[l] = -s.g_ab[(a, b)] / f2;
        }
        (HBar(a), Xi) => {
            put_h(&mut c, s.raise(|d| 0.5 * s.rbar(d, a)));
            put_v(&mut c, s.raise(|d| -0.5 * s.r2(h.r_ij, a, d)));
        }
        (Xi, HBar(a)) => {
            put_h(
                &mut c,
                s.raise(|d| s.de_g(&s.de_xi, a, d) + s.eng(a, d) + 0.5 * s.rbar(d, a)),
            );
            put_v(&mut c, s.raise(|d| 0.5 * s.r2(h.r_ij, a, d)));
        }
        (VBar(a), Xi) => {
            let mut v = s.raise(|d| -0.5 * s.r2(h.r_ij, a, d));
            v[a] += 1.0;
            put_h(&mut c, v);
        }
        (Xi, VBar(a)) => {
            put_h(&mut c, s.raise(|d| -0.5 * s.r2(h.r_ij, a, d)));
            put_v(&mut c, s.raise(|d| s.de_g(&s.de_xi, a, d) + s.eng(a, d)));
        }
        (HBar(_), Liouville) => {}
        (Liouville, HBar(a)) => put_h(&mut c, s.raise(|d| s.de_g(&s.de_l, a, d))),
        (VBar(a), Liouville) => c[n + a] = 1.0,
        (Liouville, VBar(a)) => put_v(&mut c, s.raise(|d| s.de_g(&s.de_l, a, d))),
        (Xi, Xi) | (Xi, Liouville) => {}
        (Liouville, Xi) => c[xi] = 1.0,
        (Liouville, Liouville) => c[l] = 1.0,
        _ => unreachable!("rejected by PairKind::of: {kind:?}"),
    }
    Ok(c)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConnectionEntry {
    pub x: String,
    pub y: String,
    pub pair: PairKind,
    pub stanza: usize,
    pub closed_form: Vec<f64>,
    pub koszul: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlternativeResidual {
    pub hypothesis: String,
    pub residual: f64,
}

/// A stanza whose tabulated value disagrees with the oracle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Discrepancy {
    pub metric: String,
    pub point: JetPoint,
    pub stanza: usize,
    pub pair: String,
    /// frame blocks (`hbar`, `xi`, `vbar`, `L`) where the mismatch sits
    pub terms: Vec<String>,
    #[serde(deserialize_with = "crate::verdict::nan_as_null")]
    pub residual: f64,
    pub hypothesis: String,
    pub alternatives: Vec<AlternativeResidual>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StanzaSummary {
    pub stanza: usize,
    pub residual: f64,
    pub matched: bool,
    /// smallest residual over the alternative symbol readings
    pub best_alternative: AlternativeResidual,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConnectionTable {
    pub metric: String,
    pub point: JetPoint,
    pub hypothesis: String,
    pub entries: Vec<ConnectionEntry>,
    pub stanzas: Vec<StanzaSummary>,
    pub discrepancies: Vec<Discrepancy>,
    /// the symbol reading with the smallest worst-case residual
    pub adjudicated: Hypothesis,
    pub adjudicated_residual: f64,
    /// `|∇_ξ ξ|`, `|∇_L L − L|` and the `L`-part of `∇_{∂̄_a} ∂̄_b + g_ab/F² L`
    /// from the oracle
    pub xi_xi: f64,
    pub l_l: f64,
    pub vbar_vbar_normal: f64,
}

fn block_names(n: usize, diff: &[f64], tol: f64) -> Vec<String> {
    let k = n - 1;
    let blocks = [
        ("hbar", 0..k),
        ("xi", k..n),
        ("vbar", n..n + k),
        ("L", 2 * n - 1..2 * n),
    ];
    blocks
        .into_iter()
        .filter(|(_, r)| diff[r.clone()].iter().any(|v| v.abs() >= tol))
        .map(|(s, _)| s.to_string())
        .collect()
}

fn diff_max(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Evaluates all sixteen pairs, every index combination, against the oracle.
pub fn connection_table<M: FinslerFunction>(m: &M, p: &JetPoint) -> Result<ConnectionTable> {
    connection_table_with(m, p, CONNECTION_TOL)
}

/// [`connection_table`] with `tol` deciding which stanzas match.
pub fn connection_table_with<M: FinslerFunction>(
    m: &M,
    p: &JetPoint,
    tol: f64,
) -> Result<ConnectionTable> {
    let c = FrameCalculus::new(m, p)?;
    let s = Symbols::from_calculus(&c, p)?;
    let n = s.n;
    let frame = FrameField::adapted(n);
    let mut entries = Vec::new();
    let mut per_stanza: Vec<Vec<(usize, Vec<f64>)>> = vec![Vec::new(); 12];
    for &x in &frame {
        for &y in &frame {
            let kind = PairKind::of(x, y)?;
            let nat = koszul_nabla(m, &c.q, c.geo.pivot, &x, &y)?;
            let oracle = c.geo.adapted_coeffs(&nat)?;
            let tabulated = closed_form_nabla(&s, Hypothesis::PRIMARY, x, y)?;
            let residual = diff_max(&tabulated, &oracle);
            per_stanza[kind.stanza()].push((entries.len(), oracle.clone()));
            entries.push(ConnectionEntry {
                x: x.label(),
                y: y.label(),
                pair: kind,
                stanza: kind.stanza(),
                closed_form: tabulated,
                koszul: oracle,
                residual,
            });
        }
    }
    let mut stanzas = Vec::new();
    let mut discrepancies = Vec::new();
    let mut worst = [0.0f64; 4];
    for (stanza, list) in per_stanza.iter().enumerate().skip(1) {
        let residual = list
            .iter()
            .map(|(i, _)| entries[*i].residual)
            .fold(0.0, f64::max);
        let mut alternatives = Vec::new();
        for h in Hypothesis::all() {
            let mut r: f64 = 0.0;
            for (i, oracle) in list {
                let e = &entries[*i];
                let (x, y) = (frame_of(&frame, &e.x), frame_of(&frame, &e.y));
                r = r.max(diff_max(&closed_form_nabla(&s, h, x, y)?, oracle));
            }
            let slot = alternatives.len();
            worst[slot] = worst[slot].max(r);
            alternatives.push(AlternativeResidual {
                hypothesis: h.label(),
                residual: r,
            });
        }
        let best = alternatives
            .iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
            .cloned()
            .expect("four hypotheses");
        let matched = residual < tol;
        if !matched {
            for (i, oracle) in list {
                let e = &entries[*i];
                if e.residual < tol {
                    continue;
                }
                let diff: Vec<f64> = e
                    .closed_form
                    .iter()
                    .zip(oracle)
                    .map(|(a, b)| a - b)
                    .collect();
                discrepancies.push(Discrepancy {
                    metric: m.name(),
                    point: p.clone(),
                    stanza,
                    pair: format!("nabla_{} {}", e.x, e.y),
                    terms: block_names(n, &diff, tol),
                    residual: e.residual,
                    hypothesis: Hypothesis::PRIMARY.label(),
                    alternatives: alternatives.clone(),
                });
            }
        }
        stanzas.push(StanzaSummary {
            stanza,
            residual,
            matched,
            best_alternative: best,
        });
    }
    let find = |x: FrameField, y: FrameField| {
        entries
            .iter()
            .find(|e| e.x == x.label() && e.y == y.label())
            .expect("pair present")
    };
    let xi_xi = max_abs(&find(FrameField::Xi, FrameField::Xi).koszul);
    let mut ll = find(FrameField::Liouville, FrameField::Liouville)
        .koszul
        .clone();
    ll[2 * n - 1] -= 1.0;
    let l_l = max_abs(&ll);
    let mut vv: f64 = 0.0;
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            let e = find(FrameField::VBar(a), FrameField::VBar(b));
            vv = vv.max((e.koszul[2 * n - 1] + s.g_ab[(a, b)] / s.f2).abs());
        }
    }
    let best = (0..4)
        .min_by(|&a, &b| worst[a].total_cmp(&worst[b]))
        .expect("four hypotheses");
    Ok(ConnectionTable {
        adjudicated: Hypothesis::all()[best],
        adjudicated_residual: worst[best],
        metric: m.name(),
        point: p.clone(),
        hypothesis: Hypothesis::PRIMARY.label(),
        entries,
        stanzas,
        discrepancies,
        xi_xi,
        l_l,
        vbar_vbar_normal: vv,
    })
}

fn frame_of(frame: &[FrameField], label: &str) -> FrameField {
    *frame
        .iter()
        .find(|f| f.label() == label)
        .expect("label from the same frame")
}
