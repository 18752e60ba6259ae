use serde::{Deserialize, Deserializer, Serialize};

use crate::jet::JetPoint;

/// Reads a float that JSON writers emit as `null` when it is not finite.
pub fn nan_as_null<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// The outcome of one checked claim. A failing verdict always carries the
/// point and value that decided it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub metric: String,
    pub pass: bool,
    #[serde(deserialize_with = "nan_as_null")]
    pub witness_value: f64,
    pub witness_point: Option<JetPoint>,
    pub detail: String,
}

impl Verdict {
    pub fn new(
        id: &str,
        metric: &str,
        pass: bool,
        witness_value: f64,
        witness_point: Option<&JetPoint>,
        detail: String,
    ) -> Self {
        Verdict {
            id: id.into(),
            metric: metric.into(),
            pass,
            witness_value,
            witness_point: witness_point.cloned(),
            detail,
        }
    }
}

/// Verdict thresholds; every field can be overridden from a run config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// torsion and metric compatibility of the oracle
    pub koszul: f64,
    pub bracket: f64,
    /// closed-form connection stanzas against the oracle
    pub connection: f64,
    /// a bundle-like or orthogonality defect below this is zero
    pub foliation_zero: f64,
    /// a defect above this is an obstruction
    pub foliation_obstruction: f64,
    pub curvature: f64,
    /// contact metric identities
    pub contact: f64,
    /// `ξ`-row and `ξ`-column of `∇̃φ`
    pub reduction: f64,
    /// `J̄` against `J`
    pub jbar: f64,
    pub nijenhuis: f64,
    /// `N_J` or `R^k_ij` below this counts as zero
    pub flat: f64,
    /// allowed shortfall of the Sasakian obstruction under `λ_min(g_ab)`
    pub obstruction_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            koszul: 1e-8,
            bracket: 1e-8,
            connection: 1e-8,
            foliation_zero: 1e-8,
            foliation_obstruction: 1e-6,
            curvature: 1e-7,
            contact: 1e-9,
            reduction: 1e-7,
            jbar: 1e-10,
            nijenhuis: 1e-7,
            flat: 1e-8,
            obstruction_margin: 1e-6,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 12] = [
        "koszul",
        "bracket",
        "connection",
        "foliation_zero",
        "foliation_obstruction",
        "curvature",
        "contact",
        "reduction",
        "jbar",
        "nijenhuis",
        "flat",
        "obstruction_margin",
    ];

    pub fn get_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "koszul" => &mut self.koszul,
            "bracket" => &mut self.bracket,
            "connection" => &mut self.connection,
            "foliation_zero" => &mut self.foliation_zero,
            "foliation_obstruction" => &mut self.foliation_obstruction,
            "curvature" => &mut self.curvature,
            "contact" => &mut self.contact,
            "reduction" => &mut self.reduction,
            "jbar" => &mut self.jbar,
            "nijenhuis" => &mut self.nijenhuis,
            "flat" => &mut self.flat,
            "obstruction_margin" => &mut self.obstruction_margin,
            _ => return None,
        })
    }
}
