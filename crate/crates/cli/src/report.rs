//! The JSON report written by `ftb verify` and `ftb report`.

use std::io;

use ftb_core::suite::BracketDiscrepancy;
use ftb_core::{Discrepancy, JetPoint, Metric, SuiteKind, SuiteReport, Tolerances, Verdict};
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::run::Mode;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, serde::Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub mode: Mode,
    pub engine: Engine,
    pub config: ConfigEcho,
    pub points: Vec<JetPoint>,
    /// per-suite data; verdicts and discrepancies are hoisted to the top level
    pub suites: Vec<SuiteReport>,
    pub verdicts: Vec<SuiteVerdict>,
    pub discrepancies: Vec<ReportDiscrepancy>,
    pub summary: Summary,
}

#[derive(Clone, Debug, serde::Serialize, Deserialize)]
pub struct Engine {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub count: usize,
    pub tolerances: Tolerances,
    pub curvature_extras: usize,
    pub jbar_samples: usize,
}

#[derive(Clone, Debug, serde::Serialize, Deserialize)]
pub struct ConfigEcho {
    pub metric: Metric,
    pub suites: Vec<SuiteKind>,
    /// `sampled` or `explicit`
    pub point_source: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct SuiteVerdict {
    pub suite: SuiteKind,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, serde::Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
pub enum ReportDiscrepancy {
    Brackets(BracketDiscrepancy),
    Connection(Discrepancy),
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    pub fn of(verdicts: &[SuiteVerdict]) -> Self {
        let passed = verdicts.iter().filter(|v| v.verdict.pass).count();
        Summary {
            pass: passed == verdicts.len(),
            total: verdicts.len(),
            passed,
            failed: verdicts.len() - passed,
        }
    }
}

impl Report {
    /// Moves verdicts and discrepancies out of the suite payloads.
    pub fn assemble(
        mode: Mode,
        engine: Engine,
        config: ConfigEcho,
        points: Vec<JetPoint>,
        mut suites: Vec<SuiteReport>,
    ) -> Self {
        let mut verdicts = Vec::new();
        let mut discrepancies = Vec::new();
        for s in &mut suites {
            let kind = s.kind();
            verdicts.extend(std::mem::take(s.verdicts_mut()).into_iter().map(|verdict| {
                SuiteVerdict {
                    suite: kind,
                    verdict,
                }
            }));
            match s {
                SuiteReport::Brackets(b) => discrepancies.extend(
                    std::mem::take(&mut b.discrepancies)
                        .into_iter()
                        .map(ReportDiscrepancy::Brackets),
                ),
                SuiteReport::Connection(c) => discrepancies.extend(
                    std::mem::take(&mut c.discrepancies)
                        .into_iter()
                        .map(ReportDiscrepancy::Connection),
                ),
                _ => {}
            }
        }
        if mode == Mode::Report {
            verdicts.clear();
        }
        let summary = Summary::of(&verdicts);
        Report {
            schema_version: SCHEMA_VERSION.into(),
            mode,
            engine,
            config,
            points,
            suites,
            verdicts,
            discrepancies,
            summary,
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &SuiteVerdict> {
        self.verdicts.iter().filter(|v| !v.verdict.pass)
    }
}

/// Pretty printing with every float written to 17 significant digits, so a
/// parsed report re-serializes to the same bytes.
struct Exact<'a>(PrettyFormatter<'a>);

impl Formatter for Exact<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value in the report format, with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        Exact(PrettyFormatter::with_indent(b"  ")),
    );
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_every_bit() {
        for v in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            1e300,
            f64::MIN_POSITIVE,
            0.0,
            -0.0,
        ] {
            let s = to_json(&v).unwrap();
            let back: f64 = serde_json::from_slice(&s).unwrap();
            assert_eq!(
                back.to_bits(),
                v.to_bits(),
                "{}",
                String::from_utf8_lossy(&s)
            );
        }
    }

    #[test]
    fn non_finite_witness_becomes_null_and_back() {
        let v = Verdict::new("x", "euclidean", false, f64::NAN, None, String::new());
        let s = to_json(&v).unwrap();
        assert!(String::from_utf8_lossy(&s).contains("\"witness_value\": null"));
        let back: Verdict = serde_json::from_slice(&s).unwrap();
        assert!(back.witness_value.is_nan());
        assert_eq!(to_json(&back).unwrap(), s);
    }
}
