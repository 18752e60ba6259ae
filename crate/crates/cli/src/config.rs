//! Flat `key = value` run configuration, one dotted key per line.
//!
//! ```text
//! # comments and blank lines are ignored
//! metric.name = randers_const
//! metric.dim = 2
//! metric.b = 0.1, 0.0
//! sample.seed = 7
//! sample.count = 20
//! sample.point.1 = 0.0, 0.0; 1.0, 0.0
//! tol.connection = 1e-8
//! suites = foliation, contact
//! output.path = report.json
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ftb_core::{GeometryError, JetPoint, SuiteKind, SuiteOptions, Tolerances};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{key}: {source}")]
    Domain {
        key: String,
        #[source]
        source: GeometryError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointSource {
    Sampled { seed: u64, count: usize },
    Explicit(Vec<JetPoint>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub metric: String,
    pub dim: Option<usize>,
    pub b: Option<Vec<f64>>,
    pub points: PointSource,
    pub suites: Vec<SuiteKind>,
    pub options: SuiteOptions,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_COUNT: usize = 20;

fn floats(key: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError::Invalid(format!("{key}: '{t}' is not a finite number")))
        })
        .collect()
}

fn parse_point(key: &str, s: &str) -> Result<JetPoint, ConfigError> {
    let (x, y) = s
        .split_once(';')
        .ok_or_else(|| ConfigError::Invalid(format!("{key}: expected 'x1, .., xn; y1, .., yn'")))?;
    JetPoint::new(floats(key, x)?, floats(key, y)?).map_err(|source| ConfigError::Domain {
        key: key.into(),
        source,
    })
}

pub fn parse_suites(s: &str) -> Result<Vec<SuiteKind>, ConfigError> {
    let s = s.trim();
    if s == "all" {
        return Ok(SuiteKind::ALL.to_vec());
    }
    let mut out: Vec<SuiteKind> = Vec::new();
    for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let k: SuiteKind = t
            .parse()
            .map_err(|e: GeometryError| ConfigError::Invalid(e.to_string()))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out.sort();
    Ok(out)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        text.parse()
    }
}

impl std::str::FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected 'key = value', got '{body}'"),
            })?;
            let k = k.trim().to_string();
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("bad key '{k}'"),
                });
            }
            if kv.insert(k.clone(), (line, v.trim().to_string())).is_some() {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("duplicate key '{k}'"),
                });
            }
        }

        let mut metric = None;
        let mut dim = None;
        let mut b = None;
        let mut seed = None;
        let mut count = None;
        let mut points: BTreeMap<u64, JetPoint> = BTreeMap::new();
        let mut suites = None;
        let mut options = SuiteOptions::default();
        let mut output = None;
        for (key, (line, v)) in &kv {
            let int = |v: &str| {
                v.parse::<u64>().map_err(|_| ConfigError::Syntax {
                    line: *line,
                    message: format!("{key}: '{v}' is not a non-negative integer"),
                })
            };
            match key.as_str() {
                "metric.name" => metric = Some(v.clone()),
                "metric.dim" => dim = Some(int(v)? as usize),
                "metric.b" => b = Some(floats(key, v)?),
                "sample.seed" => seed = Some(int(v)?),
                "sample.count" => count = Some(int(v)? as usize),
                "suites" => suites = Some(parse_suites(v)?),
                "output.path" => output = Some(PathBuf::from(v)),
                "suite.curvature_extras" => options.curvature_extras = int(v)? as usize,
                "suite.jbar_samples" => options.jbar_samples = int(v)? as usize,
                _ => {
                    if let Some(idx) = key.strip_prefix("sample.point.") {
                        let idx = int(idx)?;
                        points.insert(idx, parse_point(key, v)?);
                    } else if let Some(t) = key.strip_prefix("tol.") {
                        let slot = options.tol.get_mut(t).ok_or_else(|| ConfigError::Syntax {
                            line: *line,
                            message: format!(
                                "unknown tolerance '{t}' (known: {})",
                                Tolerances::KEYS.join(", ")
                            ),
                        })?;
                        let x = floats(key, v)?;
                        if x.len() != 1 || x[0] <= 0.0 {
                            return Err(ConfigError::Invalid(format!(
                                "{key}: tolerance must be a single positive number"
                            )));
                        }
                        *slot = x[0];
                    } else {
                        return Err(ConfigError::Syntax {
                            line: *line,
                            message: format!("unknown key '{key}'"),
                        });
                    }
                }
            }
        }
        let metric =
            metric.ok_or_else(|| ConfigError::Invalid("metric.name is required".into()))?;
        let seed = seed.unwrap_or(DEFAULT_SEED);
        options.seed = seed;
        let points = if points.is_empty() {
            PointSource::Sampled {
                seed,
                count: count.unwrap_or(DEFAULT_COUNT),
            }
        } else {
            if count.is_some() {
                return Err(ConfigError::Invalid(
                    "sample.count and sample.point.N are mutually exclusive".into(),
                ));
            }
            PointSource::Explicit(points.into_values().collect())
        };
        Ok(RunConfig {
            metric,
            dim,
            b,
            points,
            suites: suites.unwrap_or_else(|| SuiteKind::ALL.to_vec()),
            options,
            output,
        })
    }
}
