use std::path::PathBuf;

use ftb_core::{
    run_suite, sample_points, FinslerFunction, GeometryError, JetPoint, Metric, SuiteKind,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, PointSource, RunConfig};
use crate::report::{ConfigEcho, Engine, Report};

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "FTB_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// evaluate verdicts; exit 2 if any fails
    Verify,
    /// tabulate quantities only
    Report,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] GeometryError),
    #[error("{THREADS_VAR}: {0}")]
    Threads(String),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Threads(format!("'{v}' is not a positive integer")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Threads(e.to_string()))
}

fn resolve_points(cfg: &RunConfig, m: &Metric) -> Result<Vec<JetPoint>, CliError> {
    let n = m.dim();
    match &cfg.points {
        PointSource::Sampled { seed, count } => Ok(sample_points(n, *seed, *count)?),
        PointSource::Explicit(pts) => {
            if let Some(p) = pts.iter().find(|p| p.dim() != n) {
                return Err(ConfigError::Invalid(format!(
                    "explicit point has dimension {}, metric has {n}",
                    p.dim()
                ))
                .into());
            }
            Ok(pts.clone())
        }
    }
}

/// Runs the configured suites, or `suites` when given.
pub fn run(cfg: &RunConfig, mode: Mode, suites: Option<&[SuiteKind]>) -> Result<Outcome, CliError> {
    let metric = Metric::from_name(&cfg.metric, cfg.dim, cfg.b.clone())?;
    let points = resolve_points(cfg, &metric)?;
    let mut kinds: Vec<SuiteKind> = suites.map_or_else(|| cfg.suites.clone(), <[_]>::to_vec);
    kinds.sort();
    kinds.dedup();

    let pool = thread_pool()?;
    let reports = pool.install(|| {
        kinds
            .iter()
            .map(|&k| run_suite(k, &metric, &points, &cfg.options))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let engine = Engine {
        name: "ftb".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.options.seed,
        count: points.len(),
        tolerances: cfg.options.tol.clone(),
        curvature_extras: cfg.options.curvature_extras,
        jbar_samples: cfg.options.jbar_samples,
    };
    let point_source = match cfg.points {
        PointSource::Sampled { .. } => "sampled",
        PointSource::Explicit(_) => "explicit",
    };
    let config = ConfigEcho {
        metric,
        suites: kinds,
        point_source: point_source.into(),
    };
    let report = Report::assemble(mode, engine, config, points, reports);
    let exit_code = if report.summary.pass {
        EXIT_OK
    } else {
        EXIT_VERDICT
    };
    Ok(Outcome { report, exit_code })
}
