use std::path::Path;
use std::process::{Command, Output};

use ftb_cli::report::Report;
use ftb_cli::{to_json, Mode};

mod common;

fn ftb(dir: &Path, config: &str, args: &[&str], threads: Option<&str>) -> Output {
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ftb"));
    cmd.args(args).arg("--config").arg(&cfg).current_dir(dir);
    match threads {
        Some(t) => cmd.env("FTB_THREADS", t),
        None => cmd.env_remove("FTB_THREADS"),
    };
    cmd.output().unwrap()
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}\nstderr: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn euclidean_plane_passes_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftb(
        dir.path(),
        "metric.name = euclidean\nmetric.dim = 2\nsample.seed = 7\nsample.count = 6\n",
        &["verify"],
        None,
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(0), "{stderr}");
    let r = report(&out);
    assert_eq!(r.schema_version, "1");
    assert_eq!(r.mode, Mode::Verify);
    assert_eq!(r.suites.len(), 5);
    assert!(r.summary.pass && r.summary.total == r.verdicts.len() && r.summary.total > 0);
    assert_eq!(
        stderr.lines().filter(|l| l.starts_with("PASS ")).count(),
        r.summary.total
    );
}

#[test]
fn constant_randers_breaks_vprime_bundle_likeness() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftb(
        dir.path(),
        "metric.name = randers_const\nmetric.b = 0.3, 0.1\nsample.seed = 3\nsample.count = 5\nsuites = foliation\n",
        &["verify"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let v = r
        .verdicts
        .iter()
        .find(|v| v.verdict.id == "vprime_bundle_like_iff_riemannian")
        .unwrap();
    assert!(v.verdict.pass);
    assert!(v.verdict.witness_value > 1e-3, "{v:?}");
    assert!(v.verdict.witness_point.is_some());
}

#[test]
fn zero_fiber_vector_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftb(
        dir.path(),
        "metric.name = euclidean\nsample.point.1 = 0.5, 0.5; 0, 0\n",
        &["verify"],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slit bundle violated"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_metric_and_malformed_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in [
        "metric.name = kropina\n",
        "metric.name = euclidean\nsample.count = ten\n",
        "metric.name = randers_const\nmetric.b = 1.5, 0\n",
        "metric.name = riemannian2d\nmetric.dim = 3\n",
        "metric.name = euclidean\nmetric.dim = 3\nsample.point.1 = 0, 0; 1, 0\n",
    ] {
        let out = ftb(dir.path(), cfg, &["verify"], None);
        assert_eq!(out.status.code(), Some(1), "{cfg}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error: "),
            "{cfg}"
        );
    }
    let out = ftb(
        dir.path(),
        "metric.name = euclidean\n",
        &["verify"],
        Some("zero"),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_suite_list_writes_metadata_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftb(
        dir.path(),
        "metric.name = euclidean\nsample.count = 3\nsuites =\n",
        &["verify"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r.suites.is_empty() && r.verdicts.is_empty() && r.discrepancies.is_empty());
    assert_eq!(r.points.len(), 3);
    assert_eq!(r.engine.count, 3);
}

#[test]
fn report_mode_has_no_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftb(
        dir.path(),
        "metric.name = randers_var\nsample.count = 2\n",
        &["report", "--suite", "contact", "--suite", "foliation"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.mode, Mode::Report);
    assert!(r.verdicts.is_empty());
    assert_eq!(
        r.suites.iter().map(|s| s.kind().name()).collect::<Vec<_>>(),
        ["foliation", "contact"]
    );
    assert!(r.suites.iter().all(|s| s.verdicts().is_empty()));
}

#[test]
fn discrepancies_round_trip_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    // the primary connection reading disagrees with the oracle on this metric
    let out = ftb(
        dir.path(),
        "metric.name = randers_var\nmetric.dim = 2\nsample.seed = 1\nsample.count = 3\nsuites = connection, brackets\n",
        &["verify"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(!r.discrepancies.is_empty());
    assert_eq!(to_json(&r).unwrap(), out.stdout);
}

#[test]
fn thread_count_does_not_change_the_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "metric.name = randers_var\nmetric.dim = 3\nsample.seed = 11\nsample.count = 4\nsuites = all\n";
    let one = ftb(dir.path(), cfg, &["verify"], Some("1"));
    let four = ftb(dir.path(), cfg, &["verify"], Some("4"));
    assert_eq!(
        one.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn out_flag_and_output_path_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftb(
        dir.path(),
        "metric.name = euclidean\nsample.count = 2\nsuites = brackets\noutput.path = from_config.json\n",
        &["verify"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let bytes = std::fs::read(dir.path().join("from_config.json")).unwrap();
    let _: Report = serde_json::from_slice(&bytes).unwrap();

    let target = dir.path().join("flag.json");
    let out = ftb(
        dir.path(),
        "metric.name = euclidean\nsample.count = 2\nsuites = brackets\noutput.path = ignored.json\n",
        &["verify", "--out", target.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&target).unwrap(), bytes);
    assert!(!dir.path().join("ignored.json").exists());
}

#[test]
fn list_metrics_names_every_builtin() {
    let out = Command::new(env!("CARGO_BIN_EXE_ftb"))
        .arg("list-metrics")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ftb_core::metrics::METRIC_NAMES {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn golden_report_is_byte_exact() {
    common::check_golden().unwrap();
}
