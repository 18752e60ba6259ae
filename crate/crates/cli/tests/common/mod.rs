use std::path::PathBuf;
use std::process::Command;

/// Run pinned by the golden report.
pub const GOLDEN_CONFIG: &str = "\
metric.name = randers_const
metric.b = 0.25, -0.1
sample.seed = 7
sample.count = 3
suites = all
";

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/randers_const_seed7.json")
}

/// Runs the golden config through the binary and compares with the stored
/// bytes; `FTB_BLESS=1` rewrites the file instead.
pub fn check_golden() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("golden.conf");
    std::fs::write(&cfg, GOLDEN_CONFIG).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_ftb"))
        .args(["verify", "--config"])
        .arg(&cfg)
        .env_remove("FTB_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let path = golden_path();
    if std::env::var_os("FTB_BLESS").is_some() {
        std::fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read(&path)
        .map_err(|e| format!("{}: {e} (run with FTB_BLESS=1 to create)", path.display()))?;
    if want != out.stdout {
        let line = want
            .split(|&b| b == b'\n')
            .zip(out.stdout.split(|&b| b == b'\n'))
            .position(|(a, b)| a != b)
            .map_or(0, |i| i + 1);
        return Err(format!(
            "{} differs from the fresh run (first differing line {line})",
            path.display()
        ));
    }
    Ok(())
}
