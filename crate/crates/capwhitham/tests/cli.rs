//! End-to-end runs of the batch front-end on the small preset.

use capwhitham::cli::{load_config, run, Mode, RunConfig};
use capwhitham::error::Error;

fn config_in(dir: &std::path::Path, mode: Mode) -> RunConfig {
    let mut cfg = load_config(Some("whitham-small"), None, None, None).unwrap();
    cfg.mode = mode;
    cfg.coeffs = dir.join("u0.txt");
    cfg.certificate = dir.join("cert.json");
    cfg.profile_csv = dir.join("profile.csv");
    cfg.sweep_csv = dir.join("sweep.csv");
    cfg.profile_points = 201;
    cfg
}

fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.contains("\"created_unix\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn later_stages_require_earlier_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    for mode in [Mode::Prove, Mode::Stability, Mode::Recheck, Mode::Export] {
        let err = run(&config_in(dir.path(), mode)).unwrap_err();
        assert!(matches!(err, Error::Io(_)), "{mode:?}: {err}");
        assert_eq!(err.exit_code(), 5);
    }
}

#[test]
fn solve_prove_recheck_export() {
    let dir = tempfile::tempdir().unwrap();
    run(&config_in(dir.path(), Mode::Solve)).unwrap();
    let report = run(&config_in(dir.path(), Mode::Prove)).unwrap();
    assert!(report.contains("Z1"));
    let first = std::fs::read_to_string(dir.path().join("cert.json")).unwrap();
    assert!(first.contains("\"input_digest\": \""));

    run(&config_in(dir.path(), Mode::Prove)).unwrap();
    let second = std::fs::read_to_string(dir.path().join("cert.json")).unwrap();
    assert_eq!(strip_timestamp(&first), strip_timestamp(&second));

    assert!(run(&config_in(dir.path(), Mode::Recheck)).unwrap().contains("recheck: ok"));

    run(&config_in(dir.path(), Mode::Export)).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 201);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    assert!(rows.iter().all(|r| r[1] <= r[2]));

    let tampered = second.replacen("\"r\": ", "\"r\": 1", 1);
    std::fs::write(dir.path().join("cert.json"), tampered).unwrap();
    let err = run(&config_in(dir.path(), Mode::Recheck)).unwrap_err();
    assert!(matches!(err, Error::VerificationFailed(_) | Error::Parse(_)), "{err}");
}

#[test]
fn config_file_overrides_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# small run\nmode = solve\nN = 64\nd = 12\n").unwrap();
    let cfg = load_config(Some("thm-T05"), Some(&path), None, None).unwrap();
    assert_eq!((cfg.mode, cfg.t, cfg.n, cfg.d), (Mode::Solve, 0.5, 64, 12.0));
}
