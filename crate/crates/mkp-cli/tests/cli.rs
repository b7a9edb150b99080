//! End-to-end tests of the `mkp` binary: exit codes, artifact formats,
//! determinism, and the documented golden outputs.

use std::path::PathBuf;
use std::process::{Command, Output};

use mkp_cli::output::ProfileJson;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mkp"))
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "mkp-cli-test-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const FAM1_SMALL: &str = r#"
family = 1
lambda = [1.0, 2.0]
alpha = [1.0, -1.0, 1.0, 1.0]

[grid]
x = { min = -2.0, max = 2.0, count = 9 }
y = { min = -1.0, max = 1.0, count = 5 }
t = { min = -1.0, max = 1.0, count = 5 }
"#;

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn solve_emits_csv_with_golden_origin_row() {
    let dir = tempdir();
    let cfg = write_config(&dir, "fam1-small.toml", FAM1_SMALL);
    let out = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,t,q"));
    // One row per grid point (9 * 5 * 5), x fastest.
    assert_eq!(text.lines().count(), 1 + 9 * 5 * 5);
    assert!(
        text.lines().any(|l| l == "0,0,0,-0.3333333333333333"),
        "origin row missing:\n{text}"
    );
}

#[test]
fn solve_output_is_deterministic() {
    let dir = tempdir();
    let cfg = write_config(&dir, "fam1-det.toml", FAM1_SMALL);
    let a = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    let b = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "identical config must give byte-identical output");
}

#[test]
fn json_profile_round_trips_bit_exactly() {
    let dir = tempdir();
    let cfg = write_config(&dir, "fam1-json.toml", FAM1_SMALL);
    let out_path = dir.join("profile.json");
    let out = bin()
        .args(["solve", "--format", "json", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let profile: ProfileJson = serde_json::from_str(&text).unwrap();
    let field = profile.into_field().unwrap();

    // Re-ingesting reproduces the directly computed field bit-exactly.
    let params = mkp_core::FamilyParams::new(
        mkp_core::families::Family::One,
        [1.0, 2.0],
        [1.0, -1.0, 1.0, 1.0],
    )
    .unwrap();
    let direct = mkp_core::families::closed_form_field(&params, field.grid()).unwrap();
    for (a, b) in field.values().iter().zip(direct.values()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn pipeline_reports_closed_form_gap() {
    let dir = tempdir();
    let cfg = write_config(&dir, "fam1-pipe.toml", FAM1_SMALL);
    let out = bin().args(["pipeline", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let err = stderr_of(&out);
    assert!(err.contains("max |pipeline - closed form|"), "missing stats: {err}");
}

#[test]
fn invalid_alpha_exits_2_and_names_the_invariant() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "bad-alpha.toml",
        "family = 1\nlambda = [1.0, 2.0]\nalpha = [1.0, 0.0, 1.0, 1.0]\n",
    );
    let out = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out).to_lowercase();
    assert!(err.contains("alpha"), "message must name the violated invariant: {err}");
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "typo.toml",
        "family = 1\nlambda = [1.0, 2.0]\nalpha = [1.0, -1.0, 1.0, 1.0]\nlambdaa = 3\n",
    );
    let out = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
}

#[test]
fn malformed_tol_flag_exits_2() {
    let dir = tempdir();
    let cfg = write_config(&dir, "fam1-tol.toml", FAM1_SMALL);
    let out = bin()
        .args(["verify", "--tol", "gauge_drift", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let out = bin()
        .args(["verify", "--tol", "no_such_tolerance=1.0", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
}

#[test]
fn scan_classifies_the_out_of_region_witness() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "witness.toml",
        "family = 1\nlambda = [1.0, 2.0]\nalpha = [1.0, 1.0, 1.0, 1.0]\n",
    );
    let out = bin().args(["scan", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("classification: neither"), "{text}");
    assert!(text.contains("singularities: 0"), "{text}");
}

#[test]
fn info_prints_wave_coefficients() {
    let dir = tempdir();
    let cfg = write_config(&dir, "fam1-info.toml", FAM1_SMALL);
    let out = bin().args(["info", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("(a, b, c) = (-1, -6, -28)"), "{text}");
    assert!(text.contains("gamma: [2.0, 3.0, 0.0, -1.0]"), "{text}");
}

#[test]
fn verify_default_grid_passes_with_expected_ratio() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "fam1-verify.toml",
        "family = 1\nlambda = [1.0, 2.0]\nalpha = [1.0, -1.0, 1.0, 1.0]\n",
    );
    let report_path = dir.join("report.json");
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let mkp = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "mkp-convergence")
        .expect("report names each check");
    let ratio = mkp["ratio"].as_f64().unwrap();
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn verify_with_unreachable_tolerance_exits_1_and_names_the_check() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "fam1-verify-fail.toml",
        "family = 1\nlambda = [1.0, 2.0]\nalpha = [1.0, -1.0, 1.0, 1.0]\n",
    );
    let report_path = dir.join("report-fail.json");
    let out = bin()
        .args(["verify", "--tol", "block_split=1e-300", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("block-split"), "{}", stderr_of(&out));
    // The report is still written and flags the failing check.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}
