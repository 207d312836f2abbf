//! End-to-end runs of the `friedlab` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use friedlab::ScenarioFile;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn friedlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_friedlab"))
        .args(args)
        .env_remove("FRIEDLAB_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn check(file: &Path, kind: &str) -> Output {
    friedlab(&["check", file.to_str().unwrap(), "--kind", kind])
}

#[test]
fn cyclic3_passes_every_applicable_check() {
    for kind in ["fried", "atiyah-bott", "cutoff", "abel"] {
        let out = check(&fixture("cyclic3.json"), kind);
        assert_eq!(code(&out), 0, "{kind}: {}", stdout(&out));
        assert!(stdout(&out).trim_end().ends_with("PASS"));
    }
}

#[test]
fn skewed_cutoffs_fail_with_exit_1() {
    let out = check(&fixture("skewed.json"), "cutoff");
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).trim_end().ends_with("FAIL"));
}

#[test]
fn non_acyclic_spectrum_is_an_input_error() {
    for name in ["sphere.json", "circle.json"] {
        let out = check(&fixture(name), "fried");
        assert_eq!(code(&out), 2, "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("acyclic"), "{name}");
    }
}

#[test]
fn tolerance_override_can_force_failure() {
    let out = friedlab(&["check", fixture("cyclic3.json").to_str().unwrap(), "--kind", "abel", "--tol", "1e-12"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_and_malformed_files_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&check(&missing, "fried")), 2);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"name\": \"x\", ").unwrap();
    let out = check(&broken, "fried");
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.json"));

    let dynamics_only = dir.path().join("dyn.json");
    let mut file: ScenarioFile = friedlab::parse_scenario(fixture("cyclic3.json")).unwrap();
    file.spectrum = None;
    std::fs::write(&dynamics_only, file.to_json()).unwrap();
    assert_eq!(code(&check(&dynamics_only, "fried")), 2);
}

#[test]
fn fixtures_round_trip() {
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        let first = friedlab::parse_scenario(&path).unwrap();
        let second = ScenarioFile::from_json(&first.to_json()).unwrap();
        assert_eq!(first, second, "{}", path.display());
    }
}

fn sweep(file: &Path, out: &Path) -> Output {
    friedlab(&["sweep", file.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn sweep_is_deterministic_and_satisfies_fried() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&sweep(&fixture("cyclic3.json"), &a)), 0);
    assert_eq!(code(&sweep(&fixture("cyclic3.json"), &b)), 0);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());

    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let headers = reader.headers().unwrap().clone();
    let re_col = headers.iter().position(|h| h == "fried_residual_re").unwrap();
    let status_col = headers.iter().position(|h| h == "status").unwrap();
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert_eq!(&row[status_col], "ok");
        let re: f64 = row[re_col].parse().unwrap();
        let im: f64 = row[re_col + 1].parse().unwrap();
        let residual = re.hypot(im);
        assert!(residual <= 1e-9, "{residual}");
    }
}

#[test]
fn sweep_flags_domain_rows_and_handles_empty_grids() {
    let dir = TempDir::new().unwrap();
    let mut file = friedlab::parse_scenario(fixture("cyclic3.json")).unwrap();
    let grid = file.sweep.as_mut().unwrap();
    grid.start = -1.0;
    grid.stop = 1.0;
    grid.count = 3;
    let shifted = dir.path().join("shifted.json");
    std::fs::write(&shifted, file.to_json()).unwrap();
    let out = dir.path().join("shifted.csv");
    assert_eq!(code(&sweep(&shifted, &out)), 0);
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let status: Vec<String> = reader.records().map(|r| r.unwrap()[19].to_string()).collect();
    assert_eq!(status, ["domain", "domain", "ok"]);

    file.sweep.as_mut().unwrap().count = 0;
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, file.to_json()).unwrap();
    let out = dir.path().join("empty.csv");
    assert_eq!(code(&sweep(&empty, &out)), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("sigma_re,sigma_im,"));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("missing-dir").join("out.csv");
    assert_eq!(code(&sweep(&fixture("cyclic3.json"), &out)), 2);
}

#[test]
fn mellin_oracle_prints_both_values() {
    let out = friedlab(&["oracle", "mellin", "--n", "1", "--sigma", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("mellin") && text.contains("closed form"));
    assert_eq!(code(&friedlab(&["oracle", "mellin", "--n", "1", "--sigma", "-1"])), 2);
}

#[test]
fn suite_seed_comes_from_flag_or_environment() {
    let out = friedlab(&["suite", "--count", "5", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("seed 7:"));

    let out = Command::new(env!("CARGO_BIN_EXE_friedlab"))
        .args(["suite", "--count", "5"])
        .env("FRIEDLAB_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("seed 11:"));

    let default = friedlab(&["suite", "--count", "5"]);
    assert!(stdout(&default).starts_with(&format!("seed {}:", friedlab::report::DEFAULT_SEED)));
}
