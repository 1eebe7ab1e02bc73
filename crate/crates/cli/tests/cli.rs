use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hardylab_cli::{Report, RunConfig, RunOptions};

fn hardylab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(args)
        .env("HARDYLAB_OUTPUT_DIR", dir)
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn files(dir: &Path, ext: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

const SMALL: &str = r#"
seed = 11

[symbols]
f = "arc(-0.5, 0.5)"
g = "arc(pi - 0.5, pi + 0.5)"
p = "zbar^2 + z"

[[tasks]]
kind = "dilation"
id = "dil"
pairs = [["p", "g"]]
angles = [0.0, 0.5, 1.0]
from = 4
to = 8

[[tasks]]
kind = "identities"
id = "ids"
instances = 4
window = 48

[[tasks]]
kind = "product"
id = "prod"
f = "f"
g = "g"
net = { angles = 4, to = 6 }
"#;

#[test]
fn undefined_symbol_exits_2_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[[tasks]]\nkind = \"hartman\"\nid = \"h\"\nsymbol = \"nope\"\n");
    let out = hardylab(dir.path(), &["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undefined symbol `nope`"));
    assert!(files(dir.path(), "json").is_empty() && files(dir.path(), "csv").is_empty());
}

#[test]
fn unparsable_symbol_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[symbols]\nbad = \"arc(0, \"\n");
    let out = hardylab(dir.path(), &["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("symbol `bad`"));
    assert!(files(dir.path(), "json").is_empty());
}

#[test]
fn bad_task_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "[symbols]\nf = \"z\"\n[[tasks]]\nkind = \"hartman\"\nid = \"h\"\nsymbol = \"f\"\nsizes = [64, 32]\n",
        "[[tasks]]\nkind = \"identities\"\nid = \"a\"\n[[tasks]]\nkind = \"identities\"\nid = \"a\"\n",
        "[[tasks]]\nkind = \"identities\"\nid = \"../escape\"\n",
        "preset = \"paper-suite\"\n[symbols]\none = \"2\"\n",
    ] {
        let cfg = write_config(dir.path(), body);
        assert_eq!(hardylab(dir.path(), &["run", &cfg]).status.code(), Some(2), "{body}");
    }
    assert!(files(dir.path(), "json").is_empty());
}

#[test]
fn empty_task_list_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 3\n[symbols]\nf = \"z\"\n");
    let out = hardylab(dir.path(), &["run", &cfg, "--stamp", "empty"]);
    assert_eq!(out.status.code(), Some(0));
    let report = Report::read(&dir.path().join("report-empty.json")).unwrap();
    assert!(report.tasks.is_empty());
    assert_eq!(report.config["seed"], 3);
    assert_eq!(report.config["symbols"]["f"], "z");
    assert_eq!(report.schema_version, 1);
}

#[test]
fn reruns_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for stamp in ["one", "two"] {
        let out = hardylab(dir.path(), &["run", &cfg, "--stamp", stamp, "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
    for task in ["dil", "prod"] {
        let a = fs::read(dir.path().join(format!("{task}-one.csv"))).unwrap();
        let b = fs::read(dir.path().join(format!("{task}-two.csv"))).unwrap();
        assert_eq!(a, b, "{task}");
    }
    let mut one = Report::read(&dir.path().join("report-one.json")).unwrap();
    let mut two = Report::read(&dir.path().join("report-two.json")).unwrap();
    assert_eq!(one.resummarize(), one.summary);
    one.run = two.run.clone();
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&two).unwrap());

    // A different seed changes the random instances.
    let out = hardylab(dir.path(), &["run", &cfg, "--stamp", "three", "--seed", "12", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    two = Report::read(&dir.path().join("report-three.json")).unwrap();
    assert_ne!(one.tasks[1].details["records"], two.tasks[1].details["records"]);
}

#[test]
fn csv_shape_and_verdict_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(hardylab(dir.path(), &["run", &cfg, "--stamp", "s", "--quiet"]).status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("dil-s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("task,angle,radius,tag,value,error_bar"));
    // 3 angles × 5 radii × 2 tags.
    assert_eq!(lines.count(), 30);

    let report = Report::read(&dir.path().join("report-s.json")).unwrap();
    let prod = report.tasks.iter().find(|t| t.id == "prod").unwrap();
    for key in ["outcome", "thresholds", "per_angle_case", "fits", "notes", "trivial"] {
        assert!(prod.details.get(key).is_some(), "missing {key}");
    }
    for key in ["tau_compact", "tau_noncompact", "slope", "plateau_factor", "trend_window"] {
        assert!(prod.details["thresholds"].get(key).is_some(), "missing threshold {key}");
    }
    assert_eq!(report.run.curve_files["prod"], "prod-s.csv");
    let ids = &report.tasks.iter().find(|t| t.id == "ids").unwrap().details;
    assert_eq!(ids["adjudications"][0]["winner"], "P3b");
    assert_eq!(ids["records"][0]["residuals"]["P1"]["certified"], true);
}

#[test]
fn stamps_never_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    for _ in 0..2 {
        assert_eq!(hardylab(dir.path(), &["run", &cfg, "--stamp", "same", "--quiet"]).status.code(), Some(0));
    }
    assert!(dir.path().join("report-same.json").exists());
    assert!(dir.path().join("report-same-1.json").exists());
}

#[test]
fn failed_expectation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = hardylab(dir.path(), &["compactness", "arc(0, pi)", "--sizes", "64,128,256", "--expect", "compact"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hardylab(dir.path(), &["compactness", "zbar^2 + 3*zbar", "--sizes", "64,128", "--expect", "compact"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn flag_overrides_env_for_output_dir() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(["check-identities", "--instances", "2", "--output-dir", flag_dir.path().to_str().unwrap()])
        .env("HARDYLAB_OUTPUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(files(flag_dir.path(), "json").len(), 1);
    assert!(files(env_dir.path(), "json").is_empty());
}

#[test]
fn product_subcommand_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = hardylab(dir.path(), &["product", "arc(-0.5, 0.5)", "1", "--angles", "2", "--to", "5", "--stamp", "p"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("product"), "{stdout}");
    assert!(dir.path().join("product-p.csv").exists());
}

#[test]
fn library_run_matches_config_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { output_dir: Some(dir.path().join("nested")), ..RunConfig::default() };
    let out = hardylab_cli::run(cfg, &RunOptions { stamp: Some("lib".into()), ..RunOptions::default() }).unwrap();
    assert_eq!(out.exit_code(), 0);
    assert!(dir.path().join("nested/report-lib.json").exists());
    assert!(out.report.config.get("output_dir").is_none());
}
