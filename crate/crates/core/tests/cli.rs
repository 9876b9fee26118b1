//! End-to-end runs of the `cimbench` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cimbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cimbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join("report.json")).unwrap()).unwrap()
}

const THREE_LINES: &str = r#"
name = "three-lines"
ambient_dim = 2
[instance]
source = "explicit"
subspaces = [
  { anchor = [0.0, 0.0], span = [[1.0, 0.0]] },
  { anchor = [0.0, 0.0], span = [[1.0, 1.0]] },
  { anchor = [0.0, 0.0], span = [[0.0, 1.0]] },
]
[[methods]]
name = "map"
method = "map"
[[methods]]
name = "dr"
method = "dr"
"#;

#[test]
fn run_writes_report_and_csvs() {
    let out = tempfile::tempdir().unwrap();
    let res = cimbench(&["run", &config("random10.toml"), "--out", path_str(out.path())]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
    let r = report(out.path());
    assert_eq!(r["passed"], true);
    assert_eq!(r["methods"].as_array().unwrap().len(), 9);
    let trace = fs::read_to_string(out.path().join("crm_psi.trace.csv")).unwrap();
    assert!(trace.starts_with("k,x_norm,error,step_norm\n"));
    let audit = fs::read_to_string(out.path().join("crm_psi.gamma.audit.csv")).unwrap();
    assert!(audit.starts_with("k,error,bound,slack\n"));
}

#[test]
fn json_format_embeds_traces() {
    let out = tempfile::tempdir().unwrap();
    let res = cimbench(&[
        "run",
        &config("demo.toml"),
        "--out",
        path_str(out.path()),
        "--format",
        "json",
        "--max-iters",
        "5",
    ]);
    assert_eq!(res.status.code(), Some(0));
    let r = report(out.path());
    let rows = r["methods"][0]["trace"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let csvs = fs::read_dir(out.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(csvs, 0);
}

#[test]
fn seed_flag_changes_random_instances() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    cimbench(&["rates", &config("random10.toml"), "--out", path_str(a.path()), "--seed", "1"]);
    cimbench(&["rates", &config("random10.toml"), "--out", path_str(b.path()), "--seed", "2"]);
    let ra = fs::read(a.path().join("rates.json")).unwrap();
    let rb = fs::read(b.path().join("rates.json")).unwrap();
    assert_ne!(ra, rb);
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["seed"], 1);
    assert!(v["constants"]["values"]["gamma"].as_f64().unwrap() < 1.0);
}

#[test]
fn method_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg: PathBuf = dir.path().join("three.toml");
    fs::write(&cfg, THREE_LINES).unwrap();
    let out = dir.path().join("out");
    let res = cimbench(&["run", path_str(&cfg), "--out", path_str(&out)]);
    assert_eq!(res.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["methods"][1]["status"], "error");
    assert_eq!(r["methods"][0]["status"], "ok");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, THREE_LINES.replace("method = \"dr\"", "method = \"dr\"\nspeed = 3")).unwrap();
    let res = cimbench(&["run", path_str(&cfg)]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("speed"), "{err}");
    assert_eq!(cimbench(&["run"]).status.code(), Some(2));
    assert_eq!(cimbench(&["run", "/nonexistent/config.toml"]).status.code(), Some(2));
}

#[test]
fn demo_reports_the_reflector_fixed_line() {
    let out = tempfile::tempdir().unwrap();
    let res = cimbench(&["demo", "--out", path_str(out.path())]);
    assert_eq!(res.status.code(), Some(0));
    let fixed: serde_json::Value =
        serde_json::from_slice(&fs::read(out.path().join("fixed_set.json")).unwrap()).unwrap();
    assert_eq!(fixed["fixed_dim"], 1);
    assert_eq!(fixed["intersection_dim"], 0);
}
