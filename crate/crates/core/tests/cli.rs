use std::fs;
use std::path::Path;
use std::process::Command;

use mesc_core::orchestrator::output::read_report;
use tempfile::TempDir;

const TWO_BUS: &str = r#"{
    "name": "two",
    "horizon": 4,
    "buses": [{"id": 1, "reference": true}, {"id": 2}],
    "lines": [{"id": "L1", "from": 1, "to": 2, "x": 0.1, "f_max": 10}],
    "generators": [{"id": "G1", "bus": 1, "a": 10, "b": 20, "p_min": 0, "p_max": 100}],
    "ports": [{"id": 1, "bus": 1}, {"id": 2, "bus": 2}],
    "ships": [{"id": "PS1", "initial_port": 1,
        "generation": {"b": 15.0, "p_min": 0, "p_max": 30},
        "sailing_cost": 5, "entering_cost": 5, "departure_cost": 5, "waiting_cost": 1, "travel_time": 1}],
    "demand": [[0, 0, 0, 0], [5, 25, 25, 25]]
}"#;

fn mesc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mesc")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_writes_all_outputs_and_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let inst = write(tmp.path(), "two.json", TWO_BUS);
    let out = tmp.path().join("run");
    let (code, stdout, _) = mesc(&["solve", "--instance", &inst, "--approach", "mesc-i", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("MESC-I"));
    for f in ["report.json", "summary.csv", "timeline.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let timeline = fs::read_to_string(out.join("timeline.csv")).unwrap();
    assert_eq!(timeline.lines().next().unwrap(), "approach,hour,PS1_L,PS1_P");
    assert_eq!(timeline.lines().count(), 5);
    assert!(timeline.lines().nth(1).unwrap().starts_with("MESC-I,1,1>2,"));
    let report = read_report(&out.join("report.json")).unwrap();
    assert_eq!(report.status, "optimal");
}

#[test]
fn compare_lists_each_approach() {
    let tmp = TempDir::new().unwrap();
    let inst = write(tmp.path(), "two.json", TWO_BUS);
    let out = tmp.path().join("cmp");
    let (code, _, _) =
        mesc(&["compare", "--instance", &inst, "--approaches", "gcuc,mesc-sq,mesc-is", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let approaches: Vec<&str> = summary.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(approaches, ["GCUC", "MESC-Sq", "MESC-IS"]);
}

#[test]
fn validate_accepts_solver_output_and_rejects_tampering() {
    let tmp = TempDir::new().unwrap();
    let inst = write(tmp.path(), "two.json", TWO_BUS);
    let out = tmp.path().join("run");
    let (code, _, _) = mesc(&["solve", "--instance", &inst, "--approach", "mesc-i", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = out.join("report.json");
    let (code, stdout, _) = mesc(&["validate", "--instance", &inst, "--solution", report.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");

    let mut value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    value["flows"][0][2] = serde_json::json!(99.0);
    let bad = write(tmp.path(), "bad.json", &value.to_string());
    let (code, stdout, _) = mesc(&["validate", "--instance", &inst, "--solution", &bad]);
    assert_eq!(code, 3, "{stdout}");
    assert!(stdout.contains("FAIL"));
}

#[test]
fn input_errors_exit_four() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.json");
    let (code, _, stderr) = mesc(&["validate", "--instance", missing.to_str().unwrap()]);
    assert_eq!(code, 4, "{stderr}");

    let broken = write(tmp.path(), "broken.json", &TWO_BUS.replace("\"x\": 0.1", "\"x\": \"tenth\""));
    let (code, _, stderr) = mesc(&["validate", "--instance", &broken]);
    assert_eq!(code, 4);
    assert!(stderr.contains("lines"), "{stderr}");

    let bad_ref = write(tmp.path(), "ref.json", &TWO_BUS.replace("\"initial_port\": 1", "\"initial_port\": 9"));
    let (code, _, _) = mesc(&["solve", "--instance", &bad_ref, "--approach", "gcuc", "--out", "unused"]);
    assert_eq!(code, 4);

    let inst = write(tmp.path(), "two.json", TWO_BUS);
    let (code, _, _) = mesc(&["solve", "--instance", &inst, "--approach", "mesc", "--out", "unused"]);
    assert_eq!(code, 4);
}

#[test]
fn infeasible_instance_exits_three() {
    let tmp = TempDir::new().unwrap();
    let text = TWO_BUS.replace(
        "\"demand\": [[0, 0, 0, 0], [5, 25, 25, 25]]",
        "\"demand\": [[0, 0, 0, 0], [5, 25, 25, 25]], \"shed_factor\": [[0, 0, 0, 0], [0, 0, 0, 0]]",
    );
    let inst = write(tmp.path(), "tight.json", &text);
    let out = tmp.path().join("run");
    let (code, stdout, _) = mesc(&["solve", "--instance", &inst, "--approach", "gcuc", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3, "{stdout}");
    assert!(stdout.contains("infeasible"));
}

#[test]
fn export_lp_writes_model() {
    let tmp = TempDir::new().unwrap();
    let inst = write(tmp.path(), "two.json", TWO_BUS);
    let lp = tmp.path().join("model.lp");
    let (code, stdout, _) = mesc(&["export-lp", "--instance", &inst, "--approach", "mesc-is", "--out", lp.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize"));
    assert!(text.contains("VS(PS1,1,2,1)"));
}
