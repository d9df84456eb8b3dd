use std::fs;
use std::process::{Command, Output};

use nilgauss::job::{builtin_job, run, JobConfig, ReportDocument};

fn nilgauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilgauss")).args(args).output().expect("binary runs")
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn lists_builtin_jobs() {
    let out = nilgauss(&["examples"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("nil_foliation_example") && text.contains("nil_vertical_plane"));
}

#[test]
fn vertical_plane_example_passes() {
    let out = nilgauss(&["examples", "nil_vertical_plane"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = ReportDocument::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.summary.all_passed);
    assert_eq!(report.rows.len(), 9);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "bad.json",
        r#"{"algebra": "heisenberg(1)", "chart": {"kind": "expressions", "coords": ["u1", "u2 *", "0"]}, "methods": []}"#,
    );
    let out = nilgauss(&["validate", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no methods requested"), "{err}");
    assert!(err.contains("offset 4"), "{err}");

    let missing = nilgauss(&["sweep", "--config", "/nonexistent/job.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn failing_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "leaf.json",
        r#"{"algebra": "nil", "chart": {"kind": "nil_foliation_leaf"}, "grid": [3, 2],
            "methods": ["general"], "checks": ["harmonicity"]}"#,
    );
    let out = nilgauss(&["compare", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
    let report = ReportDocument::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(!report.summary.checks["harmonicity"].passed);
    assert!(report.summary.checks["oracle"].passed);
    assert!(report.rows[0].methods.contains_key("numeric_oracle"));
}

#[test]
fn report_writes_csv_for_one_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "cyl.json",
        r#"{"algebra": "heisenberg(1)", "chart": {"kind": "nil_cylinder", "f1": "cos(u1)", "f2": "sin(u1)"},
            "methods": ["general", "heisenberg"]}"#,
    );
    let out_path = dir.path().join("row.csv");
    let out = nilgauss(&[
        "report",
        "--config",
        &path,
        "--point",
        "0.8,-0.25",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "u1,u2,mean_curvature,norm_b2,defect,normal_general,normal_heisenberg"
    );
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(&row[..2], &[0.8, -0.25]);
    assert!((row[2] - 0.5).abs() < 1e-8);
    assert!(lines.next().is_none());
}

#[test]
fn seed_override_changes_random_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "rand.json",
        r#"{"algebra": "heisenberg(2)", "chart": {"kind": "random_graph"}, "grid": [2, 2, 2, 2],
            "methods": ["general", "h_type"], "seed": 1}"#,
    );
    let a = nilgauss(&["sweep", "--config", &path]);
    let b = nilgauss(&["sweep", "--config", &path, "--seed", "2"]);
    let again = nilgauss(&["sweep", "--config", &path]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, again.stdout);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn reports_round_trip_bit_exactly() {
    for name in nilgauss::job::BUILTIN_JOBS {
        let report = run(&builtin_job(name).unwrap()).unwrap();
        let text = report.to_json().unwrap();
        let back = ReportDocument::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(run(&back.config_echo).unwrap(), report);
    }
}

#[test]
fn inline_algebra_documents() {
    let text = r#"{
        "algebra": {"dim_total": 3, "dim_center": 1, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}]},
        "model": "exp",
        "chart": {"kind": "graph", "height": "0.3*u1*u2", "axis": 2},
        "grid": [3, 3],
        "methods": ["general", "heisenberg", "numeric_oracle"]
    }"#;
    let report = run(&JobConfig::from_json(text).unwrap()).unwrap();
    assert!(report.summary.checks["oracle"].passed);
    assert!(report.rows.iter().all(|r| r.error.is_none()));
}
