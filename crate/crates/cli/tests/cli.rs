use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodal-lab")).args(args).arg("--out").arg(out).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn passing_experiment_exits_zero_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["theorem1", "--quick"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "theorem1: PASS");
    let report = fs::read_to_string(dir.path().join("theorem1/report.txt")).unwrap();
    for section in ["[inputs]", "[measured]", "[references]", "[checks]", "[tables]"] {
        assert!(report.contains(section), "missing {section}");
    }
    let csv = fs::read_to_string(dir.path().join("theorem1/sweep.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("lambda,nodal_length"), "{header}");
}

#[test]
fn failed_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // An r² above one can never be met.
    let o = lab(&["heat-content", "--quick", "--set", "min_r2=1.5"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("heat-content: FAIL"));
    let report = fs::read_to_string(dir.path().join("heat-content/report.txt")).unwrap();
    assert!(report.contains("verdict = FAIL"), "{report}");
}

#[test]
fn unknown_experiment_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["no-such-thing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for name in ["heat-content", "avoided-crossing", "ball-search", "suite"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["theorem1", "--grid", "many"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["theorem1", "--model", "sphere:1"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["theorem1", "--config", "/definitely/not/here.conf"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["theorem1", "--bogus-flag"], dir.path()).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let o = lab(&["theorem1", "--quick"], &blocker.join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["thin-domain", "--quick", "--seed", "99", "--paths", "2000"];
    assert_eq!(lab(&args, a.path()).status.code(), Some(0));
    assert_eq!(lab(&args, b.path()).status.code(), Some(0));
    for name in ["report.txt", "c_sweep.csv"] {
        let x = fs::read(a.path().join("thin-domain").join(name)).unwrap();
        let y = fs::read(b.path().join("thin-domain").join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let c = tempfile::tempdir().unwrap();
    let other = ["thin-domain", "--quick", "--seed", "100", "--paths", "2000"];
    assert_eq!(lab(&other, c.path()).status.code(), Some(0));
    assert_ne!(
        fs::read(a.path().join("thin-domain/report.txt")).unwrap(),
        fs::read(c.path().join("thin-domain/report.txt")).unwrap()
    );
}

#[test]
fn emit_fields_writes_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["global-survival", "--quick", "--model", "torus:1,1", "--grid", "32", "--emit-fields"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["field_p_t.csv", "field_u.csv"] {
        let text = fs::read_to_string(dir.path().join("global-survival").join(name)).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 33, "{name}");
        assert!(rows[0].starts_with("y\\x,"));
        assert!(rows.iter().all(|r| r.split(',').count() == 33));
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# small run\nmodel = torus:2,2\ngrid = 16\nseed = 5\n").unwrap();
    let o = lab(&["theorem1", "--config", conf.to_str().unwrap(), "--grid", "32"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("theorem1/report.txt")).unwrap();
    assert!(report.contains("models = torus:2,2"), "{report}");
    assert!(report.contains("grid_per_mode = 32"), "{report}");
}
