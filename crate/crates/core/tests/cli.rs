use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn lorcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorcone")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key:?} in\n{text}"))
        .to_string()
}

#[test]
fn tau_on_the_flat_cone() {
    let c = config("flat.json");
    let o = lorcone(&["--config", c.to_str().unwrap(), "tau", "0;0,0", "2;1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "tau"), "1.73205081");
    assert_eq!(field(&s, "relation"), "chronological");
}

#[test]
fn negative_coordinates_parse() {
    let c = config("flat.json");
    let o = lorcone(&["--config", c.to_str().unwrap(), "tau", "-1;-0.5,0", "1;-1.5,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "tau"), "1.73205081");
}

#[test]
fn singularity_bound_on_sin() {
    let c = config("sin_closed.json");
    let o = lorcone(&["--config", c.to_str().unwrap(), "singularity", "--K", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "tau_diameter_bound"), "3.14159265");
    assert_eq!(field(&s, "lower_bound_consistent"), "true");
}

#[test]
fn tripod_lower_bound_is_violated_with_witness() {
    let c = config("tripod.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = lorcone(&["--config", c.to_str().unwrap(), "certify", "--K", "0", "--dir", "below", "--n", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert_eq!(field(&s, "verdict"), "violated");
    assert!(s.contains("witness_triangle: "), "{s}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("triangle,s_p,s_q,value,model,gap,counted\n"));
    let above = lorcone(&["--config", c.to_str().unwrap(), "certify", "--K", "0", "--dir", "above", "--n", "100"]);
    assert_eq!(above.status.code(), Some(0));
    assert_eq!(field(&stdout(&above), "verdict"), "consistent");
}

#[test]
fn certify_reports_are_byte_identical() {
    let c = config("minkowski_cone_h2.json");
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = lorcone(&["--config", c.to_str().unwrap(), "certify", "--K", "0", "--n", "40", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(out).unwrap(), o.stdout)
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn fiber_side_converse() {
    let c = config("minkowski_cone_h2.json");
    let o = lorcone(&["--config", c.to_str().unwrap(), "certify", "--K", "0", "--fiber", "-1", "--n", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("side: fiber") && s.contains("side: cone"), "{s}");
}

#[test]
fn geodesic_round_trip() {
    let c = config("de_sitter.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = lorcone(&["--config", c.to_str().unwrap(), "geodesic", "-0.5;0", "0.7;0.4", "--samples", "201", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "class"), "timelike");
    let printed: f64 = field(&s, "length").parse().unwrap();
    let tau: f64 = field(&s, "tau").parse().unwrap();
    assert!((printed - tau).abs() < 1e-5, "{printed} vs {tau}");
    let back = lorcone(&["--config", c.to_str().unwrap(), "path", out.to_str().unwrap()]);
    assert_eq!(back.status.code(), Some(0));
    let b = stdout(&back);
    let reread: f64 = field(&b, "length").parse().unwrap();
    assert!((reread - printed).abs() <= 1e-6, "{reread} vs {printed}");
    assert!(matches!(field(&b, "class").as_str(), "timelike" | "null"));
}

#[test]
fn null_geodesic_round_trip() {
    let c = config("flat.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n.csv");
    let o = lorcone(&["--config", c.to_str().unwrap(), "geodesic", "0;0,0", "1;0.6,0.8", "--samples", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(&stdout(&o), "class"), "null");
    let back = lorcone(&["--config", c.to_str().unwrap(), "path", out.to_str().unwrap()]);
    assert_eq!(field(&stdout(&back), "class"), "null");
}

#[test]
fn llcheck_accepts_the_sample_catalog() {
    let o = lorcone(&["llcheck", config("catalog.txt").to_str().unwrap(), "--tau"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "failures"), "0");
    assert!(s.contains("x,0,1.00000000,2.00000000,2.00000000"), "{s}");
}

#[test]
fn errors_exit_one_with_error_lines() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"interval":{"a":0,"b":7},"warp":{"kind":"sin"},"fiber":{"kind":"real"}}"#).unwrap();
    for args in [
        vec!["--config", bad.to_str().unwrap(), "tau", "1;0", "2;0"],
        vec!["tau", "1;0", "2;0"],
        vec!["--config", config("flat.json").to_str().unwrap(), "tau", "1;0", "2;0"],
        vec!["--config", config("flat.json").to_str().unwrap(), "path", "/nonexistent/path.csv"],
    ] {
        let o = lorcone(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.lines().any(|l| l.starts_with("error: ")), "{args:?}: {err}");
    }
}

#[test]
fn selftest_subset() {
    let o = lorcone(&["selftest", "--only", "1,9,11"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{s}");
}
