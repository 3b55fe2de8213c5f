mod common;

use std::fs;

use common::*;
use hypflex_core::io::{obj_to_points, parse_spec_json};
use hypflex_core::suspension::{from_coordinates, spec_distance};

#[test]
fn goldens_match() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in INSTANCES {
        let out = pipeline(name, args, dir.path(), None).unwrap();
        assert_eq!(out.check_code, 0, "{name}: check");
        assert_eq!(out.flex_code, 0, "{name}: flex");
        assert!(
            out.verdict.starts_with("FLEXIBLE ["),
            "{name}: {}",
            out.verdict
        );
        compare_golden(name, &out).unwrap();
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (name, args) = INSTANCES[4];
    let one = pipeline(name, args, a.path(), Some(("HYPFLEX_THREADS", "1"))).unwrap();
    let many = pipeline(name, args, b.path(), Some(("HYPFLEX_THREADS", "3"))).unwrap();
    assert_eq!(one.csv, many.csv);
    assert_eq!(one.obj, many.obj);
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    for (what, want, got) in exit_code_cases(dir.path()) {
        assert_eq!(got, want, "{what}");
    }
}

#[test]
fn bad_thread_count_is_an_error() {
    let o = hypflex_env(&["limits", "nonexistent.json"], "HYPFLEX_THREADS", "zero");
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("HYPFLEX_THREADS"));
}

#[test]
fn symmetry_violation_is_reported() {
    let o = hypflex(&[
        "construct",
        "type1",
        "--a",
        "0.8,0,0.9",
        "--b",
        "-0.3,0,1.6",
        "--c",
        "-0.5,0,0.6",
        "--d",
        "0.1,0,0.6",
        "--n",
        "0.3,0.7,1.2",
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("symmetry violation"));
}

#[test]
fn demo_trace_has_200_rows() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("demo.json");
    let csv = dir.path().join("demo.csv");
    fs::write(&spec, demo_json()).unwrap();
    let o = hypflex(&[
        "flex",
        spec.to_str().unwrap(),
        "--t-lo",
        "1.5",
        "--t-hi",
        "5.8",
        "--signs",
        "+-+-",
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o)
        .lines()
        .last()
        .unwrap()
        .starts_with("FLEXIBLE [1.5, 5.8"));
    let text = fs::read_to_string(csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 200);
    for r in rows {
        let defect: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(defect < 1e-12);
    }
}

#[test]
fn limits_table() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    let ln2 = 2f64.ln();
    fs::write(
        &spec,
        format!(
            r#"{{"north": [1, 1.2, 0.8], "south": [0.9, 1, 1.1], "equator": [{ln2}, 1, 1.3]}}"#
        ),
    )
    .unwrap();
    let o = hypflex(&["limits", spec.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let first: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[8].parse::<f64>().unwrap(), 2.0);
    assert_eq!(first[9].parse::<f64>().unwrap(), 0.5);
    for row in out.lines().skip(1) {
        let consistency: f64 = row.split(',').nth(7).unwrap().parse().unwrap();
        assert!(consistency < 1e-4);
    }
}

#[test]
fn frames_reproduce_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let (name, args) = INSTANCES[3];
    let spec_path = dir.path().join(format!("{name}.json"));
    let mut construct = vec!["construct"];
    construct.extend_from_slice(args);
    construct.extend_from_slice(&["-o", spec_path.to_str().unwrap()]);
    assert_eq!(code(&hypflex(&construct)), 0);
    let frames = dir.path().join("frames");
    let o = hypflex(&[
        "flex",
        spec_path.to_str().unwrap(),
        "--steps",
        "30",
        "--frames",
        frames.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let spec = parse_spec_json(&fs::read_to_string(&spec_path).unwrap())
        .unwrap()
        .spec;
    let mut n = 0;
    for entry in fs::read_dir(&frames).unwrap() {
        let (north, south, eq) =
            obj_to_points(&fs::read_to_string(entry.unwrap().path()).unwrap()).unwrap();
        let (measured, _) = from_coordinates(&north, &south, &eq).unwrap();
        assert!(spec_distance(&measured, &spec) < 1e-8);
        n += 1;
    }
    assert_eq!(n, 30);
}
