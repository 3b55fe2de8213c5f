//! Shared helpers for the CLI tests and the acceptance suite.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// One instance per octahedron type, as `construct` arguments.
pub const INSTANCES: &[(&str, &[&str])] = &[
    (
        "type1",
        &[
            "type1",
            "--a",
            "0.8,0,0.9",
            "--b",
            "-0.3,0,1.6",
            "--c",
            "-0.5517241379310345,0,0.6206896551724137",
            "--d",
            "0.1132075471698113,0,0.6037735849056604",
            "--n",
            "0.3,0.7,1.2",
        ],
    ),
    (
        "type2",
        &[
            "type2",
            "--a",
            "0.2,0.9,1.1",
            "--b",
            "1.0,0.0,0.8",
            "--c",
            "0.2,-0.9,1.1",
            "--d",
            "-0.9,0.0,1.3",
            "--n",
            "0.4,0.5,2.0",
        ],
    ),
    (
        "type3-circle",
        &[
            "type3-circle",
            "--m",
            "0,1",
            "--r",
            "0.6",
            "--a1",
            "-1.2,0.6",
            "--a2",
            "0.3,2.0",
        ],
    ),
    (
        "type3-horocycle",
        &[
            "type3-horocycle",
            "--R",
            "1",
            "--a1",
            "-0.5,0.6",
            "--a2",
            "0.7,0.5",
        ],
    ),
    (
        "type3-hypercycle",
        &[
            "type3-hypercycle",
            "--alpha",
            "0.7854",
            "--centers",
            "1,2,1.5,3",
        ],
    ),
];

/// Grid size of the golden traces.
pub const GOLDEN_STEPS: &str = "60";

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn hypflex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypflex"))
        .args(args)
        .output()
        .expect("hypflex runs")
}

pub fn hypflex_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypflex"))
        .args(args)
        .env(key, val)
        .output()
        .expect("hypflex runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Files produced by construct → check → flex for one instance.
pub struct PipelineOutput {
    pub json: String,
    pub csv: String,
    pub obj: String,
    pub check_code: i32,
    pub flex_code: i32,
    pub verdict: String,
}

pub fn pipeline(
    name: &str,
    construct: &[&str],
    dir: &Path,
    env: Option<(&str, &str)>,
) -> Result<PipelineOutput, String> {
    let run = |args: &[&str]| match env {
        Some((k, v)) => hypflex_env(args, k, v),
        None => hypflex(args),
    };
    let spec = dir.join(format!("{name}.json"));
    let csv = dir.join(format!("{name}.csv"));
    let obj = dir.join(format!("{name}.obj"));
    let spec_s = spec.to_str().unwrap();
    let mut args = vec!["construct"];
    args.extend_from_slice(construct);
    args.extend_from_slice(&["-o", spec_s]);
    let o = run(&args);
    if code(&o) != 0 {
        return Err(format!(
            "{name}: construct exited {}: {}",
            code(&o),
            String::from_utf8_lossy(&o.stderr)
        ));
    }
    let check = run(&["check", spec_s]);
    let flex = run(&[
        "flex",
        spec_s,
        "--steps",
        GOLDEN_STEPS,
        "-o",
        csv.to_str().unwrap(),
    ]);
    let flex_obj = run(&[
        "flex",
        spec_s,
        "--steps",
        GOLDEN_STEPS,
        "--format",
        "obj",
        "-o",
        obj.to_str().unwrap(),
    ]);
    if code(&flex_obj) != code(&flex) {
        return Err(format!("{name}: flex exit codes differ between formats"));
    }
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    Ok(PipelineOutput {
        json: read(&spec)?,
        csv: read(&csv)?,
        obj: read(&obj)?,
        check_code: code(&check),
        flex_code: code(&flex),
        verdict: stdout(&flex).lines().last().unwrap_or("").to_string(),
    })
}

/// Compares against `tests/golden/<name>.<ext>`; rewrites the files when
/// `HYPFLEX_UPDATE_GOLDEN` is set.
pub fn compare_golden(name: &str, out: &PipelineOutput) -> Result<(), String> {
    let update = std::env::var_os("HYPFLEX_UPDATE_GOLDEN").is_some();
    for (ext, text) in [("json", &out.json), ("csv", &out.csv), ("obj", &out.obj)] {
        let path = golden_dir().join(format!("{name}.{ext}"));
        if update {
            fs::write(&path, text).map_err(|e| e.to_string())?;
            continue;
        }
        let want = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if &want != text {
            return Err(format!("{} differs from the golden file", path.display()));
        }
    }
    Ok(())
}

/// The symmetric demo suspension as spec JSON.
pub fn demo_json() -> String {
    let e = 2f64.acosh();
    let q = 3f64.acosh();
    format!("{{\"V\": 4, \"north\": [{e}, {e}, {e}, {e}], \"south\": [{e}, {e}, {e}, {e}], \"equator\": [{q}, {q}, {q}, {q}]}}")
}

/// The demo with one equator and one north length perturbed.
pub fn perturbed_json() -> String {
    let e = 2f64.acosh();
    let q = 3f64.acosh();
    format!(
        "{{\"V\": 4, \"north\": [{e}, {e}, {}, {e}], \"south\": [{e}, {e}, {e}, {e}], \"equator\": [{q}, {}, {q}, {q}]}}",
        e * 0.98,
        q * 1.01
    )
}

/// Exit-code contract: `(description, expected, actual)` for each case.
pub fn exit_code_cases(dir: &Path) -> Vec<(String, i32, i32)> {
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let demo = write("demo.json", &demo_json());
    let perturbed = write("perturbed.json", &perturbed_json());
    let negative = write(
        "negative.json",
        r#"{"V": 4, "north": [1, 1, 1, 1], "south": [1, 1, 1, 1], "equator": [1.0, 0.7, 0.9, 0.4]}"#,
    );
    let malformed = write("malformed.json", r#"{"V": 4, "north": [1, 1"#);
    let unknown = write(
        "unknown.json",
        r#"{"V": 3, "north": [1, 1, 1], "south": [1, 1, 1], "equator": [1, 1, 1], "extra": 1}"#,
    );
    let empty = write(
        "empty.json",
        r#"{"V": 0, "north": [], "south": [], "equator": []}"#,
    );
    let missing = dir.join("missing.json").to_str().unwrap().to_string();

    let cases: Vec<(&str, i32, Vec<&str>)> = vec![
        ("check demo", 0, vec!["check", &demo]),
        ("check unbalanced equator", 1, vec!["check", &negative]),
        ("check malformed JSON", 2, vec!["check", &malformed]),
        ("check unknown field", 2, vec!["check", &unknown]),
        ("check missing file", 2, vec!["check", &missing]),
        (
            "flex demo",
            0,
            vec![
                "flex", &demo, "--t-lo", "1.5", "--t-hi", "5.8", "--signs", "+-+-",
            ],
        ),
        (
            "flex perturbed",
            1,
            vec!["flex", &perturbed, "--t-lo", "1.5", "--t-hi", "5.8"],
        ),
        (
            "flex t_lo = 1",
            2,
            vec!["flex", &demo, "--t-lo", "1", "--t-hi", "3"],
        ),
        (
            "flex infeasible range",
            1,
            vec!["flex", &demo, "--t-lo", "20", "--t-hi", "30"],
        ),
        ("flex malformed", 2, vec!["flex", &malformed]),
        ("limits demo", 0, vec!["limits", &demo]),
        ("limits empty spec", 2, vec!["limits", &empty]),
        (
            "construct asymmetric type1",
            2,
            vec![
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
            ],
        ),
        (
            "construct horocycle vertex above",
            2,
            vec![
                "construct",
                "type3-horocycle",
                "--R",
                "1",
                "--a1",
                "0,1.5",
                "--a2",
                "1,0.5",
            ],
        ),
        ("unknown subcommand", 2, vec!["frobnicate"]),
    ];
    cases
        .into_iter()
        .map(|(what, want, args)| (what.to_string(), want, code(&hypflex(&args))))
        .collect()
}
