use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qbret(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbret"))
        .args(args)
        .env_remove("QBRET_TOL")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn entry(v: &Value, i: usize, j: usize) -> f64 {
    v["entries"][i][j].as_f64().unwrap()
}

#[test]
fn petz_half_swap_dw_reports_oracle() {
    let o = qbret(&[
        "petz",
        "--kind",
        "dw-qubit",
        "--builtin",
        "half_swap",
        "--angles",
        "+",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["rep"], "dw-qubit");
    for j in 0..4 {
        assert!((entry(&v, 0, j) - 0.5).abs() < 1e-8);
        assert!(entry(&v, 3, j).abs() < 1e-8);
    }
    assert_eq!(v["metadata"]["route"], "direct");
    assert!(v["metadata"]["oracle_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn petz_unitary_pure_prior_is_regularized() {
    let o = qbret(&[
        "petz",
        "--kind",
        "sic-qubit",
        "--builtin",
        "hadamard",
        "--angles",
        "0",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_ne!(v["metadata"]["route"], "direct");
}

#[test]
fn singular_posterior_without_regularization_fails() {
    let o = qbret(&[
        "petz",
        "--builtin",
        "hadamard",
        "--angles",
        "0",
        "--eps",
        "0",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn rep_flag_must_match_frame() {
    let o = qbret(&[
        "petz",
        "--kind",
        "sic-qubit",
        "--rep",
        "nq",
        "--builtin",
        "identity",
        "--angles",
        "+",
    ]);
    assert_eq!(code(&o), 2);
    let o = qbret(&[
        "petz",
        "--kind",
        "dw-qubit",
        "--rep",
        "sp",
        "--builtin",
        "identity",
        "--angles",
        "+",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn custom_rep_uses_hilbert_adjoint() {
    let o = qbret(&[
        "petz",
        "--kind",
        "sic-qubit",
        "--rep",
        "custom",
        "--builtin",
        "half_swap",
        "--angles",
        "+",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["metadata"]["adjoint"], "hilbert-adjoint");
    let a = (3f64.sqrt() + 3.0) / 12.0;
    assert!((entry(&v, 0, 0) - a).abs() < 1e-8);
}

#[test]
fn env_tolerance_is_honoured_and_flag_overrides_it() {
    let run = |env: &str, extra: &[&str]| {
        let mut args = vec![
            "petz",
            "--kind",
            "sic-qubit",
            "--builtin",
            "half_swap",
            "--angles",
            "+",
        ];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_qbret"))
            .args(&args)
            .env("QBRET_TOL", env)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1e-30", &[])), 1);
    assert_eq!(code(&run("1e-30", &["--tol", "1e-8"])), 0);
    assert_eq!(code(&run("nonsense", &[])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&qbret(&[])), 2);
    assert_eq!(code(&qbret(&["bogus"])), 2);
    assert_eq!(
        code(&qbret(&["petz", "--builtin", "nope", "--angles", "+"])),
        2
    );
    assert_eq!(code(&qbret(&["petz", "--builtin", "hadamard"])), 2);
    assert_eq!(
        code(&qbret(&[
            "petz",
            "--builtin",
            "hadamard",
            "--angles",
            "1,2"
        ])),
        2
    );
    assert_eq!(
        code(&qbret(&[
            "petz",
            "--builtin",
            "hadamard",
            "--angles",
            "+",
            "--eps",
            "-1"
        ])),
        2
    );
    assert_eq!(
        code(&qbret(&[
            "graph",
            "--builtin",
            "hadamard",
            "--format",
            "json"
        ])),
        2
    );
    assert_eq!(code(&qbret(&["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&qbret(&["frame", "--kind", "dw-qutrit"])), 2);
    assert_eq!(
        code(&qbret(&["repr", "--channel", "/nonexistent/channel.json"])),
        2
    );
}

#[test]
fn malformed_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"kind\": \"kraus\", \"ops\": [");
    assert_eq!(code(&qbret(&["repr", "--channel", &bad])), 2);
    let frame = write(dir.path(), "frame.json", "{\"id\": \"x\", \"d\": 2}");
    assert_eq!(code(&qbret(&["frame", "--frame", &frame])), 2);
}

#[test]
fn invalid_frame_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let good = qbret(&["frame", "--kind", "dw-qubit"]);
    assert_eq!(code(&good), 0);
    let mut v = json(&good);
    v["G"][0][0][0] = serde_json::json!([0.75, 0.0]);
    let path = write(dir.path(), "broken.json", &v.to_string());
    let o = qbret(&["frame", "--frame", &path]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn frame_file_round_trips_through_petz() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sic.json");
    let o = qbret(&[
        "frame",
        "--kind",
        "sic-qubit",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let o = qbret(&[
        "petz",
        "--frame",
        out.to_str().unwrap(),
        "--builtin",
        "half_swap",
        "--angles",
        "+",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn repr_of_channel_and_state() {
    let o = qbret(&["repr", "--kind", "dw-qubit", "--builtin", "hadamard"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((entry(&v, 0, 3) + 0.5).abs() < 1e-12);
    assert_eq!(v["metadata"]["unital"], true);

    let o = qbret(&["repr", "--kind", "dw-qubit", "--angles", "pi/2,pi/2,0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let sum: f64 = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .sum();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn matrix_only_petz_disables_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let s = qbret(&["repr", "--kind", "dw-qubit", "--builtin", "half_swap"]);
    let v = qbret(&["repr", "--kind", "dw-qubit", "--angles", "+"]);
    let sp = write(dir.path(), "s.json", &String::from_utf8_lossy(&s.stdout));
    let vp = write(dir.path(), "v.json", &String::from_utf8_lossy(&v.stdout));
    let o = qbret(&[
        "petz",
        "--kind",
        "dw-qubit",
        "--matrix",
        &sp,
        "--bubbles",
        &vp,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("disabled"));
    assert_eq!(json(&o)["metadata"]["oracle_check"], "disabled");
}

#[test]
fn compare_flags_born_values() {
    let o = qbret(&[
        "compare",
        "--kind",
        "dw-qubit",
        "--builtin",
        "ry_pi3",
        "--angles",
        "+",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["born_violations"].as_u64().unwrap() >= 1);
    assert!(v["max_abs_difference"].as_f64().unwrap() > 1e-3);
}

#[test]
fn graph_outputs_are_deterministic() {
    let args = [
        "graph",
        "--kind",
        "dw-qubit",
        "--builtin",
        "half_swap",
        "--direction",
        "retro",
        "--angles",
        "+",
    ];
    let a = qbret(&args);
    let b = qbret(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let dot = String::from_utf8(a.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("style=solid").count(), 8);

    let mut svg_args = args.to_vec();
    svg_args.extend_from_slice(&["--format", "svg"]);
    let svg = qbret(&svg_args);
    assert_eq!(code(&svg), 0);
    assert!(String::from_utf8_lossy(&svg.stdout).contains("<svg"));
}

#[test]
fn verify_suite_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = qbret(&[
        "verify",
        "--suite",
        "reference",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().any(|l| l.starts_with("PASS reference/")));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v.is_object());
}
