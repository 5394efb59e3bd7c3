//! Replays the checked-in fuzz seeds through every parser entry point.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).expect("seeds are utf-8")
}

fn name(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}

#[test]
fn frame_seeds() {
    for (p, b) in seeds("frame_file") {
        let parsed = qbret::io::parse_frame(text(&b));
        let expect_ok = !name(&p).starts_with("empty");
        assert_eq!(parsed.is_ok(), expect_ok, "{}", p.display());
        if let Ok((f, g)) = parsed {
            assert!(qbret::frames::validate_frame(&f, &g, 1e-10)
                .unwrap()
                .passed());
            assert!(qbret::io::load_representation(text(&b)).is_ok());
        }
    }
}

#[test]
fn channel_seeds() {
    for (p, b) in seeds("channel_file") {
        let ok = qbret::io::parse_channel(text(&b)).is_ok();
        assert_eq!(ok, !name(&p).starts_with("not_"), "{}", p.display());
    }
}

#[test]
fn state_seeds() {
    for (p, b) in seeds("state_file") {
        let parsed = qbret::io::parse_state(text(&b));
        assert_eq!(
            parsed.is_ok(),
            !name(&p).starts_with("trace_two"),
            "{}",
            p.display()
        );
        if let Ok(rho) = parsed {
            let again = qbret::io::parse_state(&qbret::io::state_to_json(&rho).unwrap()).unwrap();
            assert_eq!(again.matrix(), rho.matrix());
        }
    }
}

#[test]
fn qpr_object_seeds() {
    for (p, b) in seeds("qpr_object_file") {
        let ok = qbret::io::parse_qpr_object(text(&b)).is_ok();
        assert_eq!(ok, !name(&p).starts_with("bad_"), "{}", p.display());
    }
}

#[test]
fn spec_seeds() {
    for (p, b) in seeds("cli_specs") {
        let t = text(&b);
        let accepted = qbret::io::parse_angles(t).is_ok()
            || qbret::io::parse_ancilla_spec(t).is_ok()
            || qbret::io::builtin_frame(t).is_ok()
            || t.parse::<qbret::verify::Suite>().is_ok();
        assert!(accepted, "{}", p.display());
    }
}

#[test]
fn cli_arg_seeds() {
    for (p, b) in seeds("cli_args") {
        let args = std::iter::once("qbret").chain(text(&b).split('\0'));
        let parsed = qbret::cli::Cli::try_parse_from(args);
        assert!(parsed.is_ok(), "{}: {:?}", p.display(), parsed.err());
    }
}
