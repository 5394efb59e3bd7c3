use qbret::frames::{validate_frame, Representation};
use qbret::io;

#[test]
fn builtin_frames_round_trip_bit_exact() {
    for name in ["dw-qubit", "sic-qubit", "dw-qubits:2"] {
        let (f, g) = io::builtin_frame(name).unwrap();
        let report = validate_frame(&f, &g, 1e-10).unwrap();
        assert!(report.passed(), "{name}");
        let text = io::frame_to_json(&f, &g, &report).unwrap();
        let (f2, g2) = io::parse_frame(&text).unwrap();
        assert_eq!(f2.id, f.id);
        assert_eq!(f2.kind, f.kind);
        assert_eq!(f2.labels, f.labels);
        assert_eq!(f2.ops, f.ops, "{name}");
        assert_eq!(g2.ops, g.ops, "{name}");
        assert_eq!(io::frame_to_json(&f2, &g2, &report).unwrap(), text);
    }
}

#[test]
fn loaded_representation_matches_builtin() {
    let (f, g) = io::builtin_frame("sic-qubit").unwrap();
    let report = validate_frame(&f, &g, 1e-10).unwrap();
    let text = io::frame_to_json(&f, &g, &report).unwrap();
    let loaded = io::load_representation(&text).unwrap();
    let builtin = Representation::sic_qubit();
    assert_eq!(loaded.kind(), builtin.kind());
    assert_eq!(loaded.xi.as_slice(), builtin.xi.as_slice());
}

#[test]
fn unknown_frame_kinds_are_rejected() {
    for name in [
        "",
        "dw-qutrit",
        "dw-qubits:0",
        "dw-qubits:9",
        "dw-qubits:x",
        "sic",
    ] {
        assert!(io::builtin_frame(name).is_err(), "{name}");
    }
}
