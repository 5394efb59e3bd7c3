#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = qbret::io::parse_angle(text);
        let _ = qbret::io::parse_angles(text);
        let _ = qbret::io::parse_ancilla_spec(text);
        let _ = qbret::io::builtin_frame(text);
        let _ = text.parse::<qbret::verify::Suite>();
    }
});
