#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((frame, dual)) = qbret::io::parse_frame(text) {
            let _ = qbret::frames::validate_frame(&frame, &dual, 1e-10);
        }
        let _ = qbret::io::load_representation(text);
    }
});
