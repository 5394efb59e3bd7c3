#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rho) = qbret::io::parse_state(text) {
            let _ = qbret::io::state_to_json(&rho);
        }
    }
});
