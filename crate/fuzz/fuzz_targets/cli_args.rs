#![no_main]
use clap::Parser;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let args = std::iter::once("qbret").chain(text.split('\0'));
        let _ = qbret::cli::Cli::try_parse_from(args);
    }
});
