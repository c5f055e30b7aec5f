#![no_main]

use libfuzzer_sys::fuzz_target;
use quivertilt_core::{parse_trace, serialize_trace};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_trace(text) {
        assert_eq!(parse_trace(&serialize_trace(&t)).unwrap(), t);
    }
});
