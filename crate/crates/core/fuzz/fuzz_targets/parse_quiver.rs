#![no_main]

use libfuzzer_sys::fuzz_target;
use quivertilt_core::{compute_phi, is_gentle, parse_quiver, serialize_quiver};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(q) = parse_quiver(text) else { return };
    let back = parse_quiver(&serialize_quiver(&q)).expect("serialized quiver must parse");
    assert_eq!(back, q);
    // small inputs only: φ is linear but the gentle check must never panic
    if is_gentle(&q) && q.arrow_count() <= 64 {
        compute_phi(&q).expect("gentle quiver must have φ");
    }
});
