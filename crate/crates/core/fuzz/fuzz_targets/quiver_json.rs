#![no_main]

use libfuzzer_sys::fuzz_target;
use quivertilt_core::{validate_gentle, BoundQuiver};

fuzz_target!(|data: &[u8]| {
    if let Ok(q) = serde_json::from_slice::<BoundQuiver>(data) {
        let _ = validate_gentle(&q);
        let again: BoundQuiver = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(again, q);
    }
});
