#![no_main]

use active_walk::angle::parse_angle;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(v) = parse_angle(text) {
            assert!(v.is_finite());
        }
    }
});
