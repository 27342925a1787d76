#![no_main]
use libfuzzer_sys::fuzz_target;
use qmotzkin::io::{format_model, parse_model};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(model) = parse_model(s) {
            // accepted models print back to an accepted model
            let again = parse_model(&format_model(&model)).unwrap();
            assert_eq!(format_model(&again), format_model(&model));
        }
    }
});
