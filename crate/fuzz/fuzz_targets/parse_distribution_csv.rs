#![no_main]
use libfuzzer_sys::fuzz_target;
use qmotzkin::io::{parse_distribution_csv, write_distribution_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(d) = parse_distribution_csv(s) {
            let back = parse_distribution_csv(&write_distribution_csv(&d)).unwrap();
            assert_eq!(back.offset(), d.offset());
            assert_eq!(back.probs(), d.probs());
        }
    }
});
