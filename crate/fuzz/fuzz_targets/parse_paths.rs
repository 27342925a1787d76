#![no_main]
use libfuzzer_sys::fuzz_target;
use qmotzkin::io::{format_path, parse_paths};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(paths) = parse_paths(s) {
            let text: String = paths.iter().map(|p| format_path(p) + "\n").collect();
            assert_eq!(parse_paths(&text).unwrap(), paths);
        }
    }
});
