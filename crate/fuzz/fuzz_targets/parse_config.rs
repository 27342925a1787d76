#![no_main]
use libfuzzer_sys::fuzz_target;
use qmotzkin::io::parse_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(map) = parse_config(s) {
            let text: String = map.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
            assert_eq!(parse_config(&text).unwrap(), map);
        }
    }
});
