#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(sec) = picard_forms::textio::parse_section(s) {
            let printed = sec.to_string();
            let back = picard_forms::textio::parse_section(&printed).expect("round trip");
            assert_eq!(back, sec);
        }
    }
});
