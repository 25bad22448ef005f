#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        // parsing must never panic; a successful parse must round-trip
        if let Ok(c) = picard_forms::textio::parse_cyc(s) {
            let printed = c.to_string();
            let back = picard_forms::textio::parse_cyc(&printed).expect("round trip");
            assert_eq!(back, c);
        }
        let _ = picard_forms::textio::parse_eis(s);
        let _ = picard_forms::textio::parse_rational(s);
    }
});
