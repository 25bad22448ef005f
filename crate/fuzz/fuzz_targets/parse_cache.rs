#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(table) = picard_forms::cache::from_text(s) {
            // anything that parses must serialize and parse back identically
            let printed = picard_forms::cache::to_text(&table);
            let back = picard_forms::cache::from_text(&printed).expect("round trip");
            assert_eq!(picard_forms::cache::to_text(&back), printed);
        }
    }
});
