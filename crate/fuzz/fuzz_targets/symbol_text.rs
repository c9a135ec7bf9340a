#![no_main]

use libfuzzer_sys::fuzz_target;
use swigner::io::{parse_symbol, symbol_to_text};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(sym) = parse_symbol(s) {
            let text = symbol_to_text(&sym).unwrap();
            assert_eq!(parse_symbol(&text).unwrap(), sym);
        }
    }
});
