#![no_main]

use libfuzzer_sys::fuzz_target;
use swigner_cli::config::{parse_set, Config};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok((k, v)) = parse_set(s) {
            let mut cfg = Config::default();
            let _ = cfg.apply_set(&k, &v);
        }
    }
});
