#![no_main]

use libfuzzer_sys::fuzz_target;
use swigner::io::Sidecar;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(side) = Sidecar::parse(s) {
            // whatever parses must survive a round trip
            assert_eq!(Sidecar::parse(&side.to_text()).unwrap(), side);
        }
    }
});
