#![no_main]

use libfuzzer_sys::fuzz_target;
use swigner::io::{read_phase_csv, Sidecar};

const SIDECAR: &str = "x.n = 8\nx.length = 4\nx.center = 0\nk.n = 8\nk.length = 2\nk.center = 0\nreal = false\n";

fuzz_target!(|data: &[u8]| {
    let side = Sidecar::parse(SIDECAR).unwrap();
    let _ = read_phase_csv(data, &side);
});
