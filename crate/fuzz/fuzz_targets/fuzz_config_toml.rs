#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = dbfsim::parse_sweep_toml(text) {
        // planning must never panic, whatever the file says
        let _ = spec.plan();
    }
});
