#![no_main]

use libfuzzer_sys::fuzz_target;
use mlr_ga::cli::parse_manifest;

fuzz_target!(|data: &str| {
    if let Ok(m) = parse_manifest(data) {
        for f in m.files() {
            assert!(!f.contains('/') && !f.contains('\\'));
        }
    }
});
