#![no_main]

use libfuzzer_sys::fuzz_target;
use mlr_ga::cli::parse_values;

fuzz_target!(|data: &str| {
    if let Ok(v) = parse_values(data) {
        assert!(!v.is_empty() && v.iter().all(|x| x.is_finite()));
    }
});
