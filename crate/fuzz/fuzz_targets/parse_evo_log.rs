#![no_main]

use libfuzzer_sys::fuzz_target;
use mlr_ga::ga::log::parse_evo_log;

fuzz_target!(|data: &str| {
    if let Ok(log) = parse_evo_log(data) {
        assert_eq!(parse_evo_log(&log.to_text()).expect("reparse"), log);
    }
});
