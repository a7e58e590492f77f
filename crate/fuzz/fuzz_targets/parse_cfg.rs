#![no_main]

use libfuzzer_sys::fuzz_target;
use mlr_ga::ga::log::parse_cfg;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = parse_cfg(data) {
        assert_eq!(parse_cfg(&cfg.to_text()).expect("reparse"), cfg);
    }
});
