#![no_main]

use libfuzzer_sys::fuzz_target;
use mlr_ga::ga::StrategyPair;

fuzz_target!(|data: &str| {
    if let Ok(s) = data.parse::<StrategyPair>() {
        assert_eq!(s.to_string().parse::<StrategyPair>().unwrap(), s);
    }
});
