#![no_main]

use libfuzzer_sys::fuzz_target;
use mlr_ga::dataset::{parse_dataset, Schema};

fuzz_target!(|data: &str| {
    if let Ok(d) = parse_dataset(data, &Schema::default()) {
        // Anything accepted must survive its own serialization.
        let again = parse_dataset(&d.to_csv(), &Schema::default()).expect("reparse");
        assert_eq!(again.digest(), d.digest());
    }
});
