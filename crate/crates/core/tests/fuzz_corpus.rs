//! Replays the checked-in fuzz corpus through the parsers so the seeds stay
//! meaningful as formats evolve.

use std::fs;
use std::path::PathBuf;

use mlr_ga::cli::{parse_manifest, parse_values};
use mlr_ga::dataset::{parse_dataset, Schema};
use mlr_ga::ga::log::{parse_cfg, parse_evo_log};
use mlr_ga::ga::StrategyPair;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn dataset_seeds() {
    for (name, text) in seeds("parse_dataset") {
        let r = parse_dataset(&text, &Schema::default());
        assert_eq!(r.is_ok(), name != "missing.csv", "{name}: {r:?}");
    }
}

#[test]
fn log_and_cfg_seeds() {
    for (name, text) in seeds("parse_evo_log") {
        let log = parse_evo_log(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(log.to_text(), text);
    }
    for (name, text) in seeds("parse_cfg") {
        assert_eq!(parse_cfg(&text).is_ok(), name == "run.txt", "{name}");
    }
}

#[test]
fn manifest_strategy_and_value_seeds() {
    for (name, text) in seeds("parse_manifest") {
        parse_manifest(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, text) in seeds("parse_strategy") {
        let ok = text.parse::<StrategyPair>().is_ok();
        assert_eq!(ok, name != "XY" && name != "dt", "{name}");
    }
    for (name, text) in seeds("parse_values") {
        assert_eq!(parse_values(&text).is_ok(), name == "column.txt", "{name}");
    }
}
