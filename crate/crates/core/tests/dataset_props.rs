use mlr_ga::dataset::{load_dataset, parse_dataset, write_dataset, Dataset, Schema};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, -1e6f64..1e6]
}

prop_compose! {
    fn any_dataset()(n in 2usize..12, m in 2usize..6)
        (cells in prop::collection::vec(finite(), n * m),
         y in prop::collection::vec(finite(), n),
         n in Just(n), m in Just(m)) -> Option<Dataset> {
        Dataset::new(
            (0..n).map(|i| format!("mol-{i}")).collect(),
            (0..m).map(|j| format!("logP_{j}")).collect(),
            cells,
            y,
        )
        .ok()
    }
}

proptest! {
    #[test]
    fn csv_round_trip_is_bit_exact(d in any_dataset()) {
        let Some(d) = d else { return Ok(()) };
        let back = parse_dataset(&d.to_csv(), &Schema::default()).unwrap();
        prop_assert_eq!(back.n_rows(), d.n_rows());
        prop_assert_eq!(back.descriptor_names(), d.descriptor_names());
        prop_assert_eq!(back.compound_ids(), d.compound_ids());
        for r in 0..d.n_rows() {
            prop_assert_eq!(back.property()[r].to_bits(), d.property()[r].to_bits());
            for c in 0..d.n_descriptors() {
                prop_assert_eq!(back.value(r, c).to_bits(), d.value(r, c).to_bits());
            }
        }
        prop_assert_eq!(back.digest(), d.digest());
    }

    #[test]
    fn parser_never_panics(text in "[a-z0-9,.\\-\n ]{0,200}") {
        let _ = parse_dataset(&text, &Schema::default());
    }
}

#[test]
fn file_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let s = mlr_ga::dataset::synth_dataset(20, 5, 2, 0.3, 9).unwrap();
    let p = tmp.path().join("d.csv");
    write_dataset(&s.data, &p).unwrap();
    assert_eq!(load_dataset(&p, &Schema::default()).unwrap(), s.data);
}
