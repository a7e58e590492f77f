use std::fs;
use std::path::Path;
use std::process::Command;

use mlr_ga::cli::{cmd_batch, cmd_report, parse_manifest, BatchSpec, CliError, MANIFEST_FILE};

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn evo(values: &[f64]) -> String {
    let mut s = String::from("generation,best_r2,improved,distinct_genotypes,distinct_fitnesses\n");
    for (g, v) in values.iter().enumerate() {
        let improved = g > 0 && *v > values[g - 1];
        s += &format!("{g},{v},{},7,5\n", u8::from(improved));
    }
    s
}

/// A DT batch of three runs whose logs are replaced by hand-written ones.
fn fixture(dir: &Path) {
    let mut spec = BatchSpec::new(dir);
    spec.runs_per_strategy = 3;
    spec.strategies = vec!["DT".parse().unwrap()];
    spec.config.generations = 5;
    spec.tag = "fx".into();
    let m = cmd_batch(&spec).unwrap();
    let logs = [
        evo(&[0.2, 0.2, 0.5, 0.5, 0.9, 1.0]),
        evo(&[0.3, 0.3, 0.3, 0.3, 0.3, 0.3]),
        evo(&[0.1, 0.4, 0.4, 0.4, 0.4, 0.995]),
    ];
    for (run, text) in m.runs.iter().zip(&logs) {
        fs::write(dir.join(&run.evo), text).unwrap();
    }
}

#[test]
fn hand_counted_fixture_report() {
    let tmp = tempfile::tempdir().unwrap();
    let batch = tmp.path().join("batch");
    fixture(&batch);
    let out = tmp.path().join("report");
    cmd_report(&batch.join(MANIFEST_FILE), &out).unwrap();

    let runs = csv_rows(&out.join("runs.csv"));
    let n_evo: Vec<&str> = runs.iter().map(|r| r[4].as_str()).collect();
    assert_eq!(n_evo, ["3", "0", "2"]);
    let first_reach: Vec<&str> = runs.iter().map(|r| r[5].as_str()).collect();
    assert_eq!(first_reach, ["5", "", "5"]);

    let reach = csv_rows(&out.join("prob_reach.csv"));
    assert_eq!(reach.len(), 1);
    assert_eq!(reach[0][0], "DT");
    let p: f64 = reach[0][5].parse().unwrap();
    assert_eq!(p, 2.0 / 3.0);

    // 3, 0, 2 events at generations {2,4,5} and {1,5}, over 5 generations.
    let lp3 = csv_rows(&out.join("lp3_relative_moments.csv"));
    assert_eq!(lp3[0][1], "5");

    let census = csv_rows(&out.join("census.csv"));
    assert!(census.iter().all(|r| r[4] == "7" && r[5] == "5"));
}

#[test]
fn report_is_pure() {
    let tmp = tempfile::tempdir().unwrap();
    let batch = tmp.path().join("batch");
    fixture(&batch);
    // Files the manifest does not list are ignored.
    fs::write(batch.join("fx_DT_03_evo.txt"), evo(&[0.0, 1.0])).unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let names = cmd_report(&batch.join(MANIFEST_FILE), &a).unwrap();
    cmd_report(&batch.join(MANIFEST_FILE), &b).unwrap();
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn report_rejects_mismatched_logs() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let m = parse_manifest(&fs::read_to_string(tmp.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    fs::write(tmp.path().join(&m.runs[1].evo), evo(&[0.1, 0.2])).unwrap();
    let err = cmd_report(&tmp.path().join(MANIFEST_FILE), &tmp.path().join("r")).unwrap_err();
    assert!(matches!(err, CliError::Manifest(_)));

    fixture(tmp.path());
    let cfg = tmp.path().join(&m.runs[0].cfg);
    let text = fs::read_to_string(&cfg).unwrap().replace("seed=1\n", "seed=9\n");
    fs::write(&cfg, text).unwrap();
    assert!(cmd_report(&tmp.path().join(MANIFEST_FILE), &tmp.path().join("r")).is_err());
}

#[test]
fn batch_is_deterministic_across_job_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut spec = BatchSpec::new(tmp.path().join("one"));
    spec.runs_per_strategy = 2;
    spec.config.generations = 30;
    let m = cmd_batch(&spec).unwrap();
    spec.out_dir = tmp.path().join("four");
    spec.jobs = 4;
    cmd_batch(&spec).unwrap();
    for f in m.files().into_iter().chain([MANIFEST_FILE]) {
        assert_eq!(
            fs::read(tmp.path().join("one").join(f)).unwrap(),
            fs::read(tmp.path().join("four").join(f)).unwrap(),
            "{f}"
        );
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mlr-ga"))
}

#[test]
fn binary_round_trip_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let ok = |args: &[&str]| {
        let out = bin().args(args).current_dir(d).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    ok(&["synth", "--n", "30", "--m", "6", "--seed", "4", "--out", "d.csv"]);
    let ex = ok(&["exhaustive", "--dataset", "d.csv", "--k", "2"]);
    assert!(ex.contains("\"evaluated\": 15"));
    ok(&["run", "--dataset", "d.csv", "--generations", "20", "--out", "single"]);
    ok(&[
        "batch", "--dataset", "d.csv", "--runs", "2", "--strategy", "DT,PP", "--generations", "20",
        "--jobs", "2", "--out", "b",
    ]);
    ok(&["report", "--manifest", "b/manifest.json", "--out", "r"]);
    assert!(d.join("r/digest.txt").is_file());
    let f1 = ok(&["run", "--fitness", "dejong:F1", "--generations", "10"]);
    assert!(f1.starts_with("best fitness"));
    let eq = ok(&["equilibrium", "--pop", "100", "--steps", "3"]);
    assert_eq!(eq.lines().count(), 5);
    fs::write(d.join("v.txt"), (1..=40).map(|i| format!("{}\n", i as f64 / 41.0)).collect::<String>())
        .unwrap();
    assert!(ok(&["fit-dist", "--input", "v.txt"]).contains("tail="));
    assert!(ok(&["fit-dist", "--dist", "lp3", "--input", "v.txt"]).contains("alpha="));

    for bad in [
        &["exhaustive", "--dataset", "missing.csv"][..],
        &["run", "--fitness", "dejong:F9"],
        &["run", "--strategy", "XY"],
        &["batch", "--runs", "0", "--out", "z"],
        &["run", "--pop", "3"],
        &["report", "--manifest", "d.csv", "--out", "r2"],
        &["equilibrium", "--pop", "7", "--mode", "recombination"],
    ] {
        let out = bin().args(bad).current_dir(d).output().unwrap();
        assert!(!out.status.success(), "{bad:?} should fail");
    }
}
