//! CSV schema stability: a fixed configuration must reproduce the committed
//! file byte for byte. Regenerate with `QBC_BLESS=1 cargo test --test golden`.

use qbc::harness::{reports_csv, run_experiment, ExperimentConfig};

fn fixed_rows() -> String {
    let mut reports = Vec::new();
    for (id, m) in [
        ("usd-rate", 1),
        ("probe-b92", 2),
        ("probe-b92", 4),
        ("false-basis-probe", 3),
        ("lie-b92", 2),
    ] {
        let mut cfg = ExperimentConfig::new(id);
        cfg.m = m;
        cfg.trials = 2_000;
        cfg.seed = 7;
        cfg.workers = 3;
        reports.push(run_experiment(&cfg).unwrap().report);
    }
    reports_csv(&reports).unwrap()
}

#[test]
fn csv_matches_golden_file() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/experiments.csv");
    let got = fixed_rows();
    if std::env::var_os("QBC_BLESS").is_some() {
        std::fs::write(path, &got).unwrap();
    }
    let want = std::fs::read_to_string(path).unwrap();
    assert_eq!(got, want);
}
