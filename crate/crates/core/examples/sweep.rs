//! Registered experiments driven by configuration, written as CSV.

use qbc::harness::{reports_csv, run_experiment, ExperimentConfig, STRATEGIES};

fn main() -> qbc::Result<()> {
    println!("{} registered experiments", STRATEGIES.len());

    let mut reports = Vec::new();
    for m in [1, 2, 4, 8] {
        for cos2a in [0.5f64, 0.75] {
            let mut cfg = ExperimentConfig::new("probe-b92");
            cfg.m = m;
            cfg.cos_a = Some(cos2a.sqrt());
            cfg.trials = 10_000;
            cfg.seed = 99;
            cfg.workers = 4;
            let r = run_experiment(&cfg)?;
            eprintln!("m={m} cos2A={cos2a}: {} ms", r.stats.duration_ms);
            reports.push(r.report);
        }
    }
    print!("{}", reports_csv(&reports)?);

    let cfg: ExperimentConfig = serde_json::from_str(
        r#"{"experiment": "honest", "scheme": "otbc", "n": 8, "m": 3, "trials": 500}"#,
    )
    .map_err(|e| qbc::Error::Parameter(e.to_string()))?;
    let r = run_experiment(&cfg)?;
    println!(
        "\n{}: {}/{} accepted",
        r.report.strategy, r.stats.successes, r.stats.trials
    );
    Ok(())
}
