//! Closed-form quantities next to their oracles.

use qbc::analysis::{
    binding_min_m, blob_trace_distance, bob_cheat_prob, concealing_asymptotic, concealing_dml,
    concealing_exact, min_n_for_beta, p_usd_bounds,
};
use qbc::bits::BitString;
use qbc::harness::cli::formula_table;
use qbc::harness::output::formulas_csv;
use qbc::quantum::StatePair;

fn main() -> qbc::Result<()> {
    let (lo, hi) = p_usd_bounds(0.1)?;
    println!("USD success range at delta = 0.1: [{lo:.4}, {hi:.4}]");

    for alpha in [10.0, 20.0, 40.0] {
        let mm = binding_min_m(alpha, 0.5f64.sqrt())?;
        println!(
            "alpha = {alpha}: strings needed {} (sin^2 A exponent) / {} (cos^2 A exponent)",
            mm.sin2, mm.cos2
        );
    }

    for (n, n0, p) in [(400, 120, 0.2), (400, 85, 0.2), (2000, 450, 0.2)] {
        let exact = concealing_exact(n, n0, p)?;
        let dml = concealing_dml(n, n0, p)?;
        let asym = concealing_asymptotic(n, n0, p)?;
        println!(
            "n={n} n0={n0}: exact {exact:.6}, erf {dml:.6}, expansion {:.3e} / complement {:.6}",
            asym.as_printed, asym.complement
        );
    }

    println!(
        "cheat probability n=10 n0=8 pA=0.2 m=4: {:.3e}",
        bob_cheat_prob(10, 8, 0.2, 4)?
    );
    for beta in [10.0, 30.0, 60.0] {
        println!(
            "beta = {beta}: smallest n = {}",
            min_n_for_beta(beta, 4, 0.05, 2)?
        );
    }

    let pair = StatePair::with_cos(0.8)?;
    let d = blob_trace_distance(
        &pair,
        &[BitString::zeros(4)],
        &[BitString::zeros(4).flipped(1)],
    )?;
    println!(
        "trace distance n=4: analytic {} numeric {:.15}",
        d.analytic, d.numeric
    );

    print!("\n{}", formulas_csv(&formula_table("asymptotic-table")?)?);
    Ok(())
}
