//! The single-bit quantum encryption functions: Bell-pair double opening and
//! Breidbart recovery of keyed repetition.

use qbc::adversary::{alice_epr_attack_eq2, breidbart_recover_report, honest_reopen_report};
use qbc::analysis::{breidbart_rate, majority_success};

fn main() -> qbc::Result<()> {
    let r = alice_epr_attack_eq2(2, 4, 10_000, 1, 4)?;
    println!("Bell pairs opened both ways: {}/{}", r.successes, r.trials);
    for b in &r.breakdown {
        println!("  {}: {}/{}", b.name, b.count, b.total);
    }
    let r = honest_reopen_report(4, 5, 100_000, 1, 4)?;
    println!(
        "honest commitment reopened as the complement: {}/{} (bound {:.1e})",
        r.successes, r.trials, r.predicted
    );

    for n in [1, 3, 5, 9, 15] {
        let r = breidbart_recover_report(n, 20_000, 2, 4)?;
        let p = majority_success(n as u64, breidbart_rate());
        println!(
            "keyed repetition n={n}: recovered {:.4} (binomial tail {:.4})",
            r.rate(),
            p
        );
    }
    Ok(())
}
