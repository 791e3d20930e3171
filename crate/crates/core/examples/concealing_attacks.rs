//! A receiver trying to learn the committed bit before the opening.

use qbc::adversary::{bob_breidbart_report, bob_usd_report, string_posterior, ComponentReader};
use qbc::boolfn::{make_ci_function, CiKind};
use qbc::quantum::StatePair;

fn main() -> qbc::Result<()> {
    let f = make_ci_function(6, 4, CiKind::LinearMask)?;
    let known = [Some(1), None, Some(0), Some(1), None, Some(0)];
    let p = string_posterior(&f, &known)?;
    println!(
        "4 of 6 components known: posterior {}/{} (exactly half: {})",
        p.num,
        p.den,
        p.is_half()
    );

    let pair = StatePair::with_cos(0.8)?;
    for (n, n0) in [(4, 1), (6, 4), (10, 8)] {
        let f = make_ci_function(n, n0, CiKind::LinearMask)?;
        let r = bob_usd_report(&f, 4, &pair, 20_000, 9, 4)?;
        println!(
            "USD guess n={n} n0={n0}: {:.4} (predicted {:.4})",
            r.rate(),
            r.predicted
        );
    }

    for reader in [ComponentReader::RandomBasis, ComponentReader::Breidbart] {
        for m in [1, 3, 5] {
            let r = bob_breidbart_report(&f, m, reader, 20_000, 9, 4)?;
            println!(
                "{} m={m}: {:.4} (predicted {:.4})",
                reader.id(),
                r.rate(),
                r.predicted
            );
        }
    }
    Ok(())
}
