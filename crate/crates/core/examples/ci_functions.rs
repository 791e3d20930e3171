//! Correlation-immune Boolean functions: Walsh spectra, orders, search and
//! construction.

use qbc::boolfn::{make_ci_function, search_ci, BoolFn, CiKind};

fn main() -> qbc::Result<()> {
    let parity = BoolFn::from_hex("96")?;
    println!(
        "parity3 = {}, spectrum {:?}, order {}",
        parity.to_hex(),
        parity.walsh().coefficients(),
        parity.ci_order()
    );

    let majority = BoolFn::from_fn(3, |x| x.count_ones() >= 2)?;
    println!(
        "majority3 = {}, order {}, balanced {}",
        majority.to_hex(),
        majority.ci_order(),
        majority.is_balanced()
    );

    for n0 in 0..3 {
        let found = search_ci(3, n0, true)?;
        println!(
            "balanced 3-variable functions of order >= {n0}: {}",
            found.len()
        );
    }
    let hexes: Vec<String> = search_ci(3, 2, true)?.iter().map(BoolFn::to_hex).collect();
    println!("  order 2: {hexes:?}");

    for (kind, label) in [
        (CiKind::LinearMask, "linear"),
        (CiKind::Recursive, "recursive"),
    ] {
        for (n, n0) in [(6, 4), (8, 5), (10, 8)] {
            match make_ci_function(n, n0, kind) {
                Ok(f) => println!(
                    "{label} n={n} n0={n0}: order {} weight {}",
                    f.ci_order(),
                    f.weight()
                ),
                Err(e) => println!("{label} n={n} n0={n0}: {e}"),
            }
        }
    }
    Ok(())
}
