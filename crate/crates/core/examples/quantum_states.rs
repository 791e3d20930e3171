//! The nonorthogonal state pair, unambiguous discrimination, and the
//! Breidbart measurement on four-state qubits.

use qbc::analysis::breidbart_rate;
use qbc::quantum::{breidbart_measure, usd_measure, Povm, PureState, StatePair, UsdOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qbc::Result<()> {
    let pair = StatePair::with_cos(0.8)?;
    println!(
        "cos A = {}, sin A = {:.3}, delta = {:.4}",
        pair.cos_a(),
        pair.sin_a(),
        pair.delta()
    );
    println!("|<psi0|psi1>|^2 = {:.4}", pair.psi0().overlap(pair.psi1()));

    let povm = Povm::usd(&pair);
    println!(
        "USD POVM: {} elements, completeness defect {:.1e}, min eigenvalue {:.1e}",
        povm.elements().len(),
        povm.completeness_defect(),
        povm.min_eigenvalue()
    );
    for b in 0..2u8 {
        let p = povm.probabilities(pair.state(b));
        println!("  outcome probabilities on |psi{b}>: {p:.4?}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 100_000;
    let (mut known, mut wrong) = (0, 0);
    for _ in 0..trials {
        let b = u8::from(rng.random_bool(0.5));
        if let UsdOutcome::Identified(v) = usd_measure(pair.state(b), &pair, &mut rng) {
            known += 1;
            wrong += usize::from(v != b);
        }
    }
    println!(
        "USD: {known}/{trials} identified (1 - cos A = {:.3}), {wrong} wrong",
        pair.usd_success()
    );

    let mut right = 0;
    for _ in 0..trials {
        let (basis, bit) = (
            u8::from(rng.random_bool(0.5)),
            u8::from(rng.random_bool(0.5)),
        );
        right += usize::from(breidbart_measure(&PureState::bb84(basis, bit), &mut rng) == bit);
    }
    println!(
        "Breidbart: {right}/{trials} correct (cos^2(pi/8) = {:.4})",
        breidbart_rate()
    );
    Ok(())
}
