//! A committer trying to change her mind after committing.

use qbc::adversary::{
    alice_false_basis_attack_bb84, alice_lie_b92, alice_probe_attack_b92, FalseBasisStrategy,
    LieKind,
};
use qbc::analysis::{binding_detection_sin2, binding_detection_cos2, eq12_failure};
use qbc::protocol::{Scheme, SessionConfig};

fn main() -> qbc::Result<()> {
    let trials = 20_000;
    let cos_a = 0.75f64.sqrt();
    for m in [1, 2, 4, 8] {
        let cfg = SessionConfig::with_defaults(Scheme::B92bc, 6, m, Some(cos_a), 3)?;
        let r = alice_probe_attack_b92(&cfg, 1, trials, 3, 4)?;
        println!(
            "probe m={m}: failure {:.4} vs {:.4} (z = {:+.2})",
            1.0 - r.rate(),
            eq12_failure(m as u32, cos_a)?,
            r.z_score
        );
    }

    for m in [1, 2, 4] {
        let cfg = SessionConfig::with_defaults(Scheme::B92bc, 6, m, Some(0.8), 4)?;
        let r = alice_lie_b92(&cfg, LieKind::FlipValue, trials, 4, 4)?;
        println!(
            "lie m={m}: pass {:.4}; detection with cos^2 A {:.4}, with sin^2 A {:.4}",
            r.rate(),
            binding_detection_cos2(m as u32, 0.8),
            binding_detection_sin2(m as u32, 0.8)
        );
    }

    for strategy in [
        FalseBasisStrategy::UniformFalse,
        FalseBasisStrategy::ProbeCollapse,
    ] {
        for m in [2, 4, 8] {
            let cfg = SessionConfig::with_defaults(Scheme::Bb84bc, 6, m, None, 5)?;
            let r = alice_false_basis_attack_bb84(&cfg, 1, strategy, trials, 5, 4)?;
            println!(
                "{} m={m}: {:.5} (predicted {:.5})",
                strategy.id(),
                r.rate(),
                r.predicted
            );
        }
    }
    Ok(())
}
