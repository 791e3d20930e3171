//! Honest commit/open sessions for every scheme, and a coin flip on top.

use qbc::protocol::{coin_flip, run_session, BobStrategy, Scheme, SessionConfig};

fn main() -> qbc::Result<()> {
    for scheme in [Scheme::B92bc, Scheme::Bb84bc, Scheme::Otbc] {
        let cfg = SessionConfig::with_defaults(scheme, 6, 3, Some(0.8), 17)?;
        let out = run_session(&cfg, 0, 1, BobStrategy::Honest)?;
        println!(
            "{scheme}: n={} n0={} m={} -> {}",
            cfg.n(),
            cfg.n0(),
            cfg.m(),
            out.transcript.verdict
        );
    }

    let cfg = SessionConfig::with_defaults(Scheme::B92bc, 4, 2, Some(0.8), 17)?;
    let out = run_session(&cfg, 7, 0, BobStrategy::Honest)?;
    println!(
        "\ntranscript of session 7:\n{}",
        out.transcript.to_json_pretty()
    );

    let mut ones = 0;
    for s in 0..200 {
        let flip = coin_flip(&cfg, s, BobStrategy::Honest, true)?;
        ones += u32::from(flip.coin == Some(1));
    }
    println!("\ncoin flips: {ones}/200 ones");
    let refused = coin_flip(&cfg, 999, BobStrategy::Honest, false)?;
    println!("committer refuses to open: {}", refused.transcript.verdict);
    Ok(())
}
