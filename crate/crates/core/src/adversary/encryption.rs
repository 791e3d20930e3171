//! Attacks on the single-bit encryption functions.

use rand::Rng;

use crate::analysis::{breidbart_rate, majority_success};
use crate::bits::BitString;
use crate::encode::{encode_basis_committed, encode_keyed_random, Blob, BlobMeta, EncoderId, Slot};
use crate::error::{Error, Result};
use crate::quantum::{Basis, DensityOp, JointState};
use crate::sim::{run_trials, Tally};

use super::AttackReport;

/// Bob's check of an opening `(a, payloads)` of a basis-committed blob:
/// slot `(i, j)` measured in basis `a_i` must give `payloads[i]_j`.
pub fn open_basis_committed<R: Rng + ?Sized>(
    blob: &mut Blob,
    a: &BitString,
    payloads: &[BitString],
    rng: &mut R,
) -> Result<bool> {
    if a.len() != blob.m()
        || payloads.len() != blob.m()
        || payloads.iter().any(|p| p.len() != blob.n())
    {
        return Err(Error::param("opening does not match the blob shape"));
    }
    let mut ok = true;
    for (i, p) in payloads.iter().enumerate() {
        let basis = Basis::bb84(a.get(i));
        for (j, bit) in p.iter().enumerate() {
            ok &= blob.measure_slot(blob.index(i, j), &basis, rng)? == bit;
        }
    }
    Ok(ok)
}

/// Blob of `k x n` Bell-pair halves; Alice keeps qubit 0 of each register.
fn epr_blob(k: usize, n: usize) -> Result<Blob> {
    let registers = vec![JointState::bell_pair(); k * n];
    let slots = (0..k * n)
        .map(|r| Slot::Joint {
            register: r,
            qubit: 1,
        })
        .collect();
    Blob::from_parts(
        BlobMeta {
            encoder: EncoderId::BasisCommitted,
            m: k,
            n,
            key_digest: None,
        },
        slots,
        registers,
    )
}

/// Alice measures her halves in the bases of `a` and unveils the outcomes.
fn epr_open<R: Rng + ?Sized>(
    blob: &mut Blob,
    a: &BitString,
    rng: &mut R,
) -> Result<Vec<BitString>> {
    let n = blob.n();
    (0..blob.m())
        .map(|i| {
            let basis = Basis::bb84(a.get(i));
            let bits = (0..n)
                .map(|j| blob.register_mut(i * n + j).measure_qubit(0, &basis, rng))
                .collect::<Result<Vec<_>>>()?;
            Ok(BitString::from_bits(bits))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EprTrial {
    /// The blob opened as all zeros verified.
    pub opened_zero: bool,
    /// The same blob, opened instead as all ones, verified.
    pub opened_one: bool,
    /// Every slot Bob holds is exactly `I/2`.
    pub marginal_mixed: bool,
}

/// Entangled commitment against the basis-committed encoder, opened both
/// ways on copies of one blob.
pub fn epr_trial<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<EprTrial> {
    let blob = epr_blob(k, n)?;
    let mixed = DensityOp::maximally_mixed(2)?;
    let mut marginal_mixed = true;
    for idx in 0..blob.len() {
        marginal_mixed &= blob.reduced_slot(idx)?.max_abs_diff(&mixed) <= 1e-12;
    }
    let open_as = |bit: u8, rng: &mut R| -> Result<bool> {
        let mut copy = blob.clone();
        let a = BitString::from_bits(vec![bit; k]);
        let payloads = epr_open(&mut copy, &a, rng)?;
        open_basis_committed(&mut copy, &a, &payloads, rng)
    };
    Ok(EprTrial {
        opened_zero: open_as(0, rng)?,
        opened_one: open_as(1, rng)?,
        marginal_mixed,
    })
}

pub fn alice_epr_attack_eq2(
    k: usize,
    n: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let tally = run_trials(trials, seed, workers, |_, rng| {
        let t = epr_trial(k, n, rng)?;
        Ok(Tally::single(
            t.opened_zero && t.opened_one,
            vec![
                u64::from(t.opened_zero),
                u64::from(t.opened_one),
                u64::from(t.marginal_mixed),
            ],
        ))
    })?;
    Ok(AttackReport::new(
        "epr-eq2",
        format!("k={k} n={n}"),
        tally.trials,
        tally.successes,
        1.0,
    )
    .with_breakdown("opened-as-0", tally.counter(0), tally.trials, Some(1.0))
    .with_breakdown("opened-as-1", tally.counter(1), tally.trials, Some(1.0))
    .with_breakdown("marginal-mixed", tally.counter(2), tally.trials, Some(1.0)))
}

/// An honest commitment to random `a` opened as its complement, unveiling
/// the committed payloads.
pub fn honest_reopen_trial<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<bool> {
    let a = BitString::random(k, rng);
    let (mut blob, payloads) = encode_basis_committed(&a, n, rng)?;
    open_basis_committed(&mut blob, &a.complement(), &payloads, rng)
}

pub fn honest_reopen_report(
    k: usize,
    n: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let tally = run_trials(trials, seed, workers, |_, rng| {
        Ok(Tally::single(honest_reopen_trial(k, n, rng)?, Vec::new()))
    })?;
    Ok(AttackReport::new(
        "eq2-honest-reopen",
        format!("k={k} n={n}"),
        tally.trials,
        tally.successes,
        0.5f64.powi((k * n) as i32),
    ))
}

/// Breidbart-measures the `n` copies of each data bit and takes a majority
/// vote, ties broken by a fair coin.
pub fn breidbart_recover_keyed<R: Rng + ?Sized>(blob: &mut Blob, rng: &mut R) -> Result<BitString> {
    let basis = Basis::breidbart();
    let n = blob.n();
    let bits = (0..blob.m())
        .map(|i| {
            let mut ones = 0;
            for j in 0..n {
                ones += usize::from(blob.measure_slot(blob.index(i, j), &basis, rng)?);
            }
            Ok(match (2 * ones).cmp(&n) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => u8::from(rng.random_bool(0.5)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BitString::from_bits(bits))
}

/// Per-bit recovery over `trials` independent data bits.
pub fn breidbart_recover_report(
    n: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let tally = run_trials(trials, seed, workers, |_, rng| {
        let a = BitString::random(1, rng);
        let (mut blob, _) = encode_keyed_random(&a, n, rng)?;
        let g = breidbart_recover_keyed(&mut blob, rng)?;
        Ok(Tally::single(g == a, Vec::new()))
    })?;
    Ok(AttackReport::new(
        "breidbart-keyed",
        format!("n={n}"),
        tally.trials,
        tally.successes,
        majority_success(n as u64, breidbart_rate()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epr_opens_both_ways() {
        let r = alice_epr_attack_eq2(2, 3, 500, 1, 2).unwrap();
        assert_eq!(r.successes, 500);
        assert_eq!(r.breakdown("marginal-mixed").unwrap().count, 500);
    }

    #[test]
    fn honest_blob_resists_reopening() {
        let r = honest_reopen_report(1, 1, 4000, 2, 2).unwrap();
        assert!(r.consistent(4.0), "{r:?}");
        let r = honest_reopen_report(4, 8, 2000, 3, 2).unwrap();
        assert_eq!(r.successes, 0);
    }

    #[test]
    fn keyed_recovery_small_run() {
        for n in [1, 2, 5] {
            let r = breidbart_recover_report(n, 4000, 4, 2).unwrap();
            assert!(r.consistent(4.0), "{r:?}");
        }
    }
}
