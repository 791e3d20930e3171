//! Receiver attacks: learning the committed bit before the open phase.

use rand::Rng;

use crate::analysis::{
    bob_guess_bound, breidbart_rate, concealing_tail, majority_success, RANDOM_BASIS_RATE,
};
use crate::bits::BitString;
use crate::boolfn::BoolFn;
use crate::encode::{blob2_encode, blob4_encode, Blob};
use crate::error::Result;
use crate::protocol::{ot_receive_rows, OtReceipt};
use crate::quantum::{Basis, StatePair};
use crate::sim::{run_trials, Tally};

use super::posterior::{decide, noisy_log_ratio, usd_log_ratio};
use super::{short, AttackReport};

#[derive(Debug, Clone, PartialEq)]
pub struct UsdGuess {
    pub guess: u8,
    pub receipts: Vec<OtReceipt>,
}

/// Discriminates every slot, then takes the Bayes-optimal guess over the
/// full truth table.
pub fn bob_usd_guess<R: Rng + ?Sized>(
    blob: &mut Blob,
    f: &BoolFn,
    pair: &StatePair,
    rng: &mut R,
) -> Result<UsdGuess> {
    let receipts = ot_receive_rows(blob, pair, rng)?;
    let ratios = receipts
        .iter()
        .map(|r| usd_log_ratio(f, &r.positions))
        .collect::<Result<Vec<_>>>()?;
    Ok(UsdGuess {
        guess: decide(ratios, rng),
        receipts,
    })
}

/// Weight of the mask if `F` is linear (or affine).
fn linear_weight(f: &BoolFn) -> Option<u32> {
    let w = f.walsh();
    let mut nonzero = w
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0);
    let (mask, _) = nonzero.next()?;
    nonzero
        .next()
        .is_none()
        .then_some((mask as u32).count_ones())
}

/// Guess rate against a linear `F` on `w = n0 + 1` variables: the bit is
/// learned exactly when some string has every masked position identified.
pub fn linear_usd_guess_rate(n0: usize, p_a: f64, m: usize) -> f64 {
    let reveal = p_a.powi(n0 as i32 + 1);
    1.0 - 0.5 * (1.0 - reveal).powi(m as i32)
}

pub fn bob_usd_report(
    f: &BoolFn,
    m: usize,
    pair: &StatePair,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let n = f.arity();
    let n0 = f.ci_order();
    let p_a = pair.usd_success();
    let tally = run_trials(trials, seed, workers, |_, rng| {
        let b = u8::from(rng.random_bool(0.5));
        let (mut blob, key) = blob2_encode(b, f, m, pair, rng)?;
        let g = bob_usd_guess(&mut blob, f, pair, rng)?;
        let mut known = 0;
        let mut wrong = 0;
        let mut over = 0;
        for (r, a) in g.receipts.iter().zip(&key.a_strings) {
            known += r.known() as u64;
            wrong += r
                .positions
                .iter()
                .zip(a.iter())
                .filter(|(p, bit)| matches!(p, Some(v) if v != bit))
                .count() as u64;
            over += u64::from(r.known() > n0);
        }
        Ok(Tally::single(g.guess == b, vec![known, wrong, over]))
    })?;
    let bound = bob_guess_bound(n as u64, n0 as u64, p_a, m as u32)?;
    let params = format!("n={n} n0={n0} m={m} cosA={}", short(pair.cos_a()));
    let slots = tally.trials * (m * n) as u64;
    let strings = tally.trials * m as u64;
    let over_rate = if n0 < n {
        concealing_tail(n as u64, n0 as u64, p_a)?
    } else {
        0.0
    };
    let report = match linear_weight(f) {
        Some(w) if w as usize == n0 + 1 => AttackReport::new(
            "bob-usd-guess",
            params,
            tally.trials,
            tally.successes,
            linear_usd_guess_rate(n0, p_a, m),
        )
        .with_reference("bound", bound),
        _ => AttackReport::new(
            "bob-usd-guess",
            params,
            tally.trials,
            tally.successes,
            bound,
        )
        .as_bound(),
    };
    Ok(report
        .with_breakdown("known-components", tally.counter(0), slots, Some(p_a))
        .with_breakdown("wrong-known-components", tally.counter(1), slots, Some(0.0))
        .with_breakdown(
            "strings-over-n0",
            tally.counter(2),
            strings,
            Some(over_rate),
        ))
}

/// How Bob reads four-state components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentReader {
    /// The basis halfway between the two conjugate bases.
    Breidbart,
    /// One of the two conjugate bases, uniformly at random.
    RandomBasis,
}

impl ComponentReader {
    /// Probability that one component is read correctly.
    pub fn accuracy(self) -> f64 {
        match self {
            ComponentReader::Breidbart => breidbart_rate(),
            ComponentReader::RandomBasis => RANDOM_BASIS_RATE,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            ComponentReader::Breidbart => "breidbart",
            ComponentReader::RandomBasis => "random-basis",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreidbartGuess {
    pub guess: u8,
    /// The components as read.
    pub strings: Vec<BitString>,
}

/// Reads every slot, then guesses by the posterior under independent
/// component errors.
pub fn bob_breidbart_guess<R: Rng + ?Sized>(
    blob: &mut Blob,
    f: &BoolFn,
    reader: ComponentReader,
    rng: &mut R,
) -> Result<BreidbartGuess> {
    let breidbart = Basis::breidbart();
    let strings = (0..blob.m())
        .map(|i| {
            let bits = (0..blob.n())
                .map(|j| {
                    let idx = blob.index(i, j);
                    match reader {
                        ComponentReader::Breidbart => blob.measure_slot(idx, &breidbart, rng),
                        ComponentReader::RandomBasis => {
                            let basis = Basis::bb84(u8::from(rng.random_bool(0.5)));
                            blob.measure_slot(idx, &basis, rng)
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BitString::from_bits(bits))
        })
        .collect::<Result<Vec<_>>>()?;
    let q = reader.accuracy();
    let ratios = strings
        .iter()
        .map(|y| noisy_log_ratio(f, y, q).map(Some))
        .collect::<Result<Vec<_>>>()?;
    Ok(BreidbartGuess {
        guess: decide(ratios, rng),
        strings,
    })
}

/// Guess rate against a linear `F` of weight `w`: each string yields the
/// parity with accuracy `(1 + (2q-1)^w)/2` and the optimal combination is a
/// majority vote.
pub fn linear_breidbart_rate(w: usize, q: f64, m: usize) -> f64 {
    let per_string = 0.5 * (1.0 + (2.0 * q - 1.0).powi(w as i32));
    majority_success(m as u64, per_string)
}

pub fn bob_breidbart_report(
    f: &BoolFn,
    m: usize,
    reader: ComponentReader,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let n = f.arity();
    let tally = run_trials(trials, seed, workers, |_, rng| {
        let b = u8::from(rng.random_bool(0.5));
        let (mut blob, key) = blob4_encode(b, f, m, rng)?;
        let g = bob_breidbart_guess(&mut blob, f, reader, rng)?;
        let correct: usize = g
            .strings
            .iter()
            .zip(&key.a_strings)
            .map(|(y, a)| n - y.hamming(a))
            .sum();
        Ok(Tally::single(g.guess == b, vec![correct as u64]))
    })?;
    let q = reader.accuracy();
    let predicted = match linear_weight(f) {
        Some(w) => linear_breidbart_rate(w as usize, q, m),
        None => f64::NAN,
    };
    let strategy = format!("bob-{}-guess", reader.id());
    let params = format!("n={n} n0={} m={m}", f.ci_order());
    Ok(
        AttackReport::new(&strategy, params, tally.trials, tally.successes, predicted)
            .with_breakdown(
                "components-correct",
                tally.counter(0),
                tally.trials * (m * n) as u64,
                Some(q),
            ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_ci_function, CiKind};

    #[test]
    fn dictator_rate_matches_linear_formula() {
        // F = a_1: n0 = 0
        assert!(
            (linear_usd_guess_rate(0, 0.2, 3) - crate::analysis::dictator_guess_rate(3, 0.2)).abs()
                < 1e-15
        );
    }

    #[test]
    fn usd_guess_small_run() {
        let f = make_ci_function(4, 0, CiKind::LinearMask).unwrap();
        let pair = StatePair::with_cos(0.8).unwrap();
        let r = bob_usd_report(&f, 2, &pair, 4000, 1, 2).unwrap();
        assert!(r.consistent(4.0), "{r:?}");
        assert_eq!(r.breakdown("wrong-known-components").unwrap().count, 0);
    }

    #[test]
    fn breidbart_guess_small_run() {
        let f = make_ci_function(4, 1, CiKind::LinearMask).unwrap();
        let r = bob_breidbart_report(&f, 3, ComponentReader::Breidbart, 4000, 2, 2).unwrap();
        assert!(r.consistent(4.0), "{r:?}");
        let c = r.breakdown("components-correct").unwrap();
        assert!(c.z_score().unwrap().abs() < 4.0);
    }
}
