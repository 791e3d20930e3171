//! Exact posteriors over truth tables.

use rand::Rng;

use crate::bits::BitString;
use crate::boolfn::BoolFn;
use crate::error::{Error, Result};
use crate::protocol::OtReceipt;

/// Largest arity the enumerating attacks accept.
pub const MAX_ENUM_ARITY: usize = 16;

/// `Pr[F(a) = 1 | observation] = num / den`, exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posterior {
    pub num: u128,
    pub den: u128,
}

impl Posterior {
    pub fn is_half(&self) -> bool {
        2 * self.num == self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn check_arity(f: &BoolFn, len: usize) -> Result<()> {
    if f.arity() > MAX_ENUM_ARITY {
        return Err(Error::param(format!(
            "posterior enumeration supports n <= {MAX_ENUM_ARITY}, got {}",
            f.arity()
        )));
    }
    if len != f.arity() {
        return Err(Error::param(format!(
            "observation of length {len} for arity {}",
            f.arity()
        )));
    }
    Ok(())
}

/// Number of inputs in `F^-1(0)` and `F^-1(1)` that agree with every known
/// position.
pub fn consistent_counts(f: &BoolFn, known: &[Option<u8>]) -> Result<[u64; 2]> {
    check_arity(f, known.len())?;
    let n = f.arity();
    let full = (1usize << n) - 1;
    let (mut kmask, mut value) = (0usize, 0usize);
    for (j, k) in known.iter().enumerate() {
        if let Some(v) = k {
            let bit = 1 << (n - 1 - j);
            kmask |= bit;
            if *v == 1 {
                value |= bit;
            }
        }
    }
    let free = full & !kmask;
    let table = f.table();
    let mut counts = [0u64; 2];
    // walk every subset of the free positions
    let mut sub = free;
    loop {
        counts[usize::from(table[value | sub])] += 1;
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    Ok(counts)
}

/// Posterior of `F = 1` for a string drawn uniformly from `F^-1(b)`, `b`
/// uniform, given zero-error knowledge of some positions. Outcomes of
/// unambiguous discrimination do not depend on the unknown bits, so the
/// likelihood of `b` is `c_b / |F^-1(b)|`.
pub fn string_posterior(f: &BoolFn, known: &[Option<u8>]) -> Result<Posterior> {
    let [c0, c1] = consistent_counts(f, known)?;
    let size1 = f.weight() as u128;
    let size0 = (1u128 << f.arity()) - size1;
    let num = c1 as u128 * size0;
    let den = num + c0 as u128 * size1;
    if den == 0 {
        return Err(Error::domain(
            "observation is inconsistent with every input",
        ));
    }
    Ok(Posterior { num, den })
}

/// `ln Pr[obs | b=1] - ln Pr[obs | b=0]`; exactly zero when the two are
/// equal, infinite when one is impossible, `None` when both are.
pub fn usd_log_ratio(f: &BoolFn, known: &[Option<u8>]) -> Result<Option<f64>> {
    let [c0, c1] = consistent_counts(f, known)?;
    let size1 = f.weight() as u128;
    let size0 = (1u128 << f.arity()) - size1;
    let l1 = c1 as u128 * size0;
    let l0 = c0 as u128 * size1;
    Ok(match (l0, l1) {
        (0, 0) => None,
        (0, _) => Some(f64::INFINITY),
        (_, 0) => Some(f64::NEG_INFINITY),
        _ if l0 == l1 => Some(0.0),
        _ => Some((l1 as f64).ln() - (l0 as f64).ln()),
    })
}

/// Relative tolerance below which a summed log ratio counts as a tie.
const TIE_TOL: f64 = 1e-9;

pub(crate) fn decide<R: Rng + ?Sized>(
    ratios: impl IntoIterator<Item = Option<f64>>,
    rng: &mut R,
) -> u8 {
    let mut sum = 0.0;
    let (mut plus_inf, mut minus_inf) = (false, false);
    let mut scale = 0.0f64;
    for r in ratios {
        match r {
            Some(x) if x == f64::INFINITY => plus_inf = true,
            Some(x) if x == f64::NEG_INFINITY => minus_inf = true,
            Some(x) => {
                sum += x;
                scale = scale.max(x.abs());
            }
            None => {
                plus_inf = true;
                minus_inf = true;
            }
        }
    }
    match (plus_inf, minus_inf) {
        (true, false) => 1,
        (false, true) => 0,
        (true, true) => u8::from(rng.random_bool(0.5)),
        (false, false) if sum.abs() <= TIE_TOL * scale.max(1.0) => u8::from(rng.random_bool(0.5)),
        (false, false) => u8::from(sum > 0.0),
    }
}

/// Bayes-optimal guess of the committed bit from per-string receipts, with
/// ties broken by a fair coin.
pub fn usd_guess_from_receipts<R: Rng + ?Sized>(
    f: &BoolFn,
    receipts: &[OtReceipt],
    rng: &mut R,
) -> u8 {
    let ratios: Vec<_> = receipts
        .iter()
        .map(|r| usd_log_ratio(f, &r.positions).ok().flatten())
        .collect();
    decide(ratios, rng)
}

/// `ln Pr[y | b=1] - ln Pr[y | b=0]` when each bit of `y` equals the true
/// component with probability `q`, independently.
pub fn noisy_log_ratio(f: &BoolFn, y: &BitString, q: f64) -> Result<f64> {
    check_arity(f, y.len())?;
    let n = f.arity();
    let r = (1.0 - q) / q;
    let powers: Vec<f64> = (0..=n as i32).map(|d| r.powi(d)).collect();
    let yi = y.to_index() as u32;
    let like = |b: u8| {
        let pre = f.preimage(b);
        if pre.is_empty() {
            return 0.0;
        }
        pre.iter()
            .map(|&a| powers[(a ^ yi).count_ones() as usize])
            .sum::<f64>()
            / pre.len() as f64
    };
    Ok(like(1).ln() - like(0).ln())
}
