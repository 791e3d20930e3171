//! Commit, open and verify for the three commitment schemes, and the
//! oblivious transfer they build on.

use rand::Rng;

use crate::bits::BitString;
use crate::boolfn::BoolFn;
use crate::encode::{blob2_from_key, blob4_from_key, encode_simple, Blob, CommitKey};
use crate::error::{Error, Result};
use crate::quantum::{Basis, StatePair, UsdOutcome};

use super::config::{Scheme, SessionConfig, VerifyMode};
use super::message::{OpenMsg, OtReceipt, Verdict, Verification};

/// What Alice keeps after committing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliceState {
    pub scheme: Scheme,
    pub b: u8,
    pub key: CommitKey,
}

fn check_bit(b: u8) -> Result<()> {
    if b > 1 {
        return Err(Error::param(format!(
            "committed value must be 0 or 1, got {b}"
        )));
    }
    Ok(())
}

fn check_scheme(cfg: &SessionConfig, want: Scheme) -> Result<()> {
    if cfg.scheme() != want {
        return Err(Error::param(format!(
            "configuration is for {}, not {want}",
            cfg.scheme()
        )));
    }
    Ok(())
}

pub fn b92_commit<R: Rng + ?Sized>(
    b: u8,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<(AliceState, Blob)> {
    check_scheme(cfg, Scheme::B92bc)?;
    check_bit(b)?;
    let key = CommitKey::sample(b, cfg.f(), cfg.m(), rng)?;
    let blob = blob2_from_key(&key, cfg.require_pair()?)?;
    Ok((
        AliceState {
            scheme: Scheme::B92bc,
            b,
            key,
        },
        blob,
    ))
}

pub fn bb84_commit<R: Rng + ?Sized>(
    b: u8,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<(AliceState, Blob)> {
    check_scheme(cfg, Scheme::Bb84bc)?;
    check_bit(b)?;
    let key = CommitKey::sample_with_bases(b, cfg.f(), cfg.m(), rng)?;
    let blob = blob4_from_key(&key)?;
    Ok((
        AliceState {
            scheme: Scheme::Bb84bc,
            b,
            key,
        },
        blob,
    ))
}

/// `m` oblivious transfers, one per string of `F^-1(b)`, as rows of one blob.
pub fn otbc_commit<R: Rng + ?Sized>(
    b: u8,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<(AliceState, Blob)> {
    check_scheme(cfg, Scheme::Otbc)?;
    check_bit(b)?;
    let key = CommitKey::sample(b, cfg.f(), cfg.m(), rng)?;
    let blob = blob2_from_key(&key, cfg.require_pair()?)?;
    Ok((
        AliceState {
            scheme: Scheme::Otbc,
            b,
            key,
        },
        blob,
    ))
}

pub fn commit<R: Rng + ?Sized>(
    b: u8,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<(AliceState, Blob)> {
    match cfg.scheme() {
        Scheme::B92bc => b92_commit(b, cfg, rng),
        Scheme::Bb84bc => bb84_commit(b, cfg, rng),
        Scheme::Otbc => otbc_commit(b, cfg, rng),
    }
}

pub fn b92_open(alice: &AliceState) -> OpenMsg {
    OpenMsg {
        b: alice.b,
        strings: alice.key.a_strings.clone(),
    }
}

/// Unveils only the basis strings.
pub fn bb84_open(alice: &AliceState) -> OpenMsg {
    OpenMsg {
        b: alice.b,
        strings: alice.key.basis_strings.clone().unwrap_or_default(),
    }
}

pub fn otbc_open(alice: &AliceState) -> OpenMsg {
    b92_open(alice)
}

pub fn open(alice: &AliceState) -> OpenMsg {
    match alice.scheme {
        Scheme::Bb84bc => bb84_open(alice),
        _ => b92_open(alice),
    }
}

fn check_open(open: &OpenMsg, m: usize, n: usize) -> std::result::Result<(), String> {
    if open.b > 1 {
        return Err(format!("declared value {}", open.b));
    }
    if open.strings.len() != m {
        return Err(format!("{} strings, expected {m}", open.strings.len()));
    }
    if let Some(i) = open.strings.iter().position(|s| s.len() != n) {
        return Err(format!(
            "string {i} has length {}, expected {n}",
            open.strings[i].len()
        ));
    }
    Ok(())
}

/// Combines per-string checks. `failed[i]` names the first failing position
/// of string `i`, `values[i]` is `F` of the recovered or unveiled string.
fn decide(b: u8, failed: &[Option<usize>], values: &[u8], what: &str) -> Verification {
    let per_string = failed
        .iter()
        .zip(values)
        .map(|(f, &v)| f.is_none() && v == b)
        .collect();
    let verdict = if let Some((i, j)) = failed
        .iter()
        .enumerate()
        .find_map(|(i, f)| f.map(|j| (i, j)))
    {
        Verdict::reject(format!("{what} mismatch at string {i}, position {j}"))
    } else if values.iter().any(|&v| v != values[0]) {
        Verdict::reject("strings evaluate to different values of F")
    } else if values[0] != b {
        Verdict::reject(format!(
            "declared {b} but the strings evaluate to {}",
            values[0]
        ))
    } else {
        Verdict::Accept { bit: b }
    };
    Verification {
        per_string,
        verdict,
    }
}

fn check_blob(blob: &Blob, m: usize, n: usize) -> Result<()> {
    if blob.m() != m || blob.n() != n {
        return Err(Error::param(format!(
            "blob is {}x{}, configuration expects {m}x{n}",
            blob.m(),
            blob.n()
        )));
    }
    Ok(())
}

/// Measures every slot against the unveiled strings. The blob collapses.
pub fn b92_verify<R: Rng + ?Sized>(
    blob: &mut Blob,
    open: &OpenMsg,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<Verification> {
    let (m, n) = (cfg.m(), cfg.n());
    check_blob(blob, m, n)?;
    if let Err(e) = check_open(open, m, n) {
        return Ok(Verification::malformed(m, e));
    }
    let pair = cfg.require_pair()?;
    let bases = [
        Basis::containing(pair.psi0()),
        Basis::containing(pair.psi1()),
    ];
    let mut failed = vec![None; m];
    for (i, a) in open.strings.iter().enumerate() {
        for (j, bit) in a.iter().enumerate() {
            let idx = blob.index(i, j);
            let ok = match cfg.verify {
                VerifyMode::ClaimedBasis => blob.measure_slot(idx, &bases[bit as usize], rng)? == 0,
                VerifyMode::Usd => match blob.usd_slot(idx, pair, rng)? {
                    UsdOutcome::Identified(v) => v == bit,
                    UsdOutcome::Inconclusive => true,
                },
            };
            if !ok && failed[i].is_none() {
                failed[i] = Some(j);
            }
        }
    }
    let values = eval_all(cfg.f(), &open.strings)?;
    Ok(decide(open.b, &failed, &values, "qubit"))
}

fn eval_all(f: &BoolFn, strings: &[BitString]) -> Result<Vec<u8>> {
    strings.iter().map(|a| f.eval(a)).collect()
}

/// Measures slot `(i, j)` in the unveiled basis, recovers `a^(i)` and checks
/// that every `F(a^(i))` equals the declared value.
pub fn bb84_verify<R: Rng + ?Sized>(
    blob: &mut Blob,
    open: &OpenMsg,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<Verification> {
    let (m, n) = (cfg.m(), cfg.n());
    check_blob(blob, m, n)?;
    if let Err(e) = check_open(open, m, n) {
        return Ok(Verification::malformed(m, e));
    }
    let recovered = bb84_recover(blob, &open.strings, rng)?;
    let values = eval_all(cfg.f(), &recovered)?;
    Ok(decide(open.b, &vec![None; m], &values, "basis"))
}

/// The strings Bob reads off a four-state blob given basis strings.
pub fn bb84_recover<R: Rng + ?Sized>(
    blob: &mut Blob,
    bases: &[BitString],
    rng: &mut R,
) -> Result<Vec<BitString>> {
    bases
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let bits = t
                .iter()
                .enumerate()
                .map(|(j, basis)| blob.measure_slot(blob.index(i, j), &Basis::bb84(basis), rng))
                .collect::<Result<Vec<_>>>()?;
            Ok(BitString::from_bits(bits))
        })
        .collect()
}

/// Sends `a` over the two-state channel.
pub fn ot_send(a: &BitString, pair: &StatePair) -> Result<Blob> {
    encode_simple(a, pair)
}

/// Unambiguous discrimination on every slot of a one-row blob.
pub fn ot_receive<R: Rng + ?Sized>(
    blob: &mut Blob,
    pair: &StatePair,
    rng: &mut R,
) -> Result<OtReceipt> {
    if blob.m() != 1 {
        return Err(Error::param("ot_receive takes a single string"));
    }
    Ok(ot_receive_rows(blob, pair, rng)?.remove(0))
}

/// One receipt per row.
pub fn ot_receive_rows<R: Rng + ?Sized>(
    blob: &mut Blob,
    pair: &StatePair,
    rng: &mut R,
) -> Result<Vec<OtReceipt>> {
    (0..blob.m())
        .map(|i| {
            let positions = (0..blob.n())
                .map(|j| {
                    blob.usd_slot(blob.index(i, j), pair, rng)
                        .map(UsdOutcome::bit)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OtReceipt { positions })
        })
        .collect()
}

/// Checks each receipt is a subset of the unveiled string, then the values
/// of `F`.
pub fn otbc_verify(receipts: &[OtReceipt], open: &OpenMsg, f: &BoolFn) -> Result<Verification> {
    let m = receipts.len();
    let n = f.arity();
    if receipts.iter().any(|r| r.len() != n) {
        return Err(Error::param("receipt length differs from the arity of F"));
    }
    if let Err(e) = check_open(open, m, n) {
        return Ok(Verification::malformed(m, e));
    }
    let failed: Vec<_> = receipts
        .iter()
        .zip(&open.strings)
        .map(|(r, a)| r.first_mismatch(a))
        .collect();
    let values = eval_all(f, &open.strings)?;
    Ok(decide(open.b, &failed, &values, "receipt"))
}
