//! Committer attacks: opening a commitment as a value other than the one
//! committed.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::analysis::probe_attack_b92_success;
use crate::bits::BitString;
use crate::boolfn::BoolFn;
use crate::encode::{Blob, BlobMeta, EncoderId, Slot};
use crate::error::{Error, Result};
use crate::protocol::{
    b92_open, b92_verify, bb84_commit, bb84_open, bb84_verify, commit, ot_receive_rows,
    otbc_verify, OpenMsg, Scheme, SessionConfig, Verification,
};
use crate::quantum::{Basis, JointState, PureState, StatePair};
use crate::sim::{run_trials, Tally};

use super::{short, AttackReport};

/// Positions `j` with `F(a + e_j) != F(a)`.
fn sensitive_positions(f: &BoolFn, a: &BitString) -> Vec<usize> {
    let v = f.eval(a).unwrap_or(0);
    (0..a.len())
        .filter(|&j| f.eval(&a.flipped(j)).unwrap_or(v) != v)
        .collect()
}

/// A uniform `a0` in `F^-1(0)` that one flip moves into `F^-1(1)`, and a
/// uniform such flip position.
pub fn steerable_string<R: Rng + ?Sized>(f: &BoolFn, rng: &mut R) -> Result<(BitString, usize)> {
    for _ in 0..64 {
        let a0 = f.sample_preimage(0, rng)?;
        if let Some(&j) = sensitive_positions(f, &a0).choose(rng) {
            return Ok((a0, j));
        }
    }
    // rare: fall back to the full list of steerable inputs
    let n = f.arity();
    let candidates: Vec<(BitString, Vec<usize>)> = f
        .preimage(0)
        .iter()
        .map(|&x| BitString::from_index(x as usize, n))
        .map(|a| {
            let s = sensitive_positions(f, &a);
            (a, s)
        })
        .filter(|(_, s)| !s.is_empty())
        .collect();
    let (a, s) = candidates
        .choose(rng)
        .ok_or_else(|| Error::domain("F is constant; no string can be steered"))?;
    Ok((a.clone(), *s.choose(rng).expect("nonempty")))
}

/// Blob whose string `i` has its steerable slot entangled with probe
/// register `i`. `state(j, bit)` gives the symbol for position `j`.
fn probe_blob(
    encoder: EncoderId,
    steer: &[(BitString, usize)],
    state: impl Fn(usize, usize, u8) -> PureState,
) -> Result<Blob> {
    let m = steer.len();
    let n = steer[0].0.len();
    let mut slots = Vec::with_capacity(m * n);
    let mut registers = Vec::with_capacity(m);
    for (i, (a0, j)) in steer.iter().enumerate() {
        for (pos, bit) in a0.iter().enumerate() {
            if pos == *j {
                let s0 = state(i, pos, bit);
                let s1 = state(i, pos, 1 - bit);
                registers.push(JointState::entangle_with_probe(&s0, &s1));
                slots.push(Slot::Joint {
                    register: i,
                    qubit: 1,
                });
            } else {
                slots.push(Slot::Pure(state(i, pos, bit)));
            }
        }
    }
    Blob::from_parts(
        BlobMeta {
            encoder,
            m,
            n,
            key_digest: None,
        },
        slots,
        registers,
    )
}

/// Alice measures the probe of each string; returns the collapsed values.
fn collapse_probes<R: Rng + ?Sized>(blob: &mut Blob, rng: &mut R) -> Result<Vec<u8>> {
    (0..blob.m())
        .map(|i| {
            blob.register_mut(i)
                .measure_qubit(0, &Basis::computational(), rng)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTrial {
    pub verification: Verification,
    /// Strings that had to lie.
    pub lying: Vec<bool>,
}

/// One run of the one-probe-per-string attack on the two-state scheme.
pub fn probe_b92_trial<R: Rng + ?Sized>(
    cfg: &SessionConfig,
    target: u8,
    rng: &mut R,
) -> Result<ProbeTrial> {
    let pair = *cfg.require_pair()?;
    let steer = (0..cfg.m())
        .map(|_| steerable_string(cfg.f(), rng))
        .collect::<Result<Vec<_>>>()?;
    let mut blob = probe_blob(EncoderId::Blob2, &steer, |_, _, bit| *pair.state(bit))?;
    let collapsed = collapse_probes(&mut blob, rng)?;
    let mut lying = Vec::with_capacity(cfg.m());
    let strings = steer
        .iter()
        .zip(&collapsed)
        .map(|((a0, j), &c)| {
            // the probe outcome c selects a0 (F = 0) or a0 + e_j (F = 1)
            lying.push(c != target);
            if target == 0 {
                a0.clone()
            } else {
                a0.flipped(*j)
            }
        })
        .collect();
    let open = OpenMsg { b: target, strings };
    let verification = b92_verify(&mut blob, &open, cfg, rng)?;
    Ok(ProbeTrial {
        verification,
        lying,
    })
}

fn tally_probe(t: &ProbeTrial, target: u8) -> Tally {
    let lies = t.lying.iter().filter(|&&l| l).count() as u64;
    let lies_passed = t
        .lying
        .iter()
        .zip(&t.verification.per_string)
        .filter(|(l, p)| **l && **p)
        .count() as u64;
    Tally::single(
        t.verification.verdict.accepted() == Some(target),
        vec![lies, lies_passed],
    )
}

pub fn alice_probe_attack_b92(
    cfg: &SessionConfig,
    target: u8,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let pair = cfg.require_pair()?;
    let tally = run_trials(trials, seed, workers, |_, rng| {
        probe_b92_trial(cfg, target, rng).map(|t| tally_probe(&t, target))
    })?;
    let c2 = pair.cos_a() * pair.cos_a();
    let m = cfg.m();
    Ok(AttackReport::new(
        "probe-b92",
        format!("n={} m={m} cos2A={} target={target}", cfg.n(), short(c2)),
        tally.trials,
        tally.successes,
        probe_attack_b92_success(m as u32, pair.cos_a()),
    )
    .with_breakdown(
        "lying-strings",
        tally.counter(0),
        tally.trials * m as u64,
        Some(0.5),
    )
    .with_breakdown("lies-passed", tally.counter(1), tally.counter(0), Some(c2)))
}

/// How a dishonest opening departs from the committed strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LieKind {
    /// Every string flips one sensitive position so that `F` takes the other
    /// value, and the other value is declared.
    FlipValue,
    /// String 0 flips one position that leaves `F` unchanged.
    FlipFree,
}

fn lie_strings<R: Rng + ?Sized>(
    f: &BoolFn,
    strings: &[BitString],
    kind: LieKind,
    rng: &mut R,
) -> Result<Vec<BitString>> {
    let mut out = strings.to_vec();
    match kind {
        LieKind::FlipValue => {
            for a in &mut out {
                let j = *sensitive_positions(f, a)
                    .choose(rng)
                    .ok_or_else(|| Error::domain("string has no sensitive position"))?;
                a.flip(j);
            }
        }
        LieKind::FlipFree => {
            let sensitive = sensitive_positions(f, &out[0]);
            let free: Vec<usize> = (0..f.arity()).filter(|j| !sensitive.contains(j)).collect();
            let j = *free
                .choose(rng)
                .ok_or_else(|| Error::domain("F depends on every position of the string"))?;
            out[0].flip(j);
        }
    }
    Ok(out)
}

fn lie_open<R: Rng + ?Sized>(
    cfg: &SessionConfig,
    b: u8,
    strings: &[BitString],
    kind: LieKind,
    rng: &mut R,
) -> Result<OpenMsg> {
    Ok(OpenMsg {
        b: if kind == LieKind::FlipValue { 1 - b } else { b },
        strings: lie_strings(cfg.f(), strings, kind, rng)?,
    })
}

/// Honest commit, dishonest open, against the two-state scheme.
pub fn lie_b92_trial<R: Rng + ?Sized>(
    cfg: &SessionConfig,
    kind: LieKind,
    rng: &mut R,
) -> Result<Verification> {
    let b = u8::from(rng.random_bool(0.5));
    let (alice, mut blob) = commit(b, cfg, rng)?;
    let open = lie_open(cfg, b, &b92_open(&alice).strings, kind, rng)?;
    b92_verify(&mut blob, &open, cfg, rng)
}

/// Honest commit, dishonest open, against the oblivious-transfer scheme.
pub fn lie_otbc_trial<R: Rng + ?Sized>(
    cfg: &SessionConfig,
    kind: LieKind,
    rng: &mut R,
) -> Result<Verification> {
    let b = u8::from(rng.random_bool(0.5));
    let (alice, mut blob) = commit(b, cfg, rng)?;
    let receipts = ot_receive_rows(&mut blob, cfg.require_pair()?, rng)?;
    let open = lie_open(cfg, b, &b92_open(&alice).strings, kind, rng)?;
    otbc_verify(&receipts, &open, cfg.f())
}

fn lie_report(
    strategy: &str,
    cfg: &SessionConfig,
    kind: LieKind,
    trials: u64,
    seed: u64,
    workers: usize,
    per_lie: f64,
    trial: impl Fn(&SessionConfig, LieKind, &mut rand_chacha::ChaCha8Rng) -> Result<Verification> + Sync,
) -> Result<AttackReport> {
    let m = cfg.m();
    let tally = run_trials(trials, seed, workers, |_, rng| {
        let v = trial(cfg, kind, rng)?;
        let pass = v.per_string.iter().filter(|&&p| p).count() as u64;
        Ok(Tally::single(v.verdict.accepted().is_some(), vec![pass]))
    })?;
    let (lying, predicted) = match kind {
        LieKind::FlipValue => (m as u64, per_lie.powi(m as i32)),
        LieKind::FlipFree => (1, per_lie),
    };
    let kind_id = match kind {
        LieKind::FlipValue => "flip-value",
        LieKind::FlipFree => "flip-free",
    };
    let cos_a = cfg.require_pair()?.cos_a();
    let report = AttackReport::new(
        strategy,
        format!("n={} m={m} cosA={} lie={kind_id}", cfg.n(), short(cos_a)),
        tally.trials,
        tally.successes,
        predicted,
    );
    let report = if kind == LieKind::FlipValue {
        report.with_breakdown(
            "strings-passed",
            tally.counter(0),
            tally.trials * lying,
            Some(per_lie),
        )
    } else {
        report
    };
    Ok(report)
}

/// Per-lie escape probability `cos^2 A` (Born rule); the report also lists
/// the `sin^2 A` curve as a reference.
pub fn alice_lie_b92(
    cfg: &SessionConfig,
    kind: LieKind,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let c2 = cfg.require_pair()?.cos_a().powi(2);
    let r = lie_report(
        "lie-b92",
        cfg,
        kind,
        trials,
        seed,
        workers,
        c2,
        lie_b92_trial,
    )?;
    let m = if kind == LieKind::FlipValue {
        cfg.m() as i32
    } else {
        1
    };
    Ok(r.with_reference("sin2A-exponent", (1.0 - c2).powi(m)))
}

/// Per-lie escape probability `cos A`: the lying position is unknown to Bob.
pub fn alice_lie_otbc(
    cfg: &SessionConfig,
    kind: LieKind,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let c = cfg.require_pair()?.cos_a();
    lie_report(
        "lie-otbc",
        cfg,
        kind,
        trials,
        seed,
        workers,
        c,
        lie_otbc_trial,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FalseBasisStrategy {
    /// Commit to the other value and unveil every basis flipped.
    UniformFalse,
    /// One probe per string; flip the basis of the steered slot only when
    /// the probe landed on the wrong value.
    ProbeCollapse,
}

impl FalseBasisStrategy {
    pub fn id(self) -> &'static str {
        match self {
            FalseBasisStrategy::UniformFalse => "false-basis-uniform",
            FalseBasisStrategy::ProbeCollapse => "false-basis-probe",
        }
    }

    pub fn per_string(self) -> f64 {
        match self {
            FalseBasisStrategy::UniformFalse => 0.5,
            FalseBasisStrategy::ProbeCollapse => 0.75,
        }
    }
}

/// One run against the four-state scheme; `per_string[i]` is `F(a^(i)) =
/// target` as Bob reads it.
pub fn false_basis_trial<R: Rng + ?Sized>(
    cfg: &SessionConfig,
    target: u8,
    strategy: FalseBasisStrategy,
    rng: &mut R,
) -> Result<Verification> {
    if cfg.scheme() != Scheme::Bb84bc {
        return Err(Error::param(
            "false-basis attacks need the four-state scheme",
        ));
    }
    match strategy {
        FalseBasisStrategy::UniformFalse => {
            let (alice, mut blob) = bb84_commit(1 - target, cfg, rng)?;
            let open = OpenMsg {
                b: target,
                strings: bb84_open(&alice)
                    .strings
                    .iter()
                    .map(BitString::complement)
                    .collect(),
            };
            bb84_verify(&mut blob, &open, cfg, rng)
        }
        FalseBasisStrategy::ProbeCollapse => {
            let n = cfg.n();
            let steer = (0..cfg.m())
                .map(|_| steerable_string(cfg.f(), rng))
                .collect::<Result<Vec<_>>>()?;
            let bases: Vec<BitString> = (0..cfg.m()).map(|_| BitString::random(n, rng)).collect();
            let mut blob = probe_blob(EncoderId::Blob4, &steer, |i, j, bit| {
                PureState::bb84(bases[i].get(j), bit)
            })?;
            let collapsed = collapse_probes(&mut blob, rng)?;
            let strings = bases
                .iter()
                .zip(&steer)
                .zip(&collapsed)
                .map(|((t, (_, j)), &c)| {
                    if c == target {
                        t.clone()
                    } else {
                        t.flipped(*j)
                    }
                })
                .collect();
            let open = OpenMsg { b: target, strings };
            bb84_verify(&mut blob, &open, cfg, rng)
        }
    }
}

pub fn alice_false_basis_attack_bb84(
    cfg: &SessionConfig,
    target: u8,
    strategy: FalseBasisStrategy,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<AttackReport> {
    let m = cfg.m();
    let tally = run_trials(trials, seed, workers, |_, rng| {
        let v = false_basis_trial(cfg, target, strategy, rng)?;
        let pass = v.per_string.iter().filter(|&&p| p).count() as u64;
        Ok(Tally::single(
            v.verdict.accepted() == Some(target),
            vec![pass],
        ))
    })?;
    let p = strategy.per_string();
    Ok(AttackReport::new(
        strategy.id(),
        format!("n={} m={m} target={target}", cfg.n()),
        tally.trials,
        tally.successes,
        p.powi(m as i32),
    )
    .with_breakdown(
        "strings-passed",
        tally.counter(0),
        tally.trials * m as u64,
        Some(p),
    ))
}

fn audit_bases<R: Rng + ?Sized>(extra: usize, rng: &mut R) -> Result<Vec<Basis>> {
    let mut bases = vec![
        Basis::computational(),
        Basis::hadamard(),
        Basis::breidbart(),
    ];
    for _ in 0..extra {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let v = PureState::new(
            num_complex::Complex64::new((theta / 2.0).cos(), 0.0),
            num_complex::Complex64::from_polar((theta / 2.0).sin(), phi),
        )?;
        bases.push(Basis::containing(&v));
    }
    Ok(bases)
}

/// Largest change of the receiver's reduced state caused by any committer
/// measurement on her probe, over the registers every entangling attack
/// builds: two-state probes, four-state probes in both bases, and Bell
/// pairs.
pub fn no_signaling_audit<R: Rng + ?Sized>(
    pair: &StatePair,
    random_bases: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut registers = vec![JointState::bell_pair()];
    for (x, y) in [(0u8, 1u8), (1, 0)] {
        registers.push(JointState::entangle_with_probe(
            pair.state(x),
            pair.state(y),
        ));
        for t in 0..2 {
            registers.push(JointState::entangle_with_probe(
                &PureState::bb84(t, x),
                &PureState::bb84(t, y),
            ));
        }
    }
    let bases = audit_bases(random_bases, rng)?;
    let mut worst = 0.0f64;
    for reg in &registers {
        for basis in &bases {
            worst = worst.max(reg.no_signaling_gap(0, basis, &[1])?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_ci_function, CiKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn steerable_strings_flip_the_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = make_ci_function(7, 3, CiKind::Recursive).unwrap();
        for _ in 0..100 {
            let (a0, j) = steerable_string(&f, &mut rng).unwrap();
            assert_eq!(f.eval(&a0).unwrap(), 0);
            assert_eq!(f.eval(&a0.flipped(j)).unwrap(), 1);
        }
        assert!(steerable_string(&BoolFn::constant(3, false).unwrap(), &mut rng).is_err());
    }

    #[test]
    fn probe_pre_open_state_is_the_honest_mixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pair = StatePair::with_cos(0.75f64.sqrt()).unwrap();
        assert!(no_signaling_audit(&pair, 8, &mut rng).unwrap() < 1e-12);
    }

    #[test]
    fn probe_attack_small_run() {
        let cfg =
            SessionConfig::with_defaults(Scheme::B92bc, 6, 3, Some(0.75f64.sqrt()), 0).unwrap();
        let r = alice_probe_attack_b92(&cfg, 1, 4000, 9, 2).unwrap();
        assert!(r.consistent(4.0), "{r:?}");
    }

    #[test]
    fn false_basis_small_runs() {
        let cfg = SessionConfig::with_defaults(Scheme::Bb84bc, 6, 2, None, 0).unwrap();
        for s in [
            FalseBasisStrategy::UniformFalse,
            FalseBasisStrategy::ProbeCollapse,
        ] {
            let r = alice_false_basis_attack_bb84(&cfg, 0, s, 4000, 10, 2).unwrap();
            assert!(r.consistent(4.0), "{r:?}");
        }
    }

    #[test]
    fn lies_are_caught_at_the_born_rate() {
        let cfg = SessionConfig::with_defaults(Scheme::B92bc, 6, 2, Some(0.8), 0).unwrap();
        let r = alice_lie_b92(&cfg, LieKind::FlipFree, 4000, 11, 2).unwrap();
        assert!(r.consistent(4.0), "{r:?}");
        let o = cfg.with_scheme(Scheme::Otbc).unwrap();
        let r = alice_lie_otbc(&o, LieKind::FlipFree, 4000, 12, 2).unwrap();
        assert!(r.consistent(4.0), "{r:?}");
    }
}
