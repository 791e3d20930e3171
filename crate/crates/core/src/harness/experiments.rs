//! The experiment registry.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::adversary::{
    alice_epr_attack_eq2, alice_false_basis_attack_bb84, alice_lie_b92, alice_lie_otbc,
    alice_probe_attack_b92, bob_breidbart_report, bob_usd_report, breidbart_recover_report,
    honest_reopen_report, linear_usd_guess_rate, short, AttackReport, ComponentReader,
    FalseBasisStrategy, LieKind,
};
use crate::analysis::{breidbart_rate, concealing_exact, RANDOM_BASIS_RATE};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::protocol::{
    coin_flip, ot_receive, ot_send, run_session, session_bit, BobStrategy, Scheme, SessionConfig,
};
use crate::quantum::{
    breidbart_measure, projective_measure, usd_measure, Basis, PureState, UsdOutcome,
};
use crate::sim::{run_trials, Tally};

use super::config::{ExperimentConfig, Transport};
use super::transport;

pub struct StrategyInfo {
    pub id: &'static str,
    pub about: &'static str,
}

pub const STRATEGIES: &[StrategyInfo] = &[
    StrategyInfo {
        id: "usd-rate",
        about: "unambiguous discrimination success and error counts",
    },
    StrategyInfo {
        id: "random-basis-rate",
        about: "four-state component read in a random basis",
    },
    StrategyInfo {
        id: "breidbart-rate",
        about: "four-state component read in the Breidbart basis",
    },
    StrategyInfo {
        id: "concealing-count",
        about: "strings with at most n0 identified positions",
    },
    StrategyInfo {
        id: "ot-known",
        about: "oblivious transfer receipts: known positions and errors",
    },
    StrategyInfo {
        id: "honest",
        about: "honest sessions of the configured scheme",
    },
    StrategyInfo {
        id: "coin-flip",
        about: "honest coin flips; success counts result 1",
    },
    StrategyInfo {
        id: "coin-flip-curious",
        about: "coin flips against a discriminating receiver; success counts r_B = r_A",
    },
    StrategyInfo {
        id: "bob-usd-guess",
        about: "receiver guesses a two-state commitment",
    },
    StrategyInfo {
        id: "bob-breidbart-guess",
        about: "receiver guesses a four-state commitment, Breidbart reads",
    },
    StrategyInfo {
        id: "bob-random-basis-guess",
        about: "receiver guesses a four-state commitment, random-basis reads",
    },
    StrategyInfo {
        id: "probe-b92",
        about: "one entangled probe per string, two-state scheme",
    },
    StrategyInfo {
        id: "lie-b92",
        about: "every string lies in one position to flip the value",
    },
    StrategyInfo {
        id: "lie-b92-free",
        about: "one string lies in a position F ignores",
    },
    StrategyInfo {
        id: "lie-otbc",
        about: "every string lies in one position, OT scheme",
    },
    StrategyInfo {
        id: "lie-otbc-free",
        about: "one string lies in a position F ignores, OT scheme",
    },
    StrategyInfo {
        id: "false-basis-uniform",
        about: "four-state scheme opened with every basis flipped",
    },
    StrategyInfo {
        id: "false-basis-probe",
        about: "four-state scheme, probe-collapse with selective basis flips",
    },
    StrategyInfo {
        id: "epr-eq2",
        about: "Bell-pair commitment opened both ways",
    },
    StrategyInfo {
        id: "eq2-honest-reopen",
        about: "honest basis-committed blob opened as the complement",
    },
    StrategyInfo {
        id: "breidbart-keyed",
        about: "majority of Breidbart reads of a keyed repetition blob",
    },
];

/// Summary numbers of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials: u64,
    pub successes: u64,
    pub mean: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub z_score: f64,
    pub duration_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub report: AttackReport,
    pub stats: TrialStats,
}

fn rate_report(id: &str, params: String, tally: &Tally, predicted: f64) -> AttackReport {
    AttackReport::new(id, params, tally.trials, tally.successes, predicted)
}

fn scheme_of(cfg: &ExperimentConfig, default: Scheme) -> Scheme {
    cfg.scheme.unwrap_or(default)
}

/// Honest or coin-flip sessions; trial `i` is session `i`.
fn sessions(
    cfg: &ExperimentConfig,
    session: &SessionConfig,
    strategy: BobStrategy,
) -> Result<Tally> {
    match &cfg.transport {
        Transport::InProcess => run_trials(cfg.trials, cfg.seed, cfg.workers, |i, _| {
            let out = if session.coin_flip {
                coin_flip(session, i, strategy, true)?
            } else {
                run_session(session, i, session_bit(session, i), strategy)?
            };
            let announced = out
                .announced
                .filter(|_| strategy == BobStrategy::UsdCurious);
            Ok(session_tally(
                session,
                out.bit,
                out.transcript.verdict.accepted(),
                out.coin,
                announced,
            ))
        }),
        other => {
            if strategy != BobStrategy::Honest {
                return Err(Error::param("socket sessions use an honest receiver"));
            }
            let results = transport::run_remote(other, session, cfg.trials, cfg.workers)?;
            Ok(results
                .iter()
                .map(|r| {
                    session_tally(
                        session,
                        r.bit,
                        r.outcome.verdict.accepted(),
                        r.outcome.coin,
                        None,
                    )
                })
                .fold(Tally::default(), Tally::merge))
        }
    }
}

/// `announced` is set only for a discriminating receiver, whose success is
/// guessing Alice's bit.
fn session_tally(
    cfg: &SessionConfig,
    bit: u8,
    accepted: Option<u8>,
    coin: Option<u8>,
    announced: Option<u8>,
) -> Tally {
    let ok = accepted == Some(bit);
    if cfg.coin_flip {
        let matched = announced.map(|r_b| r_b == bit);
        let success = match matched {
            Some(m) => m,
            None => coin == Some(1),
        };
        Tally::single(success, vec![u64::from(ok), u64::from(coin.is_some())])
    } else {
        Tally::single(ok, vec![u64::from(accepted.is_some())])
    }
}

/// Runs the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let report = run_report(cfg)?;
    let stats = TrialStats {
        trials: report.trials,
        successes: report.successes,
        mean: report.rate(),
        stderr: report.stderr(),
        predicted: report.predicted,
        z_score: report.z_score,
        duration_ms: start.elapsed().as_millis(),
    };
    Ok(ExperimentResult {
        config: cfg.clone(),
        report,
        stats,
    })
}

fn run_report(cfg: &ExperimentConfig) -> Result<AttackReport> {
    let (trials, seed, workers) = (cfg.trials, cfg.seed, cfg.workers);
    let id = cfg.experiment.as_str();
    match id {
        "usd-rate" => {
            let pair = cfg.pair()?;
            let tally = run_trials(trials, seed, workers, |_, rng| {
                let b = u8::from(rng.random_bool(0.5));
                let out = usd_measure(pair.state(b), &pair, rng);
                let wrong = matches!(out, UsdOutcome::Identified(v) if v != b);
                Ok(Tally::single(out.bit().is_some(), vec![u64::from(wrong)]))
            })?;
            Ok(rate_report(
                id,
                format!("cosA={}", short(pair.cos_a())),
                &tally,
                pair.usd_success(),
            )
            .with_breakdown("misidentified", tally.counter(0), tally.trials, Some(0.0)))
        }
        "random-basis-rate" | "breidbart-rate" => {
            let breidbart = id == "breidbart-rate";
            let tally = run_trials(trials, seed, workers, |_, rng| {
                let (basis, bit) = (
                    u8::from(rng.random_bool(0.5)),
                    u8::from(rng.random_bool(0.5)),
                );
                let state = PureState::bb84(basis, bit);
                let read = if breidbart {
                    breidbart_measure(&state, rng)
                } else {
                    projective_measure(&state, &Basis::bb84(u8::from(rng.random_bool(0.5))), rng).0
                };
                Ok(Tally::single(read == bit, Vec::new()))
            })?;
            let p = if breidbart {
                breidbart_rate()
            } else {
                RANDOM_BASIS_RATE
            };
            Ok(rate_report(id, String::new(), &tally, p))
        }
        "concealing-count" => {
            let pair = cfg.pair()?;
            let (n, n0) = (cfg.n, cfg.n0()?);
            let tally = run_trials(trials, seed, workers, |_, rng| {
                let a = BitString::random(n, rng);
                let mut blob = ot_send(&a, &pair)?;
                let r = ot_receive(&mut blob, &pair, rng)?;
                Ok(Tally::single(r.known() <= n0, Vec::new()))
            })?;
            let p = concealing_exact(n as u64, n0 as u64, pair.usd_success())?;
            Ok(rate_report(
                id,
                format!("n={n} n0={n0} pA={}", short(pair.usd_success())),
                &tally,
                p,
            ))
        }
        "ot-known" => {
            let pair = cfg.pair()?;
            let n = cfg.n;
            let tally = run_trials(trials, seed, workers, |_, rng| {
                let a = BitString::random(n, rng);
                let mut blob = ot_send(&a, &pair)?;
                let r = ot_receive(&mut blob, &pair, rng)?;
                let correct = r.first_mismatch(&a).is_none();
                Ok(Tally::single(
                    correct,
                    vec![r.known() as u64, u64::from(r.known() == n)],
                ))
            })?;
            let p_a = pair.usd_success();
            Ok(rate_report(
                id,
                format!("n={n} cosA={}", short(pair.cos_a())),
                &tally,
                1.0,
            )
            .with_breakdown(
                "known",
                tally.counter(0),
                tally.trials * n as u64,
                Some(p_a),
            )
            .with_breakdown(
                "all-known",
                tally.counter(1),
                tally.trials,
                Some(p_a.powi(n as i32)),
            ))
        }
        "honest" => {
            let scheme = scheme_of(cfg, Scheme::B92bc);
            let session = cfg.session(scheme)?;
            let tally = sessions(cfg, &session, BobStrategy::Honest)?;
            Ok(rate_report(
                &format!("honest-{scheme}"),
                format!("n={} n0={} m={}", session.n(), session.n0(), session.m()),
                &tally,
                1.0,
            ))
        }
        "coin-flip" | "coin-flip-curious" => {
            let curious = id == "coin-flip-curious";
            let scheme = scheme_of(cfg, Scheme::B92bc);
            let mut session = cfg.session(scheme)?;
            session.coin_flip = true;
            let strategy = if curious {
                BobStrategy::UsdCurious
            } else {
                BobStrategy::Honest
            };
            let tally = sessions(cfg, &session, strategy)?;
            let predicted = if curious {
                linear_usd_guess_rate(session.n0(), cfg.pair()?.usd_success(), session.m())
            } else {
                0.5
            };
            Ok(rate_report(
                &format!("{id}-{scheme}"),
                format!("n={} n0={} m={}", session.n(), session.n0(), session.m()),
                &tally,
                predicted,
            )
            .with_breakdown("accepted", tally.counter(0), tally.trials, Some(1.0)))
        }
        "bob-usd-guess" => {
            bob_usd_report(&cfg.function()?, cfg.m, &cfg.pair()?, trials, seed, workers)
        }
        "bob-breidbart-guess" => bob_breidbart_report(
            &cfg.function()?,
            cfg.m,
            ComponentReader::Breidbart,
            trials,
            seed,
            workers,
        ),
        "bob-random-basis-guess" => bob_breidbart_report(
            &cfg.function()?,
            cfg.m,
            ComponentReader::RandomBasis,
            trials,
            seed,
            workers,
        ),
        "probe-b92" => alice_probe_attack_b92(
            &cfg.session(Scheme::B92bc)?,
            cfg.target,
            trials,
            seed,
            workers,
        ),
        "lie-b92" => alice_lie_b92(
            &cfg.session(Scheme::B92bc)?,
            LieKind::FlipValue,
            trials,
            seed,
            workers,
        ),
        "lie-b92-free" => alice_lie_b92(
            &cfg.session(Scheme::B92bc)?,
            LieKind::FlipFree,
            trials,
            seed,
            workers,
        ),
        "lie-otbc" => alice_lie_otbc(
            &cfg.session(Scheme::Otbc)?,
            LieKind::FlipValue,
            trials,
            seed,
            workers,
        ),
        "lie-otbc-free" => alice_lie_otbc(
            &cfg.session(Scheme::Otbc)?,
            LieKind::FlipFree,
            trials,
            seed,
            workers,
        ),
        "false-basis-uniform" => alice_false_basis_attack_bb84(
            &cfg.session(Scheme::Bb84bc)?,
            cfg.target,
            FalseBasisStrategy::UniformFalse,
            trials,
            seed,
            workers,
        ),
        "false-basis-probe" => alice_false_basis_attack_bb84(
            &cfg.session(Scheme::Bb84bc)?,
            cfg.target,
            FalseBasisStrategy::ProbeCollapse,
            trials,
            seed,
            workers,
        ),
        "epr-eq2" => alice_epr_attack_eq2(cfg.k, cfg.n, trials, seed, workers),
        "eq2-honest-reopen" => honest_reopen_report(cfg.k, cfg.n, trials, seed, workers),
        "breidbart-keyed" => breidbart_recover_report(cfg.n, trials, seed, workers),
        other => Err(Error::param(format!("unknown experiment {other:?}"))),
    }
}
