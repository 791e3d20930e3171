//! Message-driven session state machines and the Bob-side simulator kernel.
//!
//! Quantum registers never travel as amplitudes. Alice's commit message
//! carries slot descriptors that only the kernel reads; the kernel prepares
//! the states, keeps them, and hands Bob's logic an opaque handle. The
//! recorded transcript holds the handle, not the descriptors, unless the
//! session runs in debug mode. This is a fidelity boundary of the simulator,
//! not a security mechanism: whoever controls the kernel sees every state.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::adversary::usd_guess_from_receipts;
use crate::encode::{Blob, EncoderId};
use crate::error::{Error, Result};
use crate::sim::{trial_rng, trial_seed};

use super::config::{Scheme, SessionConfig};
use super::message::{
    kind, CommitPayload, Message, OtReceipt, Phase, Transcript, Verdict, VerdictPayload,
    Verification,
};
use super::schemes::{
    b92_verify, bb84_verify, commit, open, ot_receive_rows, otbc_verify, AliceState,
};

fn protocol_err(msg: impl Into<String>) -> Error {
    Error::Protocol(msg.into())
}

/// Holds prepared blobs behind handles.
#[derive(Debug, Default)]
pub struct Kernel {
    debug: bool,
    next: u64,
    blobs: BTreeMap<u64, Blob>,
}

impl Kernel {
    pub fn new(debug: bool) -> Self {
        Self {
            debug,
            ..Self::default()
        }
    }

    /// Prepares the states described by a commit message and returns the
    /// message as Bob's logic may see it, with the new handle.
    pub fn admit(&mut self, msg: &Message) -> Result<(Message, u64)> {
        let mut payload: CommitPayload = msg.payload_as()?;
        let specs = payload
            .quantum
            .as_ref()
            .ok_or_else(|| protocol_err("commit carries no quantum payload"))?;
        let blob = Blob::from_specs(
            payload.blob.encoder,
            payload.blob.m,
            payload.blob.n,
            specs,
            payload.pair.as_ref(),
        )?;
        let handle = self.admit_blob(blob);
        payload.handle = Some(handle);
        if !self.debug {
            payload.quantum = None;
        }
        Ok((
            Message::new(msg.session, msg.phase, &msg.kind, &payload)?,
            handle,
        ))
    }

    pub fn admit_blob(&mut self, blob: Blob) -> u64 {
        let h = self.next;
        self.next += 1;
        self.blobs.insert(h, blob);
        h
    }

    pub fn blob_mut(&mut self, handle: u64) -> Result<&mut Blob> {
        self.blobs
            .get_mut(&handle)
            .ok_or_else(|| protocol_err(format!("unknown register handle {handle}")))
    }

    pub fn release(&mut self, handle: u64) -> Option<Blob> {
        self.blobs.remove(&handle)
    }
}

/// Bob's behaviour before the open phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BobStrategy {
    #[default]
    Honest,
    /// Discriminates every slot at commit time and, in a coin flip, announces
    /// its best guess of Alice's bit. Verification then uses the recorded
    /// outcomes. Two-state schemes only.
    UsdCurious,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BobPhase {
    AwaitCommit,
    AwaitOpen,
    Done,
}

pub fn session_seed(cfg: &SessionConfig, session: u64) -> u64 {
    trial_seed(cfg.seed(), session)
}

/// The bit Alice commits to in experiment sessions and coin flips.
pub fn session_bit(cfg: &SessionConfig, session: u64) -> u8 {
    u8::from(trial_rng(session_seed(cfg, session), 2).random_bool(0.5))
}

pub struct BobSession {
    cfg: SessionConfig,
    session: u64,
    strategy: BobStrategy,
    rng: ChaCha8Rng,
    kernel: Kernel,
    phase: BobPhase,
    handle: Option<u64>,
    receipts: Option<Vec<OtReceipt>>,
    r_b: Option<u8>,
    messages: Vec<Message>,
    outcome: Option<VerdictPayload>,
}

impl BobSession {
    pub fn new(cfg: &SessionConfig, session: u64, strategy: BobStrategy) -> Result<Self> {
        if strategy == BobStrategy::UsdCurious && !cfg.scheme().needs_pair() {
            return Err(Error::param(
                "a discriminating Bob needs a two-state scheme",
            ));
        }
        Ok(Self {
            cfg: cfg.clone(),
            session,
            strategy,
            rng: trial_rng(session_seed(cfg, session), 1),
            kernel: Kernel::new(cfg.debug),
            phase: BobPhase::AwaitCommit,
            handle: None,
            receipts: None,
            r_b: None,
            messages: Vec::new(),
            outcome: None,
        })
    }

    pub fn session(&self) -> u64 {
        self.session
    }

    pub fn is_done(&self) -> bool {
        self.phase == BobPhase::Done
    }

    /// Processes one message from Alice and returns Bob's replies. A phase
    /// violation ends the session with an abort and returns the error.
    pub fn handle(&mut self, msg: &Message) -> Result<Vec<Message>> {
        if msg.session != self.session {
            return Err(protocol_err(format!(
                "message for session {} delivered to session {}",
                msg.session, self.session
            )));
        }
        let r = match (self.phase, msg.phase, msg.kind.as_str()) {
            (BobPhase::AwaitCommit, Phase::Commit, kind::COMMIT) => self.on_commit(msg),
            (BobPhase::AwaitOpen, Phase::Open, kind::OPEN) => self.on_open(msg),
            (BobPhase::AwaitOpen, Phase::Open, kind::REFUSE) => {
                self.messages.push(msg.clone());
                self.finish(Verdict::Abort {
                    reason: "committer refused to open".into(),
                })
            }
            (phase, got, k) => Err(protocol_err(format!(
                "unexpected {k} message in phase {got:?} while {phase:?}"
            ))),
        };
        if let Err(e) = &r {
            if self.phase != BobPhase::Done {
                self.phase = BobPhase::Done;
                self.outcome = Some(VerdictPayload {
                    per_string: vec![false; self.cfg.m()],
                    verdict: Verdict::Abort {
                        reason: e.to_string(),
                    },
                    coin: None,
                });
            }
        }
        r
    }

    fn on_commit(&mut self, msg: &Message) -> Result<Vec<Message>> {
        let (seen, handle) = self.kernel.admit(msg)?;
        self.messages.push(seen);
        let blob = self.kernel.blob_mut(handle)?;
        let want = match self.cfg.scheme() {
            Scheme::Bb84bc => EncoderId::Blob4,
            _ => EncoderId::Blob2,
        };
        let meta = blob.meta();
        if meta.encoder != want || meta.m != self.cfg.m() || meta.n != self.cfg.n() {
            return Err(protocol_err(format!(
                "commit shape {:?} {}x{} does not match the configuration",
                meta.encoder, meta.m, meta.n
            )));
        }
        let discriminate =
            self.cfg.scheme() == Scheme::Otbc || self.strategy == BobStrategy::UsdCurious;
        if discriminate {
            let pair = *self.cfg.require_pair()?;
            let receipts = ot_receive_rows(blob, &pair, &mut self.rng)?;
            // receipts are classical; nothing quantum is kept
            self.kernel.release(handle);
            self.receipts = Some(receipts);
        } else {
            self.handle = Some(handle);
        }
        self.phase = BobPhase::AwaitOpen;
        let reply = if self.cfg.coin_flip {
            let r_b = match (&self.receipts, self.strategy) {
                (Some(rs), BobStrategy::UsdCurious) => {
                    usd_guess_from_receipts(self.cfg.f(), rs, &mut self.rng)
                }
                _ => u8::from(self.rng.random_bool(0.5)),
            };
            self.r_b = Some(r_b);
            Message::new(self.session, Phase::Announce, kind::ANNOUNCE, &r_b)?
        } else {
            Message::new(
                self.session,
                Phase::Commit,
                kind::ACK,
                &serde_json::Value::Null,
            )?
        };
        self.messages.push(reply.clone());
        Ok(vec![reply])
    }

    fn on_open(&mut self, msg: &Message) -> Result<Vec<Message>> {
        self.messages.push(msg.clone());
        let open = match msg.payload_as() {
            Ok(o) => o,
            Err(e) => {
                let v = Verification::malformed(self.cfg.m(), e.to_string());
                return self.finish_with(v);
            }
        };
        let v = match (&self.receipts, self.cfg.scheme()) {
            (Some(rs), _) => otbc_verify(rs, &open, self.cfg.f())?,
            (None, scheme) => {
                let handle = self
                    .handle
                    .ok_or_else(|| protocol_err("no committed register"))?;
                let mut blob = self
                    .kernel
                    .release(handle)
                    .ok_or_else(|| protocol_err("register already released"))?;
                match scheme {
                    Scheme::Bb84bc => bb84_verify(&mut blob, &open, &self.cfg, &mut self.rng)?,
                    _ => b92_verify(&mut blob, &open, &self.cfg, &mut self.rng)?,
                }
            }
        };
        self.finish_with(v)
    }

    fn finish(&mut self, verdict: Verdict) -> Result<Vec<Message>> {
        let v = Verification {
            per_string: vec![false; self.cfg.m()],
            verdict,
        };
        self.finish_with(v)
    }

    fn finish_with(&mut self, v: Verification) -> Result<Vec<Message>> {
        let coin = match (self.r_b, v.verdict.accepted()) {
            (Some(r_b), Some(r_a)) => Some(r_a ^ r_b),
            _ => None,
        };
        let payload = VerdictPayload {
            per_string: v.per_string,
            verdict: v.verdict,
            coin,
        };
        let reply = Message::new(self.session, Phase::Verdict, kind::VERDICT, &payload)?;
        self.messages.push(reply.clone());
        self.outcome = Some(payload);
        self.phase = BobPhase::Done;
        Ok(vec![reply])
    }

    /// Bob's announced coin-flip bit, once sent.
    pub fn announced(&self) -> Option<u8> {
        self.r_b
    }

    pub fn outcome(&self) -> Option<&VerdictPayload> {
        self.outcome.as_ref()
    }

    /// The transcript, available once the session has ended.
    pub fn transcript(&self) -> Option<Transcript> {
        let out = self.outcome.as_ref()?;
        Some(Transcript {
            session: self.session,
            scheme: self.cfg.scheme(),
            messages: self.messages.clone(),
            per_string: out.per_string.clone(),
            verdict: out.verdict.clone(),
        })
    }
}

pub struct AliceSession {
    cfg: SessionConfig,
    session: u64,
    b: u8,
    rng: ChaCha8Rng,
    state: Option<AliceState>,
    refuse_open: bool,
    outcome: Option<VerdictPayload>,
}

impl AliceSession {
    pub fn new(cfg: &SessionConfig, session: u64, b: u8) -> Self {
        Self {
            cfg: cfg.clone(),
            session,
            b,
            rng: trial_rng(session_seed(cfg, session), 0),
            state: None,
            refuse_open: false,
            outcome: None,
        }
    }

    /// Alice commits but declines to open.
    pub fn refusing(mut self) -> Self {
        self.refuse_open = true;
        self
    }

    pub fn session(&self) -> u64 {
        self.session
    }

    pub fn bit(&self) -> u8 {
        self.b
    }

    /// The commit message, with slot descriptors for the kernel.
    pub fn start(&mut self) -> Result<Message> {
        if self.state.is_some() {
            return Err(protocol_err("already committed"));
        }
        let (state, blob) = commit(self.b, &self.cfg, &mut self.rng)?;
        let specs = match state.scheme {
            Scheme::Bb84bc => state.key.four_state_specs()?,
            _ => state.key.two_state_specs()?,
        };
        let payload = CommitPayload {
            blob: blob.meta().public(),
            pair: self.cfg.pair().copied(),
            handle: None,
            quantum: Some(specs),
        };
        self.state = Some(state);
        Message::new(self.session, Phase::Commit, kind::COMMIT, &payload)
    }

    pub fn handle(&mut self, msg: &Message) -> Result<Vec<Message>> {
        if msg.session != self.session {
            return Err(protocol_err("message for another session"));
        }
        match (msg.phase, msg.kind.as_str()) {
            (Phase::Commit, kind::ACK) | (Phase::Announce, kind::ANNOUNCE) => {
                let state = self
                    .state
                    .as_ref()
                    .ok_or_else(|| protocol_err("nothing committed"))?;
                if self.refuse_open {
                    Ok(vec![Message::new(
                        self.session,
                        Phase::Open,
                        kind::REFUSE,
                        &serde_json::Value::Null,
                    )?])
                } else {
                    Ok(vec![Message::new(
                        self.session,
                        Phase::Open,
                        kind::OPEN,
                        &open(state),
                    )?])
                }
            }
            (Phase::Verdict, kind::VERDICT) => {
                self.outcome = Some(msg.payload_as()?);
                Ok(Vec::new())
            }
            (_, kind::ERROR) => Err(protocol_err(format!("peer reported: {}", msg.payload))),
            (phase, k) => Err(protocol_err(format!(
                "unexpected {k} message in phase {phase:?}"
            ))),
        }
    }

    pub fn outcome(&self) -> Option<&VerdictPayload> {
        self.outcome.as_ref()
    }

    pub fn is_done(&self) -> bool {
        self.outcome.is_some()
    }
}

/// Result of an in-process session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    pub bit: u8,
    pub transcript: Transcript,
    pub announced: Option<u8>,
    pub coin: Option<u8>,
}

/// Delivers messages between the two parties until Bob has decided.
pub fn drive(alice: &mut AliceSession, bob: &mut BobSession) -> Result<()> {
    let mut to_bob = vec![alice.start()?];
    while !to_bob.is_empty() {
        let mut to_alice = Vec::new();
        for m in &to_bob {
            to_alice.extend(bob.handle(m)?);
        }
        to_bob.clear();
        for m in &to_alice {
            to_bob.extend(alice.handle(m)?);
        }
    }
    Ok(())
}

/// Runs one session of `cfg` in process.
pub fn run_session(
    cfg: &SessionConfig,
    session: u64,
    b: u8,
    strategy: BobStrategy,
) -> Result<SessionOutcome> {
    let mut alice = AliceSession::new(cfg, session, b);
    let mut bob = BobSession::new(cfg, session, strategy)?;
    drive(&mut alice, &mut bob)?;
    finish(&alice, &bob)
}

fn finish(alice: &AliceSession, bob: &BobSession) -> Result<SessionOutcome> {
    let transcript = bob
        .transcript()
        .ok_or_else(|| protocol_err("session ended without a verdict"))?;
    let out = bob.outcome().expect("done sessions have an outcome");
    Ok(SessionOutcome {
        bit: alice.bit(),
        announced: bob.announced(),
        coin: out.coin,
        transcript,
    })
}

/// Coin flip on top of the configured commitment: Alice commits a random
/// `r_A`, Bob announces `r_B`, Alice opens, the result is `r_A xor r_B`.
/// `coin` is `None` when the session aborted or was rejected.
pub fn coin_flip(
    cfg: &SessionConfig,
    session: u64,
    strategy: BobStrategy,
    alice_opens: bool,
) -> Result<SessionOutcome> {
    let mut cfg = cfg.clone();
    cfg.coin_flip = true;
    let mut alice = AliceSession::new(&cfg, session, session_bit(&cfg, session));
    if !alice_opens {
        alice = alice.refusing();
    }
    let mut bob = BobSession::new(&cfg, session, strategy)?;
    drive(&mut alice, &mut bob)?;
    finish(&alice, &bob)
}
