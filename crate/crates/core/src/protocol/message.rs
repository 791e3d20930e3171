use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bits::BitString;
use crate::encode::{BlobMeta, SlotSpec};
use crate::error::{Error, Result};
use crate::quantum::StatePair;

use super::config::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Commit,
    Announce,
    Open,
    Verdict,
}

/// One classical message. The same shape is used on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub session: u64,
    pub phase: Phase,
    pub kind: String,
    pub payload: Value,
}

impl Message {
    pub fn new<T: Serialize>(session: u64, phase: Phase, kind: &str, payload: &T) -> Result<Self> {
        Ok(Self {
            session,
            phase,
            kind: kind.to_string(),
            payload: serde_json::to_value(payload).map_err(|e| Error::Protocol(e.to_string()))?,
        })
    }

    pub fn payload_as<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        serde_json::from_value(self.payload.clone())
            .map_err(|e| Error::Protocol(format!("malformed {} payload: {e}", self.kind)))
    }
}

/// Message kinds.
pub mod kind {
    pub const COMMIT: &str = "commit";
    pub const ACK: &str = "ack";
    pub const ANNOUNCE: &str = "announce";
    pub const OPEN: &str = "open";
    pub const REFUSE: &str = "refuse";
    pub const VERDICT: &str = "verdict";
    pub const ERROR: &str = "error";
}

/// Commit payload. Alice fills `quantum` with slot descriptors for the
/// simulator kernel; the kernel replaces them with a `handle` before Bob's
/// logic or the transcript sees the message (unless in debug mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitPayload {
    pub blob: BlobMeta,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<StatePair>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub handle: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quantum: Option<Vec<SlotSpec>>,
}

/// Alice's unveiling: the declared bit and `m` strings. For the two-state
/// and OT schemes the strings are the `a` strings; for the four-state scheme
/// they are the basis strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenMsg {
    pub b: u8,
    pub strings: Vec<BitString>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Accept { bit: u8 },
    Reject { reason: String },
    Abort { reason: String },
}

impl Verdict {
    pub fn accepted(&self) -> Option<u8> {
        match self {
            Verdict::Accept { bit } => Some(*bit),
            _ => None,
        }
    }

    pub fn reject(reason: impl Into<String>) -> Self {
        Verdict::Reject {
            reason: reason.into(),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Accept { bit } => write!(f, "Accept({bit})"),
            Verdict::Reject { reason } => write!(f, "Reject: {reason}"),
            Verdict::Abort { reason } => write!(f, "Abort: {reason}"),
        }
    }
}

/// Bob's check of an opening.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// String `i` passed its qubit (or receipt) check and `F(a_i) = b`.
    pub per_string: Vec<bool>,
    pub verdict: Verdict,
}

impl Verification {
    pub(crate) fn malformed(m: usize, reason: impl Into<String>) -> Self {
        Self {
            per_string: vec![false; m],
            verdict: Verdict::reject(format!("malformed open: {}", reason.into())),
        }
    }
}

/// Verdict payload; `coin` carries the coin-flip result when one was run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictPayload {
    pub per_string: Vec<bool>,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coin: Option<u8>,
}

/// Everything Bob saw in one session, in order.
///
/// Canonical JSON field order: `session, scheme, messages, per_string,
/// verdict`; each message is `session, phase, kind, payload`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub session: u64,
    pub scheme: Scheme,
    pub messages: Vec<Message>,
    pub per_string: Vec<bool>,
    pub verdict: Verdict,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcripts always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts always serialize")
    }
}

/// Outcome of receiving one string over oblivious transfer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtReceipt {
    /// `Some(bit)` where the receiver identified the bit, `None` otherwise.
    pub positions: Vec<Option<u8>>,
}

impl OtReceipt {
    pub fn known(&self) -> usize {
        self.positions.iter().filter(|p| p.is_some()).count()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// First position where a known bit disagrees with `a`.
    pub fn first_mismatch(&self, a: &BitString) -> Option<usize> {
        self.positions
            .iter()
            .zip(a.iter())
            .position(|(p, bit)| matches!(p, Some(v) if *v != bit))
    }
}

impl std::fmt::Display for OtReceipt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for p in &self.positions {
            match p {
                Some(v) => write!(f, "{v}")?,
                None => f.write_str("?")?,
            }
        }
        Ok(())
    }
}
