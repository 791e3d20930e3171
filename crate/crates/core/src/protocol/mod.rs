//! Commit/open state machines for the three commitment schemes, oblivious
//! transfer and coin flipping.

pub mod config;
pub mod message;
pub mod schemes;
pub mod session;

pub use config::{Scheme, SessionConfig, VerifyMode, DEFAULT_GAP};
pub use message::{
    kind, CommitPayload, Message, OpenMsg, OtReceipt, Phase, Transcript, Verdict, VerdictPayload,
    Verification,
};
pub use schemes::{
    b92_commit, b92_open, b92_verify, bb84_commit, bb84_open, bb84_recover, bb84_verify, commit,
    open, ot_receive, ot_receive_rows, ot_send, otbc_commit, otbc_open, otbc_verify, AliceState,
};
pub use session::{
    coin_flip, drive, run_session, session_bit, session_seed, AliceSession, BobSession,
    BobStrategy, Kernel, SessionOutcome,
};
