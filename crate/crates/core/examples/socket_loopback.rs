//! Receiver and committer as two endpoints on a TCP socket. The receiver
//! hosts the simulator kernel; the committer only sees handles and verdicts.

use std::sync::{Arc, Mutex};

use qbc::harness::transport::TranscriptSink;
use qbc::harness::{connect, Server};
use qbc::protocol::{run_session, session_bit, BobStrategy, Scheme, SessionConfig};

fn main() -> qbc::Result<()> {
    let cfg = SessionConfig::with_defaults(Scheme::Otbc, 6, 3, Some(0.8), 2024)?;
    let server = Server::bind("127.0.0.1:0", cfg.clone())?;
    let addr = server.local_addr()?.to_string();
    println!("receiver listening on {addr}");

    let log = Arc::new(Mutex::new(Vec::new()));
    let sink_log = Arc::clone(&log);
    let sink: TranscriptSink = Arc::new(move |t| sink_log.lock().unwrap().push(t));

    let sessions: Vec<(u64, u8)> = (0..8).map(|s| (s, session_bit(&cfg, s))).collect();
    let results = std::thread::scope(|scope| {
        let srv = scope.spawn(|| server.serve(Some(2), sink));
        let (a, b) = sessions.split_at(4);
        let first = scope.spawn(|| connect(&addr, &cfg, a));
        let second = connect(&addr, &cfg, b);
        let mut all = first.join().expect("client thread")?;
        all.extend(second?);
        srv.join().expect("server thread")?;
        qbc::Result::Ok(all)
    })?;

    for r in &results {
        println!(
            "session {}: committed {} -> {}",
            r.session, r.bit, r.outcome.verdict
        );
    }
    let mut remote = log.lock().unwrap().clone();
    remote.sort_by_key(|t| t.session);
    let same = remote.iter().all(|t| {
        let local = run_session(
            &cfg,
            t.session,
            sessions[t.session as usize].1,
            BobStrategy::Honest,
        )
        .unwrap();
        local.transcript.to_json() == t.to_json()
    });
    println!("socket transcripts equal in-process transcripts: {same}");
    Ok(())
}
