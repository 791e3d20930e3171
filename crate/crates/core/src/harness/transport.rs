//! Length-prefixed JSON frames over TCP.
//!
//! A frame is a 4-byte big-endian length followed by that many bytes of UTF-8
//! JSON with the fields `session, phase, kind, payload`. The receiver side
//! hosts the simulator kernel; see [`crate::protocol::Kernel`]. One thread
//! serves each connection, and a connection may carry several sessions with
//! distinct ids.

use std::collections::BTreeMap;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::protocol::{
    kind, session_bit, AliceSession, BobSession, BobStrategy, Message, SessionConfig, Transcript,
    VerdictPayload,
};

use super::config::Transport;

/// Largest accepted frame body.
pub const MAX_FRAME: u32 = 16 * 1024 * 1024;

/// Sessions a client keeps in flight on one connection.
const WINDOW: usize = 32;

const IO_TIMEOUT: Duration = Duration::from_secs(60);

fn frame_err(msg: impl Into<String>) -> Error {
    Error::Frame(msg.into())
}

pub fn write_frame<W: Write>(w: &mut W, msg: &Message) -> Result<()> {
    let body = serde_json::to_vec(msg).map_err(|e| frame_err(e.to_string()))?;
    let len = u32::try_from(body.len())
        .ok()
        .filter(|&l| l <= MAX_FRAME)
        .ok_or_else(|| frame_err(format!("frame of {} bytes exceeds the limit", body.len())))?;
    w.write_all(&len.to_be_bytes())?;
    w.write_all(&body)?;
    Ok(())
}

/// Reads one frame; `None` on a clean end of stream between frames.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Message>> {
    let mut len = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        match r.read(&mut len[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(frame_err("truncated length prefix")),
            Ok(k) => got += k,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    let len = u32::from_be_bytes(len);
    if len > MAX_FRAME {
        return Err(frame_err(format!("frame length {len} exceeds the limit")));
    }
    let mut body = vec![0u8; len as usize];
    r.read_exact(&mut body).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => frame_err(format!("truncated frame: expected {len} bytes")),
        _ => e.into(),
    })?;
    let text = std::str::from_utf8(&body).map_err(|_| frame_err("frame body is not UTF-8"))?;
    serde_json::from_str(text)
        .map(Some)
        .map_err(|e| frame_err(format!("malformed frame body: {e}")))
}

/// Receives finished transcripts on the server side.
pub type TranscriptSink = Arc<dyn Fn(Transcript) + Send + Sync>;

pub fn discard_transcripts() -> TranscriptSink {
    Arc::new(|_| {})
}

/// Serves Bob's side of every session on one stream until it closes. A
/// malformed frame aborts the connection; a phase violation is answered with
/// an error message first.
pub fn serve_stream<R: Read, W: Write>(
    reader: &mut R,
    writer: &mut W,
    cfg: &SessionConfig,
    sink: &TranscriptSink,
) -> Result<()> {
    let mut live: BTreeMap<u64, BobSession> = BTreeMap::new();
    let mut finished = std::collections::BTreeSet::new();
    while let Some(msg) = read_frame(reader)? {
        let fresh = msg.kind == kind::COMMIT
            && !live.contains_key(&msg.session)
            && !finished.contains(&msg.session);
        if fresh {
            live.insert(
                msg.session,
                BobSession::new(cfg, msg.session, BobStrategy::Honest)?,
            );
        }
        let result = match live.get_mut(&msg.session) {
            Some(bob) => bob.handle(&msg),
            None => Err(Error::Protocol(format!("no open session {}", msg.session))),
        };
        match result {
            Ok(replies) => {
                for r in &replies {
                    write_frame(writer, r)?;
                }
                writer.flush()?;
            }
            Err(e) => {
                let report = Message::new(msg.session, msg.phase, kind::ERROR, &e.to_string())?;
                write_frame(writer, &report)?;
                writer.flush()?;
                return Err(e);
            }
        }
        if live.get(&msg.session).is_some_and(BobSession::is_done) {
            let bob = live.remove(&msg.session).expect("present");
            finished.insert(msg.session);
            if let Some(t) = bob.transcript() {
                sink(t);
            }
        }
    }
    if !live.is_empty() {
        return Err(frame_err(format!(
            "connection closed with {} sessions open",
            live.len()
        )));
    }
    Ok(())
}

fn serve_tcp(stream: TcpStream, cfg: &SessionConfig, sink: &TranscriptSink) -> Result<()> {
    let peer = stream
        .peer_addr()
        .map(|a| a.to_string())
        .unwrap_or_default();
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    let r = serve_stream(&mut reader, &mut writer, cfg, sink);
    if let Err(e) = &r {
        log::warn!("aborting connection from {peer}: {e}");
    }
    r
}

/// The receiver endpoint.
pub struct Server {
    listener: TcpListener,
    cfg: SessionConfig,
}

impl Server {
    pub fn bind(addr: &str, cfg: SessionConfig) -> Result<Self> {
        let listener = TcpListener::bind(addr)?;
        Ok(Self { listener, cfg })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections, one thread each. With `max_connections` the call
    /// returns after that many connections have closed, with the first
    /// connection error if any.
    pub fn serve(&self, max_connections: Option<usize>, sink: TranscriptSink) -> Result<()> {
        thread::scope(|scope| {
            let mut handles = Vec::new();
            for (count, stream) in self.listener.incoming().enumerate() {
                let stream = stream?;
                let (cfg, sink) = (&self.cfg, sink.clone());
                handles.push(scope.spawn(move || serve_tcp(stream, cfg, &sink)));
                if max_connections.is_some_and(|m| count + 1 >= m) {
                    break;
                }
            }
            handles
                .into_iter()
                .map(|h| {
                    h.join().unwrap_or_else(|_| {
                        Err(Error::Protocol("connection thread panicked".into()))
                    })
                })
                .collect::<Result<Vec<()>>>()
                .map(|_| ())
        })
    }
}

/// What the committer learned from one remote session.
#[derive(Debug, Clone, PartialEq)]
pub struct RemoteResult {
    pub session: u64,
    pub bit: u8,
    pub outcome: VerdictPayload,
}

/// Runs Alice's side of `sessions` (id, committed bit) on one stream,
/// multiplexed with a bounded number in flight.
pub fn run_sessions<R: Read, W: Write>(
    reader: &mut R,
    writer: &mut W,
    cfg: &SessionConfig,
    sessions: &[(u64, u8)],
) -> Result<Vec<RemoteResult>> {
    let mut pending = sessions.iter();
    let mut live: BTreeMap<u64, AliceSession> = BTreeMap::new();
    let mut done = Vec::with_capacity(sessions.len());
    loop {
        while live.len() < WINDOW {
            let Some(&(id, b)) = pending.next() else {
                break;
            };
            if live.contains_key(&id) || done.iter().any(|r: &RemoteResult| r.session == id) {
                return Err(Error::param(format!("duplicate session id {id}")));
            }
            let mut alice = AliceSession::new(cfg, id, b);
            write_frame(writer, &alice.start()?)?;
            live.insert(id, alice);
        }
        writer.flush()?;
        if live.is_empty() {
            break;
        }
        let msg = read_frame(reader)?.ok_or_else(|| {
            frame_err(format!(
                "connection closed with {} sessions open",
                live.len()
            ))
        })?;
        let alice = live
            .get_mut(&msg.session)
            .ok_or_else(|| Error::Protocol(format!("reply for unknown session {}", msg.session)))?;
        for reply in alice.handle(&msg)? {
            write_frame(writer, &reply)?;
        }
        if alice.is_done() {
            let alice = live.remove(&msg.session).expect("present");
            done.push(RemoteResult {
                session: alice.session(),
                bit: alice.bit(),
                outcome: alice.outcome().cloned().expect("done"),
            });
        }
    }
    let order: BTreeMap<u64, usize> = sessions
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (*id, i))
        .collect();
    done.sort_by_key(|r| order[&r.session]);
    Ok(done)
}

pub fn connect(
    addr: &str,
    cfg: &SessionConfig,
    sessions: &[(u64, u8)],
) -> Result<Vec<RemoteResult>> {
    let stream = TcpStream::connect(addr)?;
    stream.set_read_timeout(Some(IO_TIMEOUT))?;
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    run_sessions(&mut reader, &mut writer, cfg, sessions)
}

/// Sessions `0..trials` with their experiment bits, split into `workers`
/// connections.
pub fn run_remote(
    transport: &Transport,
    cfg: &SessionConfig,
    trials: u64,
    workers: usize,
) -> Result<Vec<RemoteResult>> {
    let workers = workers.max(1).min(trials.max(1) as usize);
    let per = trials.div_ceil(workers as u64);
    let chunks: Vec<Vec<(u64, u8)>> = (0..workers as u64)
        .map(|w| {
            (w * per..((w + 1) * per).min(trials))
                .map(|i| (i, session_bit(cfg, i)))
                .collect()
        })
        .filter(|c: &Vec<_>| !c.is_empty())
        .collect();
    let run_clients = |addr: &str| -> Result<Vec<RemoteResult>> {
        thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|c| scope.spawn(move || connect(addr, cfg, c)))
                .collect();
            let mut all = Vec::new();
            for h in handles {
                all.extend(
                    h.join()
                        .map_err(|_| Error::Protocol("client thread panicked".into()))??,
                );
            }
            Ok(all)
        })
    };
    match transport {
        Transport::InProcess => Err(Error::param("run_remote needs a socket transport")),
        Transport::Socket(addr) => run_clients(addr),
        Transport::Loopback => {
            let server = Server::bind("127.0.0.1:0", cfg.clone())?;
            let addr = server.local_addr()?.to_string();
            let n = chunks.len();
            thread::scope(|scope| {
                let srv = scope.spawn(|| server.serve(Some(n), discard_transcripts()));
                let clients = run_clients(&addr);
                let served = srv
                    .join()
                    .map_err(|_| Error::Protocol("server thread panicked".into()))?;
                let results = clients?;
                served?;
                Ok(results)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Phase, Scheme};
    use std::io::Cursor;

    #[test]
    fn frame_round_trip() {
        let m = Message::new(7, Phase::Open, kind::OPEN, &vec![1, 2, 3]).unwrap();
        let mut buf = Vec::new();
        write_frame(&mut buf, &m).unwrap();
        let len = u32::from_be_bytes(buf[..4].try_into().unwrap()) as usize;
        assert_eq!(len, buf.len() - 4);
        assert!(std::str::from_utf8(&buf[4..])
            .unwrap()
            .starts_with(r#"{"session":7,"phase":"open","kind":"open""#));
        let mut c = Cursor::new(buf.clone());
        assert_eq!(read_frame(&mut c).unwrap(), Some(m));
        assert_eq!(read_frame(&mut c).unwrap(), None);
        let mut t = Cursor::new(buf[..buf.len() - 1].to_vec());
        assert!(matches!(read_frame(&mut t), Err(Error::Frame(_))));
        let mut t = Cursor::new(vec![0u8, 0]);
        assert!(matches!(read_frame(&mut t), Err(Error::Frame(_))));
        let mut big = Cursor::new(u32::MAX.to_be_bytes().to_vec());
        assert!(matches!(read_frame(&mut big), Err(Error::Frame(_))));
    }

    #[test]
    fn server_rejects_garbage_and_phase_violations() {
        let cfg = SessionConfig::with_defaults(Scheme::Bb84bc, 6, 2, None, 0).unwrap();
        let sink = discard_transcripts();
        let mut input = Vec::new();
        input.extend_from_slice(&5u32.to_be_bytes());
        input.extend_from_slice(b"nope!");
        let mut out = Vec::new();
        let r = serve_stream(&mut Cursor::new(input), &mut out, &cfg, &sink);
        assert!(matches!(r, Err(Error::Frame(_))));

        let mut input = Vec::new();
        write_frame(
            &mut input,
            &Message::new(1, Phase::Open, kind::OPEN, &()).unwrap(),
        )
        .unwrap();
        let mut out = Vec::new();
        let r = serve_stream(&mut Cursor::new(input), &mut out, &cfg, &sink);
        assert!(matches!(r, Err(Error::Protocol(_))));
        let reply = read_frame(&mut Cursor::new(out)).unwrap().unwrap();
        assert_eq!(reply.kind, kind::ERROR);
    }
}
