// Copyright 2026 The tcverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Three-party networked mode over TCP.
//!
//! Topology, one fresh connection per message:
//!
//! ```text
//! center --CenterToProver-----------> prover
//! center --CenterToVerifier[Zk]-----> verifier
//! prover --ProverToVerifier---------> verifier
//! verifier --Verdict (ack)----------> prover (same connection)
//! ```
//!
//! The center is configured with `N` only and never sees the instance. In
//! zero-knowledge mode the verifier is sent `(h, a, b, m_a, m_b)` and aborts
//! if it is ever handed a full `m`. Any timeout or frame violation aborts
//! the party with an error; there is no retry.

use std::collections::HashMap;
use std::io::Write;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::XZHamiltonian;
use crate::protocol::{
    center_sample, decide_main, decide_zk, ProverAnswer, ProverParty, ProverStrategy, Verdict,
    ZkCenterMessage,
};
use crate::rng::RandomSource;
use crate::wire::{read_message, write_message, WireMessage};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

// per-role stream tags so the three processes draw independent randomness
const CENTER_TAG: u64 = 0x43;
const PROVER_TAG: u64 = 0x50;
const VERIFIER_TAG: u64 = 0x56;

fn role_rng(seed: u64, tag: u64, session: u64) -> RandomSource {
    RandomSource::substream(seed ^ (tag << 56), session)
}

#[derive(Debug, Clone)]
pub struct CenterConfig {
    pub n_qubits: usize,
    pub zk: bool,
    pub prover: SocketAddr,
    pub verifier: SocketAddr,
    pub sessions: u64,
    pub seed: u64,
    pub timeout: Duration,
}

#[derive(Debug, Clone)]
pub struct ProverConfig {
    pub instance: XZHamiltonian,
    pub strategy: ProverStrategy,
    pub verifier: SocketAddr,
    pub sessions: u64,
    pub seed: u64,
    pub timeout: Duration,
}

#[derive(Debug, Clone)]
pub struct VerifierConfig {
    pub instance: XZHamiltonian,
    pub zk: bool,
    pub sessions: u64,
    pub seed: u64,
    pub timeout: Duration,
}

#[derive(Debug, Clone)]
pub enum PartyConfig {
    Center(CenterConfig),
    Prover(ProverConfig),
    Verifier(VerifierConfig),
}

/// One line of the verifier's log: exactly what it observed and decided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VerifierLogEntry {
    Main {
        session: u64,
        h: u8,
        m: Vec<u8>,
        x: Vec<u8>,
        z: Vec<u8>,
        check_pair: (usize, usize),
        verdict: Verdict,
    },
    Zk {
        session: u64,
        h: u8,
        a: usize,
        b: usize,
        m_a: u8,
        m_b: u8,
        x: Vec<u8>,
        z: Vec<u8>,
        check_pair: (usize, usize),
        verdict: Verdict,
    },
}

impl VerifierLogEntry {
    pub fn verdict(&self) -> Verdict {
        match self {
            VerifierLogEntry::Main { verdict, .. } | VerifierLogEntry::Zk { verdict, .. } => *verdict,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PartySummary {
    pub sessions: u64,
    pub accepts: u64,
}

fn session_err(msg: impl Into<String>) -> Error {
    Error::Session(msg.into())
}

fn configure(stream: &TcpStream, timeout: Duration) -> Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;
    stream.set_nodelay(true)?;
    Ok(())
}

fn connect(addr: SocketAddr, timeout: Duration) -> Result<TcpStream> {
    let stream = TcpStream::connect_timeout(&addr, timeout)
        .map_err(|e| session_err(format!("connecting to {addr}: {e}")))?;
    configure(&stream, timeout)?;
    Ok(stream)
}

fn accept(listener: &TcpListener, timeout: Duration) -> Result<TcpStream> {
    listener.set_nonblocking(true)?;
    let deadline = Instant::now() + timeout;
    loop {
        match listener.accept() {
            Ok((stream, _)) => {
                configure(&stream, timeout)?;
                return Ok(stream);
            }
            Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                if Instant::now() >= deadline {
                    return Err(session_err(format!("no connection within {timeout:?}")));
                }
                thread::sleep(Duration::from_millis(1));
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// The center: samples keys and sends `(h, m)` to the prover and the
/// matching description to the verifier.
pub fn run_center(cfg: &CenterConfig) -> Result<PartySummary> {
    for session in 0..cfg.sessions {
        let key = center_sample(cfg.n_qubits, cfg.zk, &mut role_rng(cfg.seed, CENTER_TAG, session))?;

        let mut to_prover = connect(cfg.prover, cfg.timeout)?;
        write_message(
            &mut to_prover,
            &WireMessage::CenterToProver { session, h: key.h, m: key.m.clone() },
        )?;

        let to_verifier_msg = match key.zk_message() {
            Some(msg) => WireMessage::CenterToVerifierZk { session, msg },
            None => WireMessage::CenterToVerifier { session, h: key.h, m: key.m },
        };
        let mut to_verifier = connect(cfg.verifier, cfg.timeout)?;
        write_message(&mut to_verifier, &to_verifier_msg)?;
    }
    Ok(PartySummary { sessions: cfg.sessions, accepts: 0 })
}

/// The prover: answers each center message and forwards the report.
pub fn run_prover(listener: &TcpListener, cfg: &ProverConfig) -> Result<PartySummary> {
    let party = ProverParty::new(&cfg.instance, &cfg.strategy)?;
    let mut summary = PartySummary::default();
    for _ in 0..cfg.sessions {
        let mut from_center = accept(listener, cfg.timeout)?;
        let (session, h, m) = match read_message(&mut from_center)? {
            WireMessage::CenterToProver { session, h, m } => (session, h, m),
            other => return Err(session_err(format!("prover expected CenterToProver, got {}", other.kind()))),
        };
        let answer = party.respond(h, &m, &mut role_rng(cfg.seed, PROVER_TAG, session))?;

        let mut to_verifier = connect(cfg.verifier, cfg.timeout)?;
        write_message(&mut to_verifier, &WireMessage::ProverToVerifier { session, answer })?;
        match read_message(&mut to_verifier)? {
            WireMessage::Verdict { session: s, verdict } if s == session => {
                summary.sessions += 1;
                summary.accepts += u64::from(verdict.is_accept());
            }
            other => return Err(session_err(format!("prover expected Verdict, got {}", other.kind()))),
        }
    }
    Ok(summary)
}

enum CenterPart {
    Main { h: u8, m: Vec<u8> },
    Zk(ZkCenterMessage),
}

/// The verifier: pairs center and prover messages by session id, decides,
/// logs one JSON line per session to `log` and acknowledges the prover.
pub fn run_verifier(listener: &TcpListener, cfg: &VerifierConfig, log: &mut dyn Write) -> Result<PartySummary> {
    let ham = &cfg.instance;
    ham.check()?;
    let mut from_center: HashMap<u64, CenterPart> = HashMap::new();
    let mut from_prover: HashMap<u64, (ProverAnswer, TcpStream)> = HashMap::new();
    let mut summary = PartySummary::default();

    while summary.sessions < cfg.sessions {
        let mut stream = accept(listener, cfg.timeout)?;
        let session = match read_message(&mut stream)? {
            WireMessage::CenterToVerifier { session, h, m } => {
                if cfg.zk {
                    return Err(session_err("ZK verifier was sent the full key m; refusing"));
                }
                from_center.insert(session, CenterPart::Main { h, m });
                session
            }
            WireMessage::CenterToVerifierZk { session, msg } => {
                if !cfg.zk {
                    return Err(session_err("main-protocol verifier received a ZK center message"));
                }
                from_center.insert(session, CenterPart::Zk(msg));
                session
            }
            WireMessage::ProverToVerifier { session, answer } => {
                from_prover.insert(session, (answer, stream));
                session
            }
            other => return Err(session_err(format!("verifier got unexpected {}", other.kind()))),
        };

        if !(from_center.contains_key(&session) && from_prover.contains_key(&session)) {
            continue;
        }
        let center = from_center.remove(&session).expect("checked");
        let (answer, mut prover_stream) = from_prover.remove(&session).expect("checked");
        let mut rng = role_rng(cfg.seed, VERIFIER_TAG, session);
        let entry = match center {
            CenterPart::Main { h, m } => {
                let d = decide_main(ham, h, &m, Some(&answer), &mut rng)?;
                VerifierLogEntry::Main {
                    session,
                    h,
                    m,
                    x: answer.x,
                    z: answer.z,
                    check_pair: d.check_pair,
                    verdict: d.verdict,
                }
            }
            CenterPart::Zk(msg) => {
                let d = decide_zk(ham, &msg, &answer, &mut rng)?;
                VerifierLogEntry::Zk {
                    session,
                    h: msg.h,
                    a: msg.a,
                    b: msg.b,
                    m_a: msg.m_a,
                    m_b: msg.m_b,
                    x: answer.x,
                    z: answer.z,
                    check_pair: d.check_pair,
                    verdict: d.verdict,
                }
            }
        };
        serde_json::to_writer(&mut *log, &entry)?;
        writeln!(log)?;
        write_message(&mut prover_stream, &WireMessage::Verdict { session, verdict: entry.verdict() })?;
        summary.sessions += 1;
        summary.accepts += u64::from(entry.verdict().is_accept());
    }
    log.flush()?;
    Ok(summary)
}

/// Runs one party. Prover and verifier need a bound listener.
pub fn serve_party(
    config: &PartyConfig,
    listener: Option<&TcpListener>,
    log: &mut dyn Write,
) -> Result<PartySummary> {
    let need_listener = || listener.ok_or_else(|| Error::InvalidArgument("this role needs a listen address".into()));
    match config {
        PartyConfig::Center(cfg) => run_center(cfg),
        PartyConfig::Prover(cfg) => run_prover(need_listener()?, cfg),
        PartyConfig::Verifier(cfg) => run_verifier(need_listener()?, cfg, log),
    }
}

/// All three parties on loopback, one thread each. Returns the verifier's
/// summary and log lines.
pub fn run_local_network(
    instance: &XZHamiltonian,
    strategy: &ProverStrategy,
    zk: bool,
    sessions: u64,
    seed: u64,
    timeout: Duration,
) -> Result<(PartySummary, Vec<VerifierLogEntry>)> {
    let prover_listener = TcpListener::bind("127.0.0.1:0")?;
    let verifier_listener = TcpListener::bind("127.0.0.1:0")?;
    let center = CenterConfig {
        n_qubits: instance.n_qubits,
        zk,
        prover: prover_listener.local_addr()?,
        verifier: verifier_listener.local_addr()?,
        sessions,
        seed,
        timeout,
    };
    let prover = ProverConfig {
        instance: instance.clone(),
        strategy: strategy.clone(),
        verifier: verifier_listener.local_addr()?,
        sessions,
        seed,
        timeout,
    };
    let verifier = VerifierConfig {
        instance: instance.clone(),
        zk,
        sessions,
        seed,
        timeout,
    };
    thread::scope(|scope| {
        let v = scope.spawn(move || {
            let mut log = Vec::new();
            run_verifier(&verifier_listener, &verifier, &mut log).map(|s| (s, log))
        });
        let p = scope.spawn(move || run_prover(&prover_listener, &prover));
        let c = run_center(&center);
        let p = p.join().map_err(|_| session_err("prover thread panicked"))?;
        let v = v.join().map_err(|_| session_err("verifier thread panicked"))?;
        c?;
        p?;
        let (summary, log) = v?;
        let entries = log
            .split(|&b| b == b'\n')
            .filter(|l| !l.is_empty())
            .map(serde_json::from_slice)
            .collect::<std::result::Result<Vec<VerifierLogEntry>, _>>()?;
        Ok((summary, entries))
    })
}
