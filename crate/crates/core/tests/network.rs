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

use std::io::Write;
use std::net::{TcpListener, TcpStream};
use std::thread;
use std::time::Duration;

use tcverify::net::{run_local_network, run_verifier, VerifierConfig, VerifierLogEntry};
use tcverify::wire::{write_message, WireMessage};
use tcverify::{Error, ProverStrategy, XZHamiltonian};

fn verifier_config(zk: bool) -> VerifierConfig {
    VerifierConfig {
        instance: XZHamiltonian::bell(-1),
        zk,
        sessions: 1,
        seed: 0,
        timeout: Duration::from_secs(2),
    }
}

/// Runs a one-session verifier and feeds it `bytes` on a single connection.
fn verifier_fed_with(zk: bool, bytes: Vec<u8>) -> tcverify::Result<()> {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let cfg = verifier_config(zk);
    let handle = thread::spawn(move || run_verifier(&listener, &cfg, &mut Vec::new()).map(|_| ()));
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.write_all(&bytes).unwrap();
    drop(stream);
    handle.join().unwrap()
}

#[test]
fn honest_bell_sessions_all_accept() {
    let (summary, log) = run_local_network(
        &XZHamiltonian::bell(-1),
        &ProverStrategy::Honest,
        false,
        100,
        3,
        Duration::from_secs(10),
    )
    .unwrap();
    assert_eq!(summary.sessions, 100);
    assert_eq!(summary.accepts, 100);
    assert_eq!(log.len(), 100);
}

#[test]
fn truncated_frame_aborts_the_verifier() {
    let frame = WireMessage::CenterToVerifier { session: 0, h: 1, m: vec![0, 1] }.encode();
    let err = verifier_fed_with(false, frame[..frame.len() - 2].to_vec()).unwrap_err();
    assert!(matches!(err, Error::Wire(_)), "{err}");
    assert!(err.to_string().contains("truncated"), "{err}");
}

#[test]
fn zk_verifier_refuses_the_full_key() {
    let mut bytes = Vec::new();
    write_message(&mut bytes, &WireMessage::CenterToVerifier { session: 0, h: 0, m: vec![1, 1] }).unwrap();
    let err = verifier_fed_with(true, bytes).unwrap_err();
    assert!(matches!(err, Error::Session(_)), "{err}");
}

#[test]
fn silent_peer_times_out() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let mut cfg = verifier_config(false);
    cfg.timeout = Duration::from_millis(200);
    let err = run_verifier(&listener, &cfg, &mut Vec::new()).unwrap_err();
    assert!(matches!(err, Error::Session(_)), "{err}");
}

#[test]
fn zk_log_entries_carry_only_the_view() {
    let ham = XZHamiltonian::random(3, &mut tcverify::RandomSource::new(8));
    let (_, log) = run_local_network(&ham, &ProverStrategy::Honest, true, 50, 4, Duration::from_secs(10)).unwrap();
    for entry in &log {
        assert!(matches!(entry, VerifierLogEntry::Zk { .. }));
        let value = serde_json::to_value(entry).unwrap();
        assert!(value.get("m").is_none());
        let back: VerifierLogEntry = serde_json::from_value(value).unwrap();
        assert_eq!(&back, entry);
    }
}
