//! Runs the `bank` binary against a served bank next to an identical twin
//! that is driven directly.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Arc;

use netbank::api::{self, Rendered, ServerHandle};
use netbank::auth::HashParams;
use netbank::Bank;
use rand::SeedableRng;
use serde_json::Value;

use super::{manual_clock, World};

pub const BIN: &str = env!("CARGO_BIN_EXE_bank");

pub struct Out {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the `bank` binary with an isolated home and session file.
pub fn bank_cli(home: &Path, server: Option<&str>, args: &[&str], stdin: &str) -> Out {
    let mut cmd = Command::new(BIN);
    cmd.env_clear()
        .env("HOME", home)
        .env("BANK_SESSION_FILE", home.join("session.json"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some(s) = server {
        cmd.env("BANK_SERVER", s);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Out {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn seeded_bank(seed: u64) -> Bank {
    Bank::builder()
        .hash_params(HashParams::Fast)
        .clock(manual_clock())
        .rng(Box::new(rand_chacha::ChaCha20Rng::seed_from_u64(seed)))
        .open()
        .unwrap()
}

/// A served bank and an identical twin that is driven directly.
pub struct Pair {
    pub server: ServerHandle,
    pub twin: Bank,
    pub home: tempfile::TempDir,
}

impl Pair {
    pub fn new() -> Pair {
        let served = seeded_bank(42);
        let twin = seeded_bank(42);
        let a = World::populate(served, manual_clock(), 100_000);
        let b = World::populate(twin, manual_clock(), 100_000);
        assert_eq!(a.alice, b.alice);
        let server = api::start(Arc::new(a.bank), "127.0.0.1:0".parse().unwrap()).unwrap();
        Pair {
            server,
            twin: b.bank,
            home: tempfile::tempdir().unwrap(),
        }
    }

    pub fn run(&self, args: &[&str], stdin: &str) -> Out {
        bank_cli(self.home.path(), Some(&self.server.url()), args, stdin)
    }

    pub fn session(&self) -> PathBuf {
        self.home.path().join("session.json")
    }

    pub fn token(&self) -> String {
        let v: Value = serde_json::from_slice(&std::fs::read(self.session()).unwrap()).unwrap();
        v["token"].as_str().unwrap().to_string()
    }

    /// `--json` output must be the API body the twin renders for the same call.
    pub fn json_matches(&self, args: &[&str], stdin: &str, expected: Rendered) -> String {
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        let out = self.run(&full, stdin);
        let want = String::from_utf8(expected.body).unwrap();
        if (200..300).contains(&expected.status) {
            assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
            assert_eq!(out.stdout, format!("{want}\n"), "{args:?}");
        } else {
            assert_eq!(out.code, 1, "{args:?}: {}", out.stdout);
            assert_eq!(out.stderr, format!("{want}\n"), "{args:?}");
        }
        out.stdout
    }
}

pub fn body(v: Value) -> Vec<u8> {
    serde_json::to_vec(&v).unwrap()
}

