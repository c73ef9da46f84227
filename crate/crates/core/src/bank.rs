//! The engine: one serialized commit path over the journal and the state.
//!
//! Every mutation runs under the write lock as plan → journal → apply, so
//! commit order, journal order, and tx_id order coincide. Reads take the
//! read lock and only ever see fully applied commits.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use rand::rngs::OsRng;
use rand::RngCore;

use crate::auth::{AuthPolicy, AuthRuntime, HashParams, SALT_LEN};
use crate::clock::{Clock, Millis, SystemClock};
use crate::error::{BankError, Result};
use crate::persistence::{self, Journal};
use crate::state::{BankState, Event};

pub const DEFAULT_SNAPSHOT_EVERY: u64 = 1000;

struct Core {
    state: BankState,
    journal: Journal,
    poisoned: bool,
}

/// Builder for [`Bank`]. Defaults: in-memory journal, system clock, OS
/// randomness, standard password hashing.
pub struct BankBuilder {
    data_dir: Option<PathBuf>,
    policy: AuthPolicy,
    hash_params: HashParams,
    snapshot_every: u64,
    clock: Arc<dyn Clock>,
    rng: Box<dyn RngCore + Send>,
}

impl Default for BankBuilder {
    fn default() -> Self {
        Self {
            data_dir: None,
            policy: AuthPolicy::default(),
            hash_params: HashParams::Standard,
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
            clock: Arc::new(SystemClock),
            rng: Box::new(OsRng),
        }
    }
}

impl BankBuilder {
    pub fn data_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.data_dir = Some(dir.into());
        self
    }

    pub fn auth_policy(mut self, policy: AuthPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn hash_params(mut self, params: HashParams) -> Self {
        self.hash_params = params;
        self
    }

    /// Snapshot cadence in journal records; 0 disables snapshots.
    pub fn snapshot_every(mut self, n: u64) -> Self {
        self.snapshot_every = n;
        self
    }

    pub fn clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    /// Randomness for salts and session tokens.
    pub fn rng(mut self, rng: Box<dyn RngCore + Send>) -> Self {
        self.rng = rng;
        self
    }

    /// Recovers state from the data directory (if any) and opens the journal.
    pub fn open(self) -> Result<Bank> {
        let (state, journal) = match &self.data_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let recovered = persistence::recover::<BankState>(dir)?;
                if let Some(seq) = recovered.snapshot_seq {
                    tracing::info!(seq, "recovered from snapshot");
                }
                let journal =
                    Journal::open_file(dir, recovered.valid_len, recovered.next_seq - 1)?;
                (recovered.state, journal)
            }
            None => (BankState::default(), Journal::in_memory()),
        };
        Ok(Bank {
            core: RwLock::new(Core {
                state,
                journal,
                poisoned: false,
            }),
            auth: Mutex::new(AuthRuntime::new(self.policy)),
            rng: Mutex::new(self.rng),
            clock: self.clock,
            hash_params: self.hash_params,
            snapshot_every: self.snapshot_every,
            data_dir: self.data_dir,
        })
    }
}

pub struct Bank {
    core: RwLock<Core>,
    pub(crate) auth: Mutex<AuthRuntime>,
    rng: Mutex<Box<dyn RngCore + Send>>,
    clock: Arc<dyn Clock>,
    pub(crate) hash_params: HashParams,
    snapshot_every: u64,
    data_dir: Option<PathBuf>,
}

impl std::fmt::Debug for Bank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bank")
            .field("data_dir", &self.data_dir)
            .field("last_seq", &self.last_seq())
            .finish_non_exhaustive()
    }
}

impl Bank {
    pub fn builder() -> BankBuilder {
        BankBuilder::default()
    }

    /// An in-memory bank with default settings.
    pub fn in_memory() -> Self {
        BankBuilder::default()
            .open()
            .expect("opening an in-memory bank cannot fail")
    }

    pub fn now_ms(&self) -> Millis {
        self.clock.now_ms()
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn auth_policy(&self) -> AuthPolicy {
        self.auth.lock().policy()
    }

    pub fn last_seq(&self) -> u64 {
        self.core.read().journal.last_seq()
    }

    /// Current journal bytes (a copy).
    pub fn journal_bytes(&self) -> Result<Vec<u8>> {
        self.core.read().journal.bytes()
    }

    /// A clone of the full state, for inspection and tests.
    pub fn snapshot_state(&self) -> BankState {
        self.core.read().state.clone()
    }

    pub(crate) fn read<R>(&self, f: impl FnOnce(&BankState) -> R) -> R {
        f(&self.core.read().state)
    }

    pub(crate) fn fresh_salt(&self) -> [u8; SALT_LEN] {
        let mut salt = [0u8; SALT_LEN];
        self.rng.lock().fill_bytes(&mut salt);
        salt
    }

    pub(crate) fn with_rng<R>(&self, f: impl FnOnce(&mut dyn RngCore) -> R) -> R {
        let mut rng = self.rng.lock();
        f(&mut **rng)
    }

    /// Runs `plan` against the current state under the write lock. The
    /// events it returns are journaled as one batch and then applied; if
    /// planning fails nothing is written.
    pub(crate) fn mutate<R>(
        &self,
        plan: impl FnOnce(&BankState, Millis) -> Result<(Vec<Event>, R)>,
    ) -> Result<R> {
        let mut core = self.core.write();
        if core.poisoned {
            return Err(BankError::internal(
                "engine halted after a failed apply; restart to recover from the journal",
            ));
        }
        let now = self.clock.now_ms();
        let (events, out) = plan(&core.state, now)?;
        if events.is_empty() {
            return Ok(out);
        }
        let pending = events
            .iter()
            .map(|e| e.to_pending(now))
            .collect::<Result<Vec<_>>>()?;
        let before = core.journal.last_seq();
        core.journal.append_batch(pending)?;
        for event in events {
            if let Err(err) = core.state.apply_event(event) {
                core.poisoned = true;
                core.journal.close();
                tracing::error!(%err, "apply failed after journaling");
                return Err(BankError::internal(format!("apply failed: {}", err.message)));
            }
        }
        self.maybe_snapshot(&core, before);
        Ok(out)
    }

    fn maybe_snapshot(&self, core: &Core, before: u64) {
        let (Some(dir), every) = (&self.data_dir, self.snapshot_every) else {
            return;
        };
        if every == 0 {
            return;
        }
        let after = core.journal.last_seq();
        if after / every == before / every {
            return;
        }
        if let Err(err) = persistence::write_snapshot(dir, &core.state, after, after) {
            tracing::warn!(%err, seq = after, "snapshot failed");
        }
    }

    /// Writes a snapshot at the current journal position now.
    pub fn write_snapshot(&self) -> Result<Option<PathBuf>> {
        let core = self.core.read();
        match &self.data_dir {
            Some(dir) => {
                let seq = core.journal.last_seq();
                persistence::write_snapshot(dir, &core.state, seq, seq).map(Some)
            }
            None => Ok(None),
        }
    }

    /// Stops accepting writes. Later mutations fail with `STORAGE_FAILURE`.
    pub fn close(&self) {
        self.core.write().journal.close();
    }
}
