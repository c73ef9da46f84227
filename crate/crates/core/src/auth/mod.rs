//! Credentials, bearer-token sessions, and login lockout.
//!
//! Credentials are durable (they live in the journaled state). Sessions and
//! lockout counters are process-local and live in [`AuthRuntime`], which
//! callers guard with a single mutex so every read-modify-write is atomic.

mod hash;

use std::collections::HashMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use hash::{hash_password, Credential, HashParams, SALT_LEN};

use crate::clock::Millis;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::PrincipalId;

pub const MIN_PASSWORD_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Role {
    Customer,
    Admin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuthPolicy {
    pub lockout_threshold: u32,
    pub lockout_window_s: u64,
    pub session_idle_ttl_s: u64,
}

impl Default for AuthPolicy {
    fn default() -> Self {
        Self {
            lockout_threshold: 5,
            lockout_window_s: 900,
            session_idle_ttl_s: 900,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Session {
    pub token: String,
    pub principal_id: PrincipalId,
    pub role: Role,
    pub created_ts: Millis,
    pub last_used_ts: Millis,
    pub idle_ttl_s: u64,
}

impl Session {
    fn expired(&self, now: Millis) -> bool {
        now.saturating_sub(self.last_used_ts) > self.idle_ttl_s * 1000
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LockoutState {
    pub failed_count: u32,
    pub locked_until: Option<Millis>,
}

/// The caller-visible identity behind a valid token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Principal {
    pub id: PrincipalId,
    pub role: Role,
}

pub fn unauthenticated() -> BankError {
    BankError::new(ErrorCode::Unauthenticated, "missing, expired, or invalid session")
}

/// The single error returned for any failed login, whether the user exists
/// or not.
pub fn bad_credentials() -> BankError {
    BankError::new(ErrorCode::BadCredentials, "invalid username or password")
}

pub fn locked_out() -> BankError {
    BankError::new(
        ErrorCode::LockedOut,
        "too many failed login attempts; try again later",
    )
}

pub fn validate_new_password(password: &str) -> Result<()> {
    if password.chars().count() < MIN_PASSWORD_LEN {
        return Err(BankError::validation(format!(
            "password must be at least {MIN_PASSWORD_LEN} characters"
        )));
    }
    Ok(())
}

/// Session table plus per-principal lockout state.
#[derive(Debug, Default)]
pub struct AuthRuntime {
    policy: AuthPolicy,
    sessions: HashMap<String, Session>,
    lockouts: HashMap<PrincipalId, LockoutState>,
}

impl AuthRuntime {
    pub fn new(policy: AuthPolicy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub fn policy(&self) -> AuthPolicy {
        self.policy
    }

    /// Fails with `LOCKED_OUT` while a lockout window is open. An expired
    /// window resets the counter.
    pub fn check_lock(&mut self, principal: PrincipalId, now: Millis) -> Result<()> {
        let Some(state) = self.lockouts.get_mut(&principal) else {
            return Ok(());
        };
        match state.locked_until {
            Some(until) if now < until => Err(locked_out()),
            Some(_) => {
                *state = LockoutState::default();
                Ok(())
            }
            None => Ok(()),
        }
    }

    pub fn record_failure(&mut self, principal: PrincipalId, now: Millis) {
        let state = self.lockouts.entry(principal).or_default();
        state.failed_count += 1;
        if state.failed_count >= self.policy.lockout_threshold && state.locked_until.is_none() {
            state.locked_until = Some(now + self.policy.lockout_window_s * 1000);
        }
    }

    pub fn record_success(&mut self, principal: PrincipalId) {
        self.lockouts.remove(&principal);
    }

    pub fn lockout(&self, principal: PrincipalId) -> LockoutState {
        self.lockouts.get(&principal).cloned().unwrap_or_default()
    }

    /// Issues a fresh session with a 32-byte random token.
    pub fn issue(
        &mut self,
        principal: Principal,
        now: Millis,
        rng: &mut dyn RngCore,
    ) -> Session {
        loop {
            let mut bytes = [0u8; 32];
            rng.fill_bytes(&mut bytes);
            let token = hex::encode(bytes);
            if self.sessions.contains_key(&token) {
                continue;
            }
            let session = Session {
                token: token.clone(),
                principal_id: principal.id,
                role: principal.role,
                created_ts: now,
                last_used_ts: now,
                idle_ttl_s: self.policy.session_idle_ttl_s,
            };
            self.sessions.insert(token, session.clone());
            return session;
        }
    }

    /// Resolves a token and slides its expiry forward.
    pub fn authenticate(&mut self, token: &str, now: Millis) -> Result<Principal> {
        let Some(session) = self.sessions.get_mut(token) else {
            return Err(unauthenticated());
        };
        if session.expired(now) {
            self.sessions.remove(token);
            return Err(unauthenticated());
        }
        session.last_used_ts = now;
        Ok(Principal {
            id: session.principal_id,
            role: session.role,
        })
    }

    /// Idempotent; unknown tokens are silently accepted.
    pub fn logout(&mut self, token: &str) {
        self.sessions.remove(token);
    }

    pub fn invalidate_others(&mut self, principal: PrincipalId, keep_token: &str) {
        self.sessions
            .retain(|token, s| s.principal_id != principal || token == keep_token);
    }

    pub fn session_count(&self) -> usize {
        self.sessions.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::CustomerId;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const ALICE: PrincipalId = PrincipalId::Customer(CustomerId(1));

    fn customer() -> Principal {
        Principal {
            id: ALICE,
            role: Role::Customer,
        }
    }

    #[test]
    fn tokens_are_64_lowercase_hex() {
        let mut rt = AuthRuntime::new(AuthPolicy::default());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let s = rt.issue(customer(), 0, &mut rng);
        assert_eq!(s.token.len(), 64);
        assert!(s.token.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')));
    }

    #[test]
    fn sliding_expiry() {
        let mut rt = AuthRuntime::new(AuthPolicy::default());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let s = rt.issue(customer(), 0, &mut rng);
        // Used at 800s; still valid at 1600s because expiry slides.
        rt.authenticate(&s.token, 800_000).unwrap();
        rt.authenticate(&s.token, 1_600_000).unwrap();
        // Idle exactly the TTL is still fine; one ms more is not.
        rt.authenticate(&s.token, 2_500_000).unwrap();
        let err = rt.authenticate(&s.token, 3_400_001).unwrap_err();
        assert_eq!(err.code, ErrorCode::Unauthenticated);
    }

    #[test]
    fn logout_is_idempotent() {
        let mut rt = AuthRuntime::new(AuthPolicy::default());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let s = rt.issue(customer(), 0, &mut rng);
        rt.logout(&s.token);
        assert!(rt.authenticate(&s.token, 1).is_err());
        rt.logout(&s.token);
        rt.logout("garbage");
    }

    #[test]
    fn threshold_locks_then_window_expires() {
        let mut rt = AuthRuntime::new(AuthPolicy::default());
        for i in 0..5 {
            rt.check_lock(ALICE, i).unwrap();
            rt.record_failure(ALICE, i);
        }
        let st = rt.lockout(ALICE);
        assert_eq!(st.failed_count, 5);
        assert_eq!(st.locked_until, Some(4 + 900_000));
        assert_eq!(rt.check_lock(ALICE, 500_000).unwrap_err().code, ErrorCode::LockedOut);
        rt.check_lock(ALICE, 900_004).unwrap();
        assert_eq!(rt.lockout(ALICE), LockoutState::default());
    }

    #[test]
    fn success_resets_counter() {
        let mut rt = AuthRuntime::new(AuthPolicy::default());
        for i in 0..4 {
            rt.record_failure(ALICE, i);
        }
        rt.record_success(ALICE);
        assert_eq!(rt.lockout(ALICE).failed_count, 0);
    }

    #[test]
    fn invalidate_others_keeps_current() {
        let mut rt = AuthRuntime::new(AuthPolicy::default());
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let a = rt.issue(customer(), 0, &mut rng);
        let b = rt.issue(customer(), 0, &mut rng);
        rt.invalidate_others(ALICE, &a.token);
        assert!(rt.authenticate(&a.token, 1).is_ok());
        assert!(rt.authenticate(&b.token, 1).is_err());
    }

    #[test]
    fn password_policy() {
        assert!(validate_new_password("1234567").is_err());
        assert!(validate_new_password("12345678").is_ok());
    }
}
