//! Use-case flows: pay bills, transfer funds, cheque services, statements,
//! profile utilities, and the administrator operations.
//!
//! Every flow takes a session token, authenticates it, checks ownership,
//! and commits its ledger transaction, workflow records, and one audit
//! record as a single journal batch.

mod admin;
mod cheques;
mod payments;
mod profile;
mod statement;
pub mod types;

pub use admin::NewCustomer;
pub use profile::ContactUpdate;
pub use types::*;

use crate::auth::{bad_credentials, locked_out, Credential, Principal, Role, Session};
use crate::bank::Bank;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::{AccountId, PrincipalId};
use crate::ledger::{Account, LedgerTransaction, TxKind};
use crate::state::{BankState, Event};

pub const USERNAME_MIN: usize = 3;
pub const USERNAME_MAX: usize = 32;

pub(crate) fn forbidden() -> BankError {
    BankError::new(ErrorCode::Forbidden, "administrator role required")
}

pub(crate) fn not_owner(account: AccountId) -> BankError {
    BankError::new(
        ErrorCode::NotOwner,
        format!("account {account} does not belong to this session"),
    )
}

pub(crate) fn validate_username(username: &str) -> Result<()> {
    let ok = (USERNAME_MIN..=USERNAME_MAX).contains(&username.len())
        && username
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_');
    if ok {
        Ok(())
    } else {
        Err(BankError::validation(
            "username must be 3-32 characters of lowercase letters, digits, or underscore",
        ))
    }
}

/// Customer-owned account lookup for money-moving and workflow paths.
pub(crate) fn owned_account(
    state: &BankState,
    principal: Principal,
    account: AccountId,
) -> Result<&Account> {
    let acc = state.book.account(account)?;
    match (principal.id, acc.owner) {
        (PrincipalId::Customer(me), crate::ledger::Owner::Customer(owner)) if me == owner => Ok(acc),
        _ => Err(not_owner(account)),
    }
}

/// Read access: owners, plus administrators for any account.
pub(crate) fn readable_account(
    state: &BankState,
    principal: Principal,
    account: AccountId,
) -> Result<&Account> {
    if principal.role == Role::Admin {
        return state.book.account(account);
    }
    owned_account(state, principal, account)
}

pub(crate) fn receipt_for(state: &BankState, tx: &LedgerTransaction) -> Receipt {
    let credit = tx
        .postings
        .iter()
        .find(|p| p.direction == crate::ledger::Direction::Credit)
        .map(|p| p.account_id);
    let counterparty = match (tx.kind, credit) {
        (TxKind::BillPayment, Some(acc)) => state
            .biller_for_settlement(acc)
            .map(|b| b.to_string())
            .unwrap_or_else(|| acc.to_string()),
        (_, Some(acc)) => acc.to_string(),
        (_, None) => String::new(),
    };
    Receipt::from_transaction(tx, counterparty)
}

impl Bank {
    /// Resolves a bearer token, sliding its idle expiry.
    pub fn authenticate(&self, token: &str) -> Result<Principal> {
        let now = self.now_ms();
        self.auth.lock().authenticate(token, now)
    }

    pub(crate) fn require_admin(&self, token: &str) -> Result<Principal> {
        let principal = self.authenticate(token)?;
        if principal.role != Role::Admin {
            return Err(forbidden());
        }
        Ok(principal)
    }

    /// Verifies a username and password and opens a session.
    ///
    /// Unknown users and wrong passwords fail identically. The configured
    /// number of consecutive failures opens a lockout window during which
    /// every attempt, correct or not, fails with `LOCKED_OUT`.
    pub fn login(&self, username: &str, password: &str) -> Result<Session> {
        let found = self.read(|s| {
            s.usernames.get(username).and_then(|entry| {
                s.credentials
                    .get(&entry.principal_id)
                    .map(|c| (entry.clone(), c.clone()))
            })
        });
        let Some((entry, credential)) = found else {
            // Spend the same hashing work as a real verification.
            let decoy = Credential {
                principal_id: PrincipalId::Admin(crate::ids::AdminId(0)),
                salt: "00".repeat(crate::auth::SALT_LEN),
                password_hash: String::new(),
                hash_params: self.hash_params.name().to_string(),
            };
            let _ = decoy.verify(password);
            return Err(bad_credentials());
        };
        let principal = Principal {
            id: entry.principal_id,
            role: entry.role,
        };
        self.auth.lock().check_lock(principal.id, self.now_ms())?;
        let verified = credential.verify(password);

        let mut auth = self.auth.lock();
        let now = self.now_ms();
        // A concurrent attempt may have opened the window while we hashed.
        if auth.check_lock(principal.id, now).is_err() {
            return Err(locked_out());
        }
        if !verified {
            auth.record_failure(principal.id, now);
            return Err(bad_credentials());
        }
        auth.record_success(principal.id);
        let session = self.with_rng(|rng| auth.issue(principal, now, rng));
        Ok(session)
    }

    /// Invalidates a token. Always succeeds.
    pub fn logout(&self, token: &str) {
        self.auth.lock().logout(token);
    }

    /// Creates the first administrator. Fails if the username is taken.
    pub fn bootstrap_admin(&self, username: &str, password: &str) -> Result<crate::ids::AdminId> {
        validate_username(username)?;
        crate::auth::validate_new_password(password)?;
        let salt = self.fresh_salt();
        self.mutate(|state, _| {
            if state.usernames.contains_key(username) {
                return Err(BankError::new(
                    ErrorCode::DuplicateUsername,
                    format!("username {username:?} is taken"),
                ));
            }
            let id = state.next_admin_id();
            let principal_id = PrincipalId::Admin(id);
            let credential = Credential::create(principal_id, password, salt, self.hash_params)?;
            Ok((
                vec![
                    Event::CredentialSet {
                        principal_id,
                        username: username.to_string(),
                        role: Role::Admin,
                        credential,
                    },
                    Event::audit(principal_id, "bootstrap_admin", Some(id.to_string())),
                ],
                id,
            ))
        })
    }

    pub fn has_admin(&self) -> bool {
        self.read(|s| s.has_admin())
    }
}
