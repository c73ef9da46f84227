//! Double-entry ledger: accounts, balanced transactions, balances, and
//! per-account posting history.
//!
//! Balances follow the liability convention (credits increase, debits
//! decrease). Since the book starts empty and every transaction balances,
//! the sum of all balances is always exactly zero; customer accounts may
//! never go negative while internal settlement accounts may.

mod book;
mod types;

pub use book::{
    validate_idempotency_key, Book, PostingPage, PostingQuery, PostingView, PAGE_LIMIT_MAX,
};
pub use types::*;

use crate::bank::Bank;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::{AccountId, PrincipalId};
use crate::state::{BankState, Event};

pub(crate) fn plan_open_account(
    state: &BankState,
    owner: Owner,
    kind: AccountKind,
    first_id: AccountId,
) -> Result<(AccountId, Event)> {
    match owner {
        Owner::Customer(id) => {
            if !state.customers.contains_key(&id) {
                return Err(BankError::new(
                    ErrorCode::UnknownCustomer,
                    format!("no customer {id}"),
                ));
            }
            if !kind.is_customer() {
                return Err(BankError::validation("customers hold only customer accounts"));
            }
        }
        Owner::Internal => {
            if kind.is_customer() {
                return Err(BankError::validation(
                    "internal accounts must be INTERNAL_SETTLEMENT",
                ));
            }
        }
    }
    Ok((
        first_id,
        Event::AccountOpened {
            account_id: first_id,
            owner,
            kind,
            vault: false,
        },
    ))
}

/// Idempotent replay lookup followed by full validation.
pub(crate) fn plan_post(
    state: &BankState,
    req: &TxRequest,
    now: crate::clock::Millis,
) -> Result<Posted> {
    if let Some(key) = &req.idempotency_key {
        validate_idempotency_key(key)?;
        if let Some(original) = state.book.find_idempotent(req.initiator, key) {
            return Ok(Posted::Replayed(original.clone()));
        }
    }
    state.book.prepare(req, now).map(Posted::Committed)
}

impl Bank {
    /// Opens an ACTIVE account with zero balance.
    pub fn open_account(&self, owner: Owner, kind: AccountKind) -> Result<AccountId> {
        self.mutate(|state, _| {
            let (id, event) = plan_open_account(state, owner, kind, state.book.next_account_id())?;
            Ok((vec![event], id))
        })
    }

    /// Atomically commits a balanced transaction, or commits nothing.
    ///
    /// A repeated `(initiator, idempotency_key)` returns the original
    /// transaction as [`Posted::Replayed`] without journaling anything.
    pub fn post_transaction(&self, req: TxRequest) -> Result<Posted> {
        self.mutate(|state, now| {
            let posted = plan_post(state, &req, now)?;
            let events = match &posted {
                Posted::Committed(tx) => vec![Event::TxCommitted(tx.clone())],
                Posted::Replayed(_) => Vec::new(),
            };
            Ok((events, posted))
        })
    }

    pub fn balance(&self, account: AccountId) -> Result<Money> {
        self.read(|s| s.book.balance(account))
    }

    pub fn account(&self, account: AccountId) -> Result<Account> {
        self.read(|s| s.book.account(account).cloned())
    }

    pub fn list_postings(&self, account: AccountId, query: &PostingQuery) -> Result<PostingPage> {
        self.read(|s| s.book.list_postings(account, query))
    }

    /// Changes an account's status. Closing requires a zero balance.
    pub fn set_account_status(&self, account: AccountId, status: AccountStatus) -> Result<Account> {
        self.mutate(|state, _| {
            let event = plan_status(state, account, status)?;
            let mut updated = state.book.account(account)?.clone();
            updated.status = status;
            Ok((vec![event], updated))
        })
    }

    pub fn transaction_count(&self) -> usize {
        self.read(|s| s.book.transactions().len())
    }

    /// Every committed transaction, in commit order.
    pub fn transactions(&self) -> Vec<LedgerTransaction> {
        self.read(|s| s.book.transactions().to_vec())
    }

    pub fn accounts(&self) -> Vec<Account> {
        self.read(|s| s.book.accounts().cloned().collect())
    }

    /// Initiator recorded on ledger-level calls that are not made on behalf
    /// of a session.
    pub fn system_principal() -> PrincipalId {
        PrincipalId::Admin(crate::ids::AdminId(0))
    }
}

pub(crate) fn plan_status(state: &BankState, account: AccountId, status: AccountStatus) -> Result<Event> {
    let current = state.book.account(account)?;
    if status == AccountStatus::Closed && current.balance != Money::ZERO {
        return Err(BankError::validation(format!(
            "cannot close {account} with nonzero balance {}",
            current.balance
        )));
    }
    Ok(Event::AccountStatus {
        account_id: account,
        status,
    })
}
