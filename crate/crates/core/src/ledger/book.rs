//! The in-memory book of accounts and committed transactions.
//!
//! `Book` never writes anything durable itself. Callers validate a request
//! with [`Book::prepare`], journal the resulting transaction, then fold it in
//! with [`Book::apply_transaction`]. Replay uses the same fold.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::types::*;
use crate::clock::Millis;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::{AccountId, PrincipalId, TxId};

pub const PAGE_LIMIT_MAX: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PostingRef {
    tx_pos: usize,
    posting: usize,
    balance_after: Money,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Book {
    accounts: BTreeMap<AccountId, Account>,
    transactions: Vec<LedgerTransaction>,
    idempotency: BTreeMap<PrincipalId, BTreeMap<String, TxId>>,
    #[serde(skip)]
    by_account: BTreeMap<AccountId, Vec<PostingRef>>,
}

/// Filters and paging for [`Book::list_postings`]. Bounds are inclusive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PostingQuery {
    pub from_ts: Option<Millis>,
    pub to_ts: Option<Millis>,
    pub min_amount: Option<Money>,
    pub max_amount: Option<Money>,
    /// Return only postings from transactions after this one.
    pub cursor: Option<TxId>,
    pub limit: usize,
}

impl PostingQuery {
    pub fn with_limit(limit: usize) -> Self {
        Self {
            limit,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.limit == 0 || self.limit > PAGE_LIMIT_MAX {
            return Err(BankError::validation(format!(
                "limit must be between 1 and {PAGE_LIMIT_MAX}"
            )));
        }
        if let (Some(from), Some(to)) = (self.from_ts, self.to_ts) {
            if from > to {
                return Err(BankError::validation("from_ts is after to_ts"));
            }
        }
        if let (Some(min), Some(max)) = (self.min_amount, self.max_amount) {
            if min > max {
                return Err(BankError::validation("min_amount is above max_amount"));
            }
        }
        Ok(())
    }

    fn matches(&self, tx: &LedgerTransaction, posting: &Posting) -> bool {
        self.from_ts.is_none_or(|from| tx.timestamp >= from)
            && self.to_ts.is_none_or(|to| tx.timestamp <= to)
            && self.min_amount.is_none_or(|min| posting.amount >= min)
            && self.max_amount.is_none_or(|max| posting.amount <= max)
    }
}

/// One posting as seen from its account.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PostingView {
    pub tx_id: TxId,
    pub timestamp: Millis,
    pub kind: TxKind,
    pub direction: Direction,
    pub amount: Money,
    pub memo: String,
    /// Account balance right after this posting.
    pub balance_after: Money,
}

impl PostingView {
    pub fn signed_amount(&self) -> Money {
        match self.direction {
            Direction::Credit => self.amount,
            Direction::Debit => Money(-self.amount.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostingPage {
    pub items: Vec<PostingView>,
    pub next_cursor: Option<TxId>,
}

impl Book {
    pub fn next_account_id(&self) -> AccountId {
        AccountId(self.accounts.len() as u64 + 1)
    }

    pub fn next_tx_id(&self) -> TxId {
        TxId(self.transactions.len() as u64 + 1)
    }

    pub fn account(&self, id: AccountId) -> Result<&Account> {
        self.accounts
            .get(&id)
            .ok_or_else(|| BankError::new(ErrorCode::UnknownAccount, format!("no account {id}")))
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn transactions(&self) -> &[LedgerTransaction] {
        &self.transactions
    }

    pub fn transaction(&self, id: TxId) -> Option<&LedgerTransaction> {
        let pos = usize::try_from(id.0).ok()?.checked_sub(1)?;
        self.transactions.get(pos)
    }

    pub fn balance(&self, id: AccountId) -> Result<Money> {
        self.account(id).map(|a| a.balance)
    }

    /// Sum of every account balance. Zero whenever the book is consistent.
    pub fn total(&self) -> i128 {
        self.accounts.values().map(|a| a.balance.0 as i128).sum()
    }

    pub fn find_idempotent(&self, initiator: PrincipalId, key: &str) -> Option<&LedgerTransaction> {
        let tx_id = self.idempotency.get(&initiator)?.get(key)?;
        self.transaction(*tx_id)
    }

    pub fn insert_account(&mut self, account: Account) -> Result<()> {
        if account.id != self.next_account_id() {
            return Err(BankError::internal(format!(
                "account {} out of sequence, expected {}",
                account.id,
                self.next_account_id()
            )));
        }
        self.by_account.insert(account.id, Vec::new());
        self.accounts.insert(account.id, account);
        Ok(())
    }

    pub fn set_status(&mut self, id: AccountId, status: AccountStatus) -> Result<()> {
        let account = self
            .accounts
            .get_mut(&id)
            .ok_or_else(|| BankError::new(ErrorCode::UnknownAccount, format!("no account {id}")))?;
        account.status = status;
        Ok(())
    }

    /// Checks every ledger rule for `req` against current balances and
    /// returns the transaction that would be committed at `timestamp`.
    pub fn prepare(&self, req: &TxRequest, timestamp: Millis) -> Result<LedgerTransaction> {
        if req.postings.len() < 2 {
            return Err(BankError::validation("a transaction needs at least two postings"));
        }
        if let Some(p) = req.postings.iter().find(|p| !p.amount.is_positive()) {
            return Err(BankError::validation(format!(
                "posting amount must be positive, got {} on {}",
                p.amount, p.account_id
            )));
        }
        if req.memo.chars().count() > MEMO_MAX_CHARS {
            return Err(BankError::validation(format!(
                "memo exceeds {MEMO_MAX_CHARS} characters"
            )));
        }
        if let Some(key) = &req.idempotency_key {
            validate_idempotency_key(key)?;
        }
        let mut seen = HashSet::new();
        if !req.postings.iter().all(|p| seen.insert(p.account_id)) {
            return Err(BankError::validation(
                "an account may appear in at most one posting per transaction",
            ));
        }

        let mut debits = Money::ZERO;
        let mut credits = Money::ZERO;
        for p in &req.postings {
            match p.direction {
                Direction::Debit => debits = debits.checked_add(p.amount)?,
                Direction::Credit => credits = credits.checked_add(p.amount)?,
            }
        }
        if debits != credits {
            return Err(BankError::new(
                ErrorCode::Unbalanced,
                format!("debits {debits} do not equal credits {credits}"),
            ));
        }

        for p in &req.postings {
            let account = self.account(p.account_id)?;
            if req.kind.is_customer_initiated() && account.status != AccountStatus::Active {
                let status = match account.status {
                    AccountStatus::Closed => "closed",
                    _ => "frozen",
                };
                return Err(BankError::new(
                    ErrorCode::Frozen,
                    format!("account {} is {status}", account.id),
                ));
            }
        }
        for p in &req.postings {
            let account = self.account(p.account_id)?;
            let after = account.balance.checked_add(p.signed_amount())?;
            if account.kind.is_customer() && after.0 < 0 {
                return Err(BankError::new(
                    ErrorCode::InsufficientFunds,
                    format!("insufficient funds in {}", account.id),
                ));
            }
        }

        Ok(LedgerTransaction {
            tx_id: self.next_tx_id(),
            timestamp,
            kind: req.kind,
            postings: req.postings.clone(),
            memo: req.memo.clone(),
            idempotency_key: req.idempotency_key.clone(),
            initiator: req.initiator,
        })
    }

    /// Folds a committed transaction into balances and indexes.
    ///
    /// Only structural checks happen here (sequence, balance, known
    /// accounts); policy checks belong to [`Book::prepare`].
    pub fn apply_transaction(&mut self, tx: LedgerTransaction) -> Result<()> {
        if tx.tx_id != self.next_tx_id() {
            return Err(BankError::internal(format!(
                "transaction {} out of sequence, expected {}",
                tx.tx_id,
                self.next_tx_id()
            )));
        }
        if tx.postings.len() < 2 || tx.debit_total() != tx.credit_total() {
            return Err(BankError::new(
                ErrorCode::Unbalanced,
                format!("transaction {} is unbalanced", tx.tx_id),
            ));
        }
        for p in &tx.postings {
            self.account(p.account_id)?;
        }
        let tx_pos = self.transactions.len();
        for (i, p) in tx.postings.iter().enumerate() {
            let account = self.accounts.get_mut(&p.account_id).expect("checked above");
            account.balance = account.balance.checked_add(p.signed_amount())?;
            self.by_account.entry(p.account_id).or_default().push(PostingRef {
                tx_pos,
                posting: i,
                balance_after: account.balance,
            });
        }
        if let Some(key) = &tx.idempotency_key {
            self.idempotency
                .entry(tx.initiator)
                .or_default()
                .insert(key.clone(), tx.tx_id);
        }
        self.transactions.push(tx);
        Ok(())
    }

    /// Postings touching `account` that match `query`, in tx_id order.
    pub fn list_postings(&self, account: AccountId, query: &PostingQuery) -> Result<PostingPage> {
        self.account(account)?;
        query.validate()?;
        let refs = self.by_account.get(&account).map(Vec::as_slice).unwrap_or(&[]);
        let start = match query.cursor {
            Some(cursor) => refs.partition_point(|r| self.transactions[r.tx_pos].tx_id <= cursor),
            None => 0,
        };
        let mut items = Vec::with_capacity(query.limit);
        let mut more = false;
        for r in &refs[start..] {
            let tx = &self.transactions[r.tx_pos];
            let posting = &tx.postings[r.posting];
            if !query.matches(tx, posting) {
                continue;
            }
            if items.len() == query.limit {
                more = true;
                break;
            }
            items.push(PostingView {
                tx_id: tx.tx_id,
                timestamp: tx.timestamp,
                kind: tx.kind,
                direction: posting.direction,
                amount: posting.amount,
                memo: tx.memo.clone(),
                balance_after: r.balance_after,
            });
        }
        let next_cursor = if more { items.last().map(|v| v.tx_id) } else { None };
        Ok(PostingPage { items, next_cursor })
    }

    /// Rebuilds the per-account posting index from the transaction list.
    pub fn rebuild_index(&mut self) {
        let mut running: BTreeMap<AccountId, Money> = BTreeMap::new();
        let mut by_account: BTreeMap<AccountId, Vec<PostingRef>> =
            self.accounts.keys().map(|id| (*id, Vec::new())).collect();
        for (tx_pos, tx) in self.transactions.iter().enumerate() {
            for (i, p) in tx.postings.iter().enumerate() {
                let bal = running.entry(p.account_id).or_default();
                bal.0 += p.signed_amount().0;
                by_account.entry(p.account_id).or_default().push(PostingRef {
                    tx_pos,
                    posting: i,
                    balance_after: *bal,
                });
            }
        }
        self.by_account = by_account;
    }
}

pub fn validate_idempotency_key(key: &str) -> Result<()> {
    let len = key.chars().count();
    if len == 0 || len > IDEMPOTENCY_KEY_MAX_CHARS {
        return Err(BankError::validation(format!(
            "idempotency key must be 1 to {IDEMPOTENCY_KEY_MAX_CHARS} characters"
        )));
    }
    Ok(())
}
