use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::clock::Millis;
use crate::error::{BankError, Result};
use crate::ids::{AccountId, CustomerId, PrincipalId, TxId};

pub const MEMO_MAX_CHARS: usize = 140;
pub const IDEMPOTENCY_KEY_MAX_CHARS: usize = 64;

/// An amount in integer minor currency units (cents).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn minor(self) -> i64 {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn checked_add(self, other: Money) -> Result<Money> {
        self.0
            .checked_add(other.0)
            .map(Money)
            .ok_or_else(|| BankError::validation("amount overflow"))
    }

    pub fn checked_sub(self, other: Money) -> Result<Money> {
        self.0
            .checked_sub(other.0)
            .map(Money)
            .ok_or_else(|| BankError::validation("amount overflow"))
    }

    /// Renders as a decimal with two fraction digits and thousands
    /// separators: `100000` becomes `1,000.00`.
    pub fn to_decimal_string(self) -> String {
        let neg = self.0 < 0;
        let abs = self.0.unsigned_abs();
        let units = (abs / 100).to_string();
        let mut grouped = String::with_capacity(units.len() + units.len() / 3);
        for (i, ch) in units.chars().enumerate() {
            if i > 0 && (units.len() - i).is_multiple_of(3) {
                grouped.push(',');
            }
            grouped.push(ch);
        }
        format!("{}{}.{:02}", if neg { "-" } else { "" }, grouped, abs % 100)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::iter::Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

/// Who owns an account: a customer or the bank itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Customer(CustomerId),
    Internal,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Customer(id) => id.fmt(f),
            Owner::Internal => f.write_str("INTERNAL"),
        }
    }
}

impl Serialize for Owner {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Owner {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == "INTERNAL" {
            Ok(Owner::Internal)
        } else {
            s.parse().map(Owner::Customer).map_err(serde::de::Error::custom)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AccountKind {
    CustomerChecking,
    CustomerSavings,
    InternalSettlement,
}

impl AccountKind {
    pub fn is_customer(self) -> bool {
        !matches!(self, AccountKind::InternalSettlement)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AccountStatus {
    Active,
    Frozen,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub id: AccountId,
    pub owner: Owner,
    pub kind: AccountKind,
    pub status: AccountStatus,
    /// Cached; always equals the sum of committed postings.
    #[serde(rename = "balance_minor")]
    pub balance: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Debit,
    Credit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub account_id: AccountId,
    pub direction: Direction,
    #[serde(rename = "amount_minor")]
    pub amount: Money,
}

impl Posting {
    pub fn debit(account_id: AccountId, amount: Money) -> Self {
        Self {
            account_id,
            direction: Direction::Debit,
            amount,
        }
    }

    pub fn credit(account_id: AccountId, amount: Money) -> Self {
        Self {
            account_id,
            direction: Direction::Credit,
            amount,
        }
    }

    /// Effect on the account balance under the liability convention:
    /// credits increase, debits decrease.
    pub fn signed_amount(&self) -> Money {
        match self.direction {
            Direction::Credit => self.amount,
            Direction::Debit => Money(-self.amount.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TxKind {
    Transfer,
    BillPayment,
    InitialFunding,
    Adjustment,
}

impl TxKind {
    /// Kinds a customer can initiate; these are blocked on frozen or
    /// closed accounts.
    pub fn is_customer_initiated(self) -> bool {
        matches!(self, TxKind::Transfer | TxKind::BillPayment)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerTransaction {
    pub tx_id: TxId,
    pub timestamp: Millis,
    pub kind: TxKind,
    pub postings: Vec<Posting>,
    pub memo: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotency_key: Option<String>,
    pub initiator: PrincipalId,
}

impl LedgerTransaction {
    pub fn debit_total(&self) -> Money {
        self.postings
            .iter()
            .filter(|p| p.direction == Direction::Debit)
            .map(|p| p.amount)
            .sum()
    }

    pub fn credit_total(&self) -> Money {
        self.postings
            .iter()
            .filter(|p| p.direction == Direction::Credit)
            .map(|p| p.amount)
            .sum()
    }
}

/// What a caller asks the ledger to commit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxRequest {
    pub kind: TxKind,
    pub postings: Vec<Posting>,
    pub memo: String,
    pub idempotency_key: Option<String>,
    pub initiator: PrincipalId,
}

/// Outcome of posting a transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Posted {
    Committed(LedgerTransaction),
    /// The (initiator, idempotency key) pair was already used; this is the
    /// original transaction, unchanged.
    Replayed(LedgerTransaction),
}

impl Posted {
    pub fn transaction(&self) -> &LedgerTransaction {
        match self {
            Posted::Committed(tx) | Posted::Replayed(tx) => tx,
        }
    }

    pub fn into_transaction(self) -> LedgerTransaction {
        match self {
            Posted::Committed(tx) | Posted::Replayed(tx) => tx,
        }
    }

    pub fn is_replay(&self) -> bool {
        matches!(self, Posted::Replayed(_))
    }
}
