use serde::{Deserialize, Serialize};

use crate::clock::Millis;
use crate::ids::{AccountId, AdminId, BillerId, ChequeRequestId, CustomerId, StopOrderId, TxId};
use crate::ledger::{LedgerTransaction, Money, TxKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomerProfile {
    pub id: CustomerId,
    pub username: String,
    pub full_name: String,
    pub email: String,
    pub phone: String,
    pub postal_address: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdminProfile {
    pub id: AdminId,
    pub username: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BillerStatus {
    Active,
    Retired,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Biller {
    pub id: BillerId,
    pub name: String,
    pub settlement_account_id: AccountId,
    pub status: BillerStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChequeRequestStatus {
    Pending,
    Approved,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChequeBookRequest {
    pub id: ChequeRequestId,
    pub account_id: AccountId,
    pub leaves: u32,
    pub status: ChequeRequestStatus,
    pub requested_ts: Millis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decided_ts: Option<Millis>,
}

pub const CHEQUE_BOOK_LEAVES: [u32; 3] = [25, 50, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopOrderStatus {
    Active,
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopChequeOrder {
    pub id: StopOrderId,
    pub account_id: AccountId,
    pub cheque_number: String,
    pub reason: String,
    pub status: StopOrderStatus,
}

/// Customer-facing confirmation of a completed money movement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receipt {
    pub tx_id: TxId,
    pub timestamp: Millis,
    pub kind: TxKind,
    #[serde(rename = "amount_minor")]
    pub amount: Money,
    pub from_account: AccountId,
    /// Biller id for bill payments, destination account id otherwise.
    pub counterparty: String,
    pub memo: String,
}

impl Receipt {
    /// Builds the receipt for a committed two-leg transaction. The debit leg
    /// is the source; `counterparty` names the credited side.
    pub fn from_transaction(tx: &LedgerTransaction, counterparty: String) -> Self {
        let debit = tx
            .postings
            .iter()
            .find(|p| p.direction == crate::ledger::Direction::Debit)
            .expect("committed transactions always have a debit leg");
        Receipt {
            tx_id: tx.tx_id,
            timestamp: tx.timestamp,
            kind: tx.kind,
            amount: debit.amount,
            from_account: debit.account_id,
            counterparty,
            memo: tx.memo.clone(),
        }
    }
}

/// One line of an account statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementLine {
    pub tx_id: TxId,
    pub timestamp: Millis,
    pub kind: TxKind,
    /// Credits positive, debits negative.
    pub amount_minor: i64,
    pub running_balance_minor: i64,
    pub memo: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementPage {
    pub account_id: AccountId,
    pub lines: Vec<StatementLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_cursor: Option<TxId>,
}
