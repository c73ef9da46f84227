//! Wire shapes. Responses expose only allowlisted fields; credentials,
//! salts, and internal settlement account ids never appear.

use serde::{Deserialize, Serialize};

use crate::auth::{Role, Session};
use crate::ids::{AccountId, BillerId, CustomerId, PrincipalId};
use crate::ledger::{Account, AccountKind, AccountStatus, Money};
use crate::services::{Biller, BillerStatus, ChequeRequestStatus};

#[derive(Debug, Serialize)]
pub struct ErrorBody<'a> {
    pub code: &'a str,
    pub message: &'a str,
}

#[derive(Debug, Serialize)]
pub struct ErrorEnvelope<'a> {
    pub error: ErrorBody<'a>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub status: String,
}

impl Ack {
    pub fn ok() -> Self {
        Self {
            status: "ok".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub last_seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub token: String,
    pub principal_id: PrincipalId,
    pub role: Role,
    pub idle_ttl_s: u64,
}

impl From<&Session> for SessionView {
    fn from(s: &Session) -> Self {
        Self {
            token: s.token.clone(),
            principal_id: s.principal_id,
            role: s.role,
            idle_ttl_s: s.idle_ttl_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountView {
    pub account_id: AccountId,
    pub kind: AccountKind,
    pub status: AccountStatus,
    pub amount_minor: i64,
}

impl From<&Account> for AccountView {
    fn from(a: &Account) -> Self {
        Self {
            account_id: a.id,
            kind: a.kind,
            status: a.status,
            amount_minor: a.balance.minor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountList {
    pub accounts: Vec<AccountView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceView {
    pub account_id: AccountId,
    pub amount_minor: i64,
}

impl BalanceView {
    pub fn new(account_id: AccountId, balance: Money) -> Self {
        Self {
            account_id,
            amount_minor: balance.minor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BillerView {
    pub biller_id: BillerId,
    pub name: String,
    pub status: BillerStatus,
}

impl From<&Biller> for BillerView {
    fn from(b: &Biller) -> Self {
        Self {
            biller_id: b.id,
            name: b.name.clone(),
            status: b.status,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BillerList {
    pub billers: Vec<BillerView>,
}

// Request bodies.

#[derive(Debug, Clone, Deserialize)]
pub struct LoginRequest {
    pub username: String,
    pub password: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TransferRequest {
    pub from_account: AccountId,
    pub to_account: AccountId,
    pub amount_minor: i64,
    #[serde(default)]
    pub memo: String,
    pub idempotency_key: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BillPaymentRequest {
    pub from_account: AccountId,
    pub biller_id: BillerId,
    pub reference: String,
    pub amount_minor: i64,
    pub idempotency_key: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChequeBookRequestBody {
    pub account_id: AccountId,
    pub leaves: u32,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StopOrderRequest {
    pub account_id: AccountId,
    pub cheque_number: String,
    #[serde(default)]
    pub reason: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PasswordChangeRequest {
    pub old_password: String,
    pub new_password: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ContactRequest {
    pub email: Option<String>,
    pub phone: Option<String>,
    pub postal_address: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NewCustomerRequest {
    pub username: String,
    pub full_name: String,
    pub email: String,
    pub phone: String,
    pub postal_address: String,
    pub initial_password: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct OpenAccountRequest {
    pub customer_id: CustomerId,
    pub kind: AccountKind,
    #[serde(default)]
    pub amount_minor: i64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NewBillerRequest {
    pub name: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DecisionRequest {
    pub decision: ChequeRequestStatus,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AccountStatusRequest {
    pub status: AccountStatus,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BillerStatusRequest {
    pub status: BillerStatus,
}
