//! The complete durable state and the journal events that build it.
//!
//! Every mutation is expressed as an [`Event`]. The live path validates,
//! journals, then applies; recovery applies the same events in order, so a
//! replayed state equals the live one field for field.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::auth::{Credential, Role};
use crate::clock::Millis;
use crate::error::{BankError, Result};
use crate::ids::{
    AccountId, AdminId, BillerId, ChequeRequestId, CustomerId, PrincipalId, StopOrderId,
};
use crate::ledger::{Account, AccountKind, AccountStatus, Book, LedgerTransaction, Money, Owner};
use crate::persistence::{JournalRecord, PendingRecord, Replayable};
use crate::services::types::*;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Event {
    TxCommitted(LedgerTransaction),
    CustomerCreated {
        profile: CustomerProfile,
        credential: Credential,
    },
    AccountOpened {
        account_id: AccountId,
        owner: Owner,
        kind: AccountKind,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        vault: bool,
    },
    AccountStatus {
        account_id: AccountId,
        status: AccountStatus,
    },
    BillerRegistered(Biller),
    BillerStatus {
        biller_id: BillerId,
        status: BillerStatus,
    },
    ChequeRequest(ChequeBookRequest),
    ChequeDecision {
        request_id: ChequeRequestId,
        status: ChequeRequestStatus,
        decided_ts: Millis,
    },
    StopOrder(StopChequeOrder),
    CredentialSet {
        principal_id: PrincipalId,
        username: String,
        role: Role,
        credential: Credential,
    },
    ProfileUpdated {
        customer_id: CustomerId,
        email: String,
        phone: String,
        postal_address: String,
    },
    Audit {
        principal: PrincipalId,
        operation: String,
        outcome: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference: Option<String>,
    },
}

impl Event {
    /// Splits into the journal's `kind` string and payload document.
    pub fn to_pending(&self, ts: Millis) -> Result<PendingRecord> {
        let value = serde_json::to_value(self).map_err(|e| BankError::internal(e.to_string()))?;
        let Value::Object(mut map) = value else {
            return Err(BankError::internal("event did not serialize to an object"));
        };
        let kind = match map.remove("kind") {
            Some(Value::String(k)) => k,
            _ => return Err(BankError::internal("event has no kind")),
        };
        let payload = map.remove("payload").unwrap_or(Value::Object(Default::default()));
        Ok(PendingRecord { ts, kind, payload })
    }

    pub fn from_record(record: &JournalRecord) -> Result<Self> {
        let mut map = serde_json::Map::new();
        map.insert("kind".into(), Value::String(record.kind.clone()));
        map.insert("payload".into(), record.payload.clone());
        serde_json::from_value(Value::Object(map)).map_err(|e| {
            BankError::validation(format!("undecodable {} payload: {e}", record.kind))
        })
    }

    pub fn audit(principal: PrincipalId, operation: &str, reference: Option<String>) -> Self {
        Event::Audit {
            principal,
            operation: operation.to_string(),
            outcome: "OK".to_string(),
            reference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalEntry {
    pub principal_id: PrincipalId,
    pub role: Role,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankState {
    pub book: Book,
    pub vault: Option<AccountId>,
    pub customers: BTreeMap<CustomerId, CustomerProfile>,
    pub admins: BTreeMap<AdminId, AdminProfile>,
    pub usernames: BTreeMap<String, PrincipalEntry>,
    pub credentials: BTreeMap<PrincipalId, Credential>,
    pub billers: BTreeMap<BillerId, Biller>,
    pub cheque_requests: BTreeMap<ChequeRequestId, ChequeBookRequest>,
    pub stop_orders: BTreeMap<StopOrderId, StopChequeOrder>,
    #[serde(skip)]
    biller_by_settlement: BTreeMap<AccountId, BillerId>,
}

fn out_of_sequence(what: &str, got: impl std::fmt::Display, want: impl std::fmt::Display) -> BankError {
    BankError::internal(format!("{what} {got} out of sequence, expected {want}"))
}

impl BankState {
    pub fn next_customer_id(&self) -> CustomerId {
        CustomerId(self.customers.len() as u64 + 1)
    }

    pub fn next_admin_id(&self) -> AdminId {
        AdminId(self.admins.len() as u64 + 1)
    }

    pub fn next_biller_id(&self) -> BillerId {
        BillerId(self.billers.len() as u64 + 1)
    }

    pub fn next_cheque_request_id(&self) -> ChequeRequestId {
        ChequeRequestId(self.cheque_requests.len() as u64 + 1)
    }

    pub fn next_stop_order_id(&self) -> StopOrderId {
        StopOrderId(self.stop_orders.len() as u64 + 1)
    }

    pub fn biller_for_settlement(&self, account: AccountId) -> Option<BillerId> {
        self.biller_by_settlement.get(&account).copied()
    }

    pub fn has_admin(&self) -> bool {
        !self.admins.is_empty()
    }

    pub fn apply_event(&mut self, event: Event) -> Result<()> {
        match event {
            Event::TxCommitted(tx) => self.book.apply_transaction(tx)?,
            Event::CustomerCreated { profile, credential } => {
                if profile.id != self.next_customer_id() {
                    return Err(out_of_sequence("customer", profile.id, self.next_customer_id()));
                }
                let principal_id = PrincipalId::Customer(profile.id);
                self.usernames.insert(
                    profile.username.clone(),
                    PrincipalEntry {
                        principal_id,
                        role: Role::Customer,
                    },
                );
                self.credentials.insert(principal_id, credential);
                self.customers.insert(profile.id, profile);
            }
            Event::AccountOpened {
                account_id,
                owner,
                kind,
                vault,
            } => {
                self.book.insert_account(Account {
                    id: account_id,
                    owner,
                    kind,
                    status: AccountStatus::Active,
                    balance: Money::ZERO,
                })?;
                if vault {
                    self.vault = Some(account_id);
                }
            }
            Event::AccountStatus { account_id, status } => {
                self.book.set_status(account_id, status)?;
            }
            Event::BillerRegistered(biller) => {
                if biller.id != self.next_biller_id() {
                    return Err(out_of_sequence("biller", biller.id, self.next_biller_id()));
                }
                self.book.account(biller.settlement_account_id)?;
                self.biller_by_settlement
                    .insert(biller.settlement_account_id, biller.id);
                self.billers.insert(biller.id, biller);
            }
            Event::BillerStatus { biller_id, status } => {
                let biller = self
                    .billers
                    .get_mut(&biller_id)
                    .ok_or_else(|| BankError::internal(format!("no biller {biller_id}")))?;
                biller.status = status;
            }
            Event::ChequeRequest(req) => {
                if req.id != self.next_cheque_request_id() {
                    return Err(out_of_sequence("cheque request", req.id, self.next_cheque_request_id()));
                }
                self.cheque_requests.insert(req.id, req);
            }
            Event::ChequeDecision {
                request_id,
                status,
                decided_ts,
            } => {
                let req = self
                    .cheque_requests
                    .get_mut(&request_id)
                    .ok_or_else(|| BankError::internal(format!("no cheque request {request_id}")))?;
                if req.status != ChequeRequestStatus::Pending {
                    return Err(BankError::internal(format!("{request_id} already decided")));
                }
                req.status = status;
                req.decided_ts = Some(decided_ts);
            }
            Event::StopOrder(order) => {
                if order.id != self.next_stop_order_id() {
                    return Err(out_of_sequence("stop order", order.id, self.next_stop_order_id()));
                }
                self.stop_orders.insert(order.id, order);
            }
            Event::CredentialSet {
                principal_id,
                username,
                role,
                credential,
            } => {
                if let PrincipalId::Admin(id) = principal_id {
                    if !self.admins.contains_key(&id) {
                        if id != self.next_admin_id() {
                            return Err(out_of_sequence("admin", id, self.next_admin_id()));
                        }
                        self.admins.insert(
                            id,
                            AdminProfile {
                                id,
                                username: username.clone(),
                            },
                        );
                    }
                }
                self.usernames
                    .insert(username, PrincipalEntry { principal_id, role });
                self.credentials.insert(principal_id, credential);
            }
            Event::ProfileUpdated {
                customer_id,
                email,
                phone,
                postal_address,
            } => {
                let profile = self
                    .customers
                    .get_mut(&customer_id)
                    .ok_or_else(|| BankError::internal(format!("no customer {customer_id}")))?;
                profile.email = email;
                profile.phone = phone;
                profile.postal_address = postal_address;
            }
            Event::Audit { .. } => {}
        }
        Ok(())
    }
}

impl Replayable for BankState {
    fn apply(&mut self, record: &JournalRecord) -> Result<()> {
        self.apply_event(Event::from_record(record)?)
    }

    fn after_load(&mut self) {
        self.book.rebuild_index();
        self.biller_by_settlement = self
            .billers
            .values()
            .map(|b| (b.settlement_account_id, b.id))
            .collect();
    }
}
