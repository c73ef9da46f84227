use super::profile::{validate_contact_field, validate_email};
use super::{validate_username, Biller, BillerStatus, CustomerProfile};
use crate::auth::{validate_new_password, Credential};
use crate::bank::Bank;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::{AccountId, BillerId, CustomerId, PrincipalId};
use crate::ledger::{
    plan_open_account, plan_status, Account, AccountKind, AccountStatus, LedgerTransaction, Money,
    Owner, Posting, TxKind,
};
use crate::state::{BankState, Event};

pub const BILLER_NAME_MAX: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewCustomer {
    pub username: String,
    pub full_name: String,
    pub email: String,
    pub phone: String,
    pub postal_address: String,
}

/// Returns the vault account, planning its creation first if needed.
/// The vault is the settlement account that funds opening deposits.
fn ensure_vault(state: &BankState, events: &mut Vec<Event>, next_id: &mut AccountId) -> AccountId {
    if let Some(vault) = state.vault {
        return vault;
    }
    let id = *next_id;
    next_id.0 += 1;
    events.push(Event::AccountOpened {
        account_id: id,
        owner: Owner::Internal,
        kind: AccountKind::InternalSettlement,
        vault: true,
    });
    id
}

impl Bank {
    pub fn admin_create_customer(
        &self,
        token: &str,
        customer: &NewCustomer,
        initial_password: &str,
    ) -> Result<CustomerProfile> {
        let principal = self.require_admin(token)?;
        validate_username(&customer.username)?;
        validate_contact_field("full_name", &customer.full_name)?;
        validate_email(&customer.email)?;
        validate_contact_field("phone", &customer.phone)?;
        validate_contact_field("postal_address", &customer.postal_address)?;
        validate_new_password(initial_password)?;
        let salt = self.fresh_salt();
        self.mutate(|state, _| {
            if state.usernames.contains_key(&customer.username) {
                return Err(BankError::new(
                    ErrorCode::DuplicateUsername,
                    format!("username {:?} is taken", customer.username),
                ));
            }
            let id = state.next_customer_id();
            let credential =
                Credential::create(PrincipalId::Customer(id), initial_password, salt, self.hash_params)?;
            let profile = CustomerProfile {
                id,
                username: customer.username.clone(),
                full_name: customer.full_name.clone(),
                email: customer.email.clone(),
                phone: customer.phone.clone(),
                postal_address: customer.postal_address.clone(),
            };
            Ok((
                vec![
                    Event::CustomerCreated {
                        profile: profile.clone(),
                        credential,
                    },
                    Event::audit(principal.id, "create_customer", Some(id.to_string())),
                ],
                profile,
            ))
        })
    }

    /// Opens a customer account and, for a positive deposit, funds it from
    /// the vault with an INITIAL_FUNDING transaction.
    pub fn admin_open_funded_account(
        &self,
        token: &str,
        customer: CustomerId,
        kind: AccountKind,
        opening_deposit: Money,
    ) -> Result<Account> {
        let principal = self.require_admin(token)?;
        if opening_deposit.minor() < 0 {
            return Err(BankError::validation("opening deposit must not be negative"));
        }
        if !kind.is_customer() {
            return Err(BankError::validation("kind must be CUSTOMER_CHECKING or CUSTOMER_SAVINGS"));
        }
        self.mutate(|state, now| {
            if !state.customers.contains_key(&customer) {
                return Err(BankError::new(
                    ErrorCode::UnknownCustomer,
                    format!("no customer {customer}"),
                ));
            }
            let mut events = Vec::new();
            let mut next_id = state.book.next_account_id();
            let vault = ensure_vault(state, &mut events, &mut next_id);
            let (account_id, opened) =
                plan_open_account(state, Owner::Customer(customer), kind, next_id)?;
            events.push(opened);
            if opening_deposit.is_positive() {
                events.push(Event::TxCommitted(LedgerTransaction {
                    tx_id: state.book.next_tx_id(),
                    timestamp: now,
                    kind: TxKind::InitialFunding,
                    postings: vec![
                        Posting::debit(vault, opening_deposit),
                        Posting::credit(account_id, opening_deposit),
                    ],
                    memo: "Opening deposit".to_string(),
                    idempotency_key: None,
                    initiator: principal.id,
                }));
            }
            events.push(Event::audit(principal.id, "open_account", Some(account_id.to_string())));
            let account = Account {
                id: account_id,
                owner: Owner::Customer(customer),
                kind,
                status: AccountStatus::Active,
                balance: opening_deposit,
            };
            Ok((events, account))
        })
    }

    /// Registers a payee together with its own settlement account.
    pub fn admin_register_biller(&self, token: &str, name: &str) -> Result<Biller> {
        let principal = self.require_admin(token)?;
        let name = name.trim();
        if name.is_empty() || name.chars().count() > BILLER_NAME_MAX {
            return Err(BankError::validation(format!(
                "biller name must be 1 to {BILLER_NAME_MAX} characters"
            )));
        }
        self.mutate(|state, _| {
            let mut events = Vec::new();
            let mut next_id = state.book.next_account_id();
            ensure_vault(state, &mut events, &mut next_id);
            let settlement = next_id;
            events.push(Event::AccountOpened {
                account_id: settlement,
                owner: Owner::Internal,
                kind: AccountKind::InternalSettlement,
                vault: false,
            });
            let biller = Biller {
                id: state.next_biller_id(),
                name: name.to_string(),
                settlement_account_id: settlement,
                status: BillerStatus::Active,
            };
            events.push(Event::BillerRegistered(biller.clone()));
            events.push(Event::audit(principal.id, "register_biller", Some(biller.id.to_string())));
            Ok((events, biller))
        })
    }

    pub fn admin_set_biller_status(
        &self,
        token: &str,
        biller_id: BillerId,
        status: BillerStatus,
    ) -> Result<Biller> {
        let principal = self.require_admin(token)?;
        self.mutate(|state, _| {
            let mut biller = state.billers.get(&biller_id).cloned().ok_or_else(|| {
                BankError::new(ErrorCode::UnknownBiller, format!("no biller {biller_id}"))
            })?;
            biller.status = status;
            Ok((
                vec![
                    Event::BillerStatus { biller_id, status },
                    Event::audit(principal.id, "set_biller_status", Some(biller_id.to_string())),
                ],
                biller,
            ))
        })
    }

    /// Freezes, unfreezes, or closes an account.
    pub fn admin_set_account_status(
        &self,
        token: &str,
        account: AccountId,
        status: AccountStatus,
    ) -> Result<Account> {
        let principal = self.require_admin(token)?;
        self.mutate(|state, _| {
            let event = plan_status(state, account, status)?;
            let mut updated = state.book.account(account)?.clone();
            updated.status = status;
            Ok((
                vec![
                    event,
                    Event::audit(principal.id, "set_account_status", Some(account.to_string())),
                ],
                updated,
            ))
        })
    }

    pub fn customer(&self, id: CustomerId) -> Option<CustomerProfile> {
        self.read(|s| s.customers.get(&id).cloned())
    }
}
