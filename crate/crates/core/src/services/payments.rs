use super::{owned_account, receipt_for, Receipt};
use crate::bank::Bank;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::{AccountId, BillerId};
use crate::ledger::{plan_post, validate_idempotency_key, Money, Posted, Posting, TxKind, TxRequest};
use crate::services::BillerStatus;
use crate::state::Event;

pub const BILL_REFERENCE_MAX: usize = 40;

fn positive(amount: Money) -> Result<()> {
    if amount.is_positive() {
        Ok(())
    } else {
        Err(BankError::validation("amount must be positive"))
    }
}

impl Bank {
    /// Pays a registered biller from one of the caller's accounts.
    pub fn pay_bill(
        &self,
        token: &str,
        from_account: AccountId,
        biller_id: BillerId,
        reference: &str,
        amount: Money,
        idempotency_key: &str,
    ) -> Result<Receipt> {
        let principal = self.authenticate(token)?;
        self.mutate(|state, now| {
            owned_account(state, principal, from_account)?;
            validate_idempotency_key(idempotency_key)?;
            if let Some(tx) = state.book.find_idempotent(principal.id, idempotency_key) {
                return Ok((Vec::new(), receipt_for(state, tx)));
            }
            positive(amount)?;
            let ref_len = reference.chars().count();
            if ref_len == 0 || ref_len > BILL_REFERENCE_MAX {
                return Err(BankError::validation(format!(
                    "reference must be 1 to {BILL_REFERENCE_MAX} characters"
                )));
            }
            let biller = state.billers.get(&biller_id).ok_or_else(|| {
                BankError::new(ErrorCode::UnknownBiller, format!("no biller {biller_id}"))
            })?;
            if biller.status == BillerStatus::Retired {
                return Err(BankError::new(
                    ErrorCode::BillerRetired,
                    format!("biller {biller_id} no longer accepts payments"),
                ));
            }
            let req = TxRequest {
                kind: TxKind::BillPayment,
                postings: vec![
                    Posting::debit(from_account, amount),
                    Posting::credit(biller.settlement_account_id, amount),
                ],
                memo: format!("Bill payment to {} ({biller_id}) ref {reference}", biller.name),
                idempotency_key: Some(idempotency_key.to_string()),
                initiator: principal.id,
            };
            commit_with_receipt(state, &req, now, "pay_bill")
        })
    }

    /// Moves money from one of the caller's accounts to any customer account.
    pub fn transfer_funds(
        &self,
        token: &str,
        from_account: AccountId,
        to_account: AccountId,
        amount: Money,
        memo: &str,
        idempotency_key: &str,
    ) -> Result<Receipt> {
        let principal = self.authenticate(token)?;
        self.mutate(|state, now| {
            owned_account(state, principal, from_account)?;
            validate_idempotency_key(idempotency_key)?;
            if let Some(tx) = state.book.find_idempotent(principal.id, idempotency_key) {
                return Ok((Vec::new(), receipt_for(state, tx)));
            }
            positive(amount)?;
            if from_account == to_account {
                return Err(BankError::new(
                    ErrorCode::SelfTransfer,
                    "source and destination are the same account",
                ));
            }
            // Internal accounts are not valid destinations and are not
            // acknowledged to exist.
            match state.book.account(to_account) {
                Ok(acc) if acc.kind.is_customer() => {}
                _ => {
                    return Err(BankError::new(
                        ErrorCode::UnknownAccount,
                        format!("no account {to_account}"),
                    ))
                }
            }
            let req = TxRequest {
                kind: TxKind::Transfer,
                postings: vec![
                    Posting::debit(from_account, amount),
                    Posting::credit(to_account, amount),
                ],
                memo: memo.to_string(),
                idempotency_key: Some(idempotency_key.to_string()),
                initiator: principal.id,
            };
            commit_with_receipt(state, &req, now, "transfer_funds")
        })
    }
}

fn commit_with_receipt(
    state: &crate::state::BankState,
    req: &TxRequest,
    now: crate::clock::Millis,
    operation: &str,
) -> Result<(Vec<Event>, Receipt)> {
    match plan_post(state, req, now)? {
        Posted::Replayed(tx) => Ok((Vec::new(), receipt_for(state, &tx))),
        Posted::Committed(tx) => {
            let receipt = receipt_for(state, &tx);
            let audit = Event::audit(req.initiator, operation, Some(tx.tx_id.to_string()));
            Ok((vec![Event::TxCommitted(tx), audit], receipt))
        }
    }
}
