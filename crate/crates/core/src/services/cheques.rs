use super::{owned_account, ChequeBookRequest, ChequeRequestStatus, StopChequeOrder, StopOrderStatus, CHEQUE_BOOK_LEAVES};
use crate::bank::Bank;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::{AccountId, ChequeRequestId};
use crate::ledger::{AccountStatus, MEMO_MAX_CHARS};
use crate::state::Event;

fn valid_cheque_number(number: &str) -> bool {
    number.len() == 6 && number.bytes().all(|b| b.is_ascii_digit())
}

impl Bank {
    /// Files a PENDING cheque-book request. No money moves.
    pub fn request_cheque_book(
        &self,
        token: &str,
        account: AccountId,
        leaves: u32,
    ) -> Result<ChequeBookRequest> {
        let principal = self.authenticate(token)?;
        self.mutate(|state, now| {
            let acc = owned_account(state, principal, account)?;
            if !CHEQUE_BOOK_LEAVES.contains(&leaves) {
                return Err(BankError::validation("leaves must be 25, 50, or 100"));
            }
            if acc.status != AccountStatus::Active {
                return Err(BankError::new(
                    ErrorCode::Frozen,
                    format!("account {account} is not active"),
                ));
            }
            let request = ChequeBookRequest {
                id: state.next_cheque_request_id(),
                account_id: account,
                leaves,
                status: ChequeRequestStatus::Pending,
                requested_ts: now,
                decided_ts: None,
            };
            let audit = Event::audit(principal.id, "request_cheque_book", Some(request.id.to_string()));
            Ok((vec![Event::ChequeRequest(request.clone()), audit], request))
        })
    }

    /// Places a stop order on a cheque number. Repeating the call for a
    /// number that already has an ACTIVE order returns that order unchanged;
    /// the flag is `true` only when a new order was created.
    pub fn stop_cheque(
        &self,
        token: &str,
        account: AccountId,
        cheque_number: &str,
        reason: &str,
    ) -> Result<(StopChequeOrder, bool)> {
        let principal = self.authenticate(token)?;
        self.mutate(|state, _| {
            owned_account(state, principal, account)?;
            if !valid_cheque_number(cheque_number) {
                return Err(BankError::validation("cheque number must be exactly 6 digits"));
            }
            if reason.chars().count() > MEMO_MAX_CHARS {
                return Err(BankError::validation(format!(
                    "reason exceeds {MEMO_MAX_CHARS} characters"
                )));
            }
            if let Some(existing) = state.stop_orders.values().find(|o| {
                o.account_id == account
                    && o.cheque_number == cheque_number
                    && o.status == StopOrderStatus::Active
            }) {
                return Ok((Vec::new(), (existing.clone(), false)));
            }
            let order = StopChequeOrder {
                id: state.next_stop_order_id(),
                account_id: account,
                cheque_number: cheque_number.to_string(),
                reason: reason.to_string(),
                status: StopOrderStatus::Active,
            };
            let audit = Event::audit(principal.id, "stop_cheque", Some(order.id.to_string()));
            Ok((vec![Event::StopOrder(order.clone()), audit], (order, true)))
        })
    }

    pub fn cheque_request(&self, id: ChequeRequestId) -> Option<ChequeBookRequest> {
        self.read(|s| s.cheque_requests.get(&id).cloned())
    }

    /// Approves or rejects a PENDING request; each request is decided once.
    pub fn admin_decide_cheque_request(
        &self,
        token: &str,
        request_id: ChequeRequestId,
        decision: ChequeRequestStatus,
    ) -> Result<ChequeBookRequest> {
        let principal = self.require_admin(token)?;
        if decision == ChequeRequestStatus::Pending {
            return Err(BankError::validation("decision must be APPROVED or REJECTED"));
        }
        self.mutate(|state, now| {
            let current = state.cheque_requests.get(&request_id).ok_or_else(|| {
                BankError::new(ErrorCode::UnknownRequest, format!("no cheque request {request_id}"))
            })?;
            if current.status != ChequeRequestStatus::Pending {
                return Err(BankError::new(
                    ErrorCode::AlreadyDecided,
                    format!("{request_id} has already been decided"),
                ));
            }
            let mut decided = current.clone();
            decided.status = decision;
            decided.decided_ts = Some(now);
            Ok((
                vec![
                    Event::ChequeDecision {
                        request_id,
                        status: decision,
                        decided_ts: now,
                    },
                    Event::audit(principal.id, "decide_cheque_request", Some(request_id.to_string())),
                ],
                decided,
            ))
        })
    }
}
