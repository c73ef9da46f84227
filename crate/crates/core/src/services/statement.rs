use super::{readable_account, Biller, BillerStatus, StatementLine, StatementPage};
use crate::auth::Role;
use crate::bank::Bank;
use crate::error::Result;
use crate::ids::{AccountId, PrincipalId};
use crate::ledger::{Account, Money, Owner, PostingQuery};

impl Bank {
    /// A page of statement lines for an account the caller may read, with
    /// the running balance after each posting.
    pub fn view_statement(
        &self,
        token: &str,
        account: AccountId,
        query: &PostingQuery,
    ) -> Result<StatementPage> {
        let principal = self.authenticate(token)?;
        self.read(|state| {
            readable_account(state, principal, account)?;
            let page = state.book.list_postings(account, query)?;
            Ok(StatementPage {
                account_id: account,
                lines: page
                    .items
                    .iter()
                    .map(|v| StatementLine {
                        tx_id: v.tx_id,
                        timestamp: v.timestamp,
                        kind: v.kind,
                        amount_minor: v.signed_amount().minor(),
                        running_balance_minor: v.balance_after.minor(),
                        memo: v.memo.clone(),
                    })
                    .collect(),
                next_cursor: page.next_cursor,
            })
        })
    }

    pub fn account_balance(&self, token: &str, account: AccountId) -> Result<Money> {
        let principal = self.authenticate(token)?;
        self.read(|state| readable_account(state, principal, account).map(|a| a.balance))
    }

    /// The caller's own accounts; administrators see every account.
    pub fn list_accounts(&self, token: &str) -> Result<Vec<Account>> {
        let principal = self.authenticate(token)?;
        Ok(self.read(|state| {
            state
                .book
                .accounts()
                .filter(|a| match (principal.role, principal.id, a.owner) {
                    (Role::Admin, _, _) => true,
                    (_, PrincipalId::Customer(me), Owner::Customer(owner)) => me == owner,
                    _ => false,
                })
                .cloned()
                .collect()
        }))
    }

    pub fn list_active_billers(&self, token: &str) -> Result<Vec<Biller>> {
        self.authenticate(token)?;
        Ok(self.read(|state| {
            state
                .billers
                .values()
                .filter(|b| b.status == BillerStatus::Active)
                .cloned()
                .collect()
        }))
    }
}
