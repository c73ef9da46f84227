//! Customer use cases through the service layer: bills, transfers,
//! cheques, statements, and profile changes.
//!
//! ```text
//! cargo run --example customer_flows
//! ```

use netbank::ids::AccountId;
use netbank::ledger::{AccountKind, Money, PostingQuery};
use netbank::services::{ChequeRequestStatus, ContactUpdate, NewCustomer};
use netbank::Bank;

fn new_customer(username: &str) -> NewCustomer {
    NewCustomer {
        username: username.into(),
        full_name: format!("{username} example"),
        email: format!("{username}@mail.example"),
        phone: "+1 555 0100".into(),
        postal_address: "1 Main Street".into(),
    }
}

fn main() -> netbank::Result<()> {
    let bank = Bank::in_memory();
    bank.bootstrap_admin("admin", "admin-password")?;
    let admin = bank.login("admin", "admin-password")?.token;
    let alice_id = bank.admin_create_customer(&admin, &new_customer("alice"), "alice-password")?.id;
    let bob_id = bank.admin_create_customer(&admin, &new_customer("bob"), "bob-password")?.id;
    let alice_acct = bank
        .admin_open_funded_account(&admin, alice_id, AccountKind::CustomerChecking, Money(250_000))?
        .id;
    let bob_acct: AccountId = bank
        .admin_open_funded_account(&admin, bob_id, AccountKind::CustomerSavings, Money::ZERO)?
        .id;
    let power = bank.admin_register_biller(&admin, "City Power")?.id;

    let alice = bank.login("alice", "alice-password")?.token;

    let bill = bank.pay_bill(&alice, alice_acct, power, "INV-2024-07", Money(8_990), "bill-07")?;
    println!("paid bill: {} {} to {}", bill.tx_id, bill.amount.to_decimal_string(), bill.counterparty);

    let transfer = bank.transfer_funds(&alice, alice_acct, bob_acct, Money(40_000), "rent", "rent-07")?;
    println!("transfer: {} {} to {}", transfer.tx_id, transfer.amount.to_decimal_string(), transfer.counterparty);

    let request = bank.request_cheque_book(&alice, alice_acct, 50)?;
    let decided = bank.admin_decide_cheque_request(&admin, request.id, ChequeRequestStatus::Approved)?;
    println!("cheque book {} is {:?}", decided.id, decided.status);
    let (stop, created) = bank.stop_cheque(&alice, alice_acct, "000012", "lost")?;
    println!("stop order {} (new: {created})", stop.id);

    let page = bank.view_statement(&alice, alice_acct, &PostingQuery::with_limit(10))?;
    for line in &page.lines {
        println!(
            "{}  {:?}  {:>10}  balance {:>10}  {}",
            line.tx_id,
            line.kind,
            Money(line.amount_minor).to_decimal_string(),
            Money(line.running_balance_minor).to_decimal_string(),
            line.memo
        );
    }

    bank.update_contact(
        &alice,
        &ContactUpdate {
            email: None,
            phone: Some("+1 555 0199".into()),
            postal_address: None,
        },
    )?;
    bank.change_password(&alice, "alice-password", "a-better-password")?;
    println!("profile now {:?}", bank.profile(&alice)?);
    Ok(())
}
