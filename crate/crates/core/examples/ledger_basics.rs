//! Double-entry postings straight against the ledger.
//!
//! ```text
//! cargo run --example ledger_basics
//! ```

use netbank::ledger::{AccountKind, Money, Owner, Posting, TxKind, TxRequest};
use netbank::services::NewCustomer;
use netbank::Bank;

fn main() -> netbank::Result<()> {
    let bank = Bank::in_memory();
    bank.bootstrap_admin("admin", "admin-password")?;
    let admin = bank.login("admin", "admin-password")?.token;
    let owner = bank
        .admin_create_customer(
            &admin,
            &NewCustomer {
                username: "ledger_demo".into(),
                full_name: "Ledger Demo".into(),
                email: "demo@mail.example".into(),
                phone: "+1 555 0100".into(),
                postal_address: "1 Main Street".into(),
            },
            "customer-password",
        )?
        .id;

    let vault = bank.open_account(Owner::Internal, AccountKind::InternalSettlement)?;
    let checking = bank.open_account(Owner::Customer(owner), AccountKind::CustomerChecking)?;
    let savings = bank.open_account(Owner::Customer(owner), AccountKind::CustomerSavings)?;

    let post = |kind, postings, key: Option<&str>| {
        bank.post_transaction(TxRequest {
            kind,
            postings,
            memo: String::new(),
            idempotency_key: key.map(str::to_string),
            initiator: Bank::system_principal(),
        })
    };

    post(
        TxKind::InitialFunding,
        vec![Posting::debit(vault, Money(50_000)), Posting::credit(checking, Money(50_000))],
        None,
    )?;
    let posted = post(
        TxKind::Transfer,
        vec![Posting::debit(checking, Money(12_500)), Posting::credit(savings, Money(12_500))],
        Some("move-1"),
    )?;
    println!("posted {posted:?}");

    // Same key again: the original transaction comes back, nothing is posted.
    let again = post(
        TxKind::Transfer,
        vec![Posting::debit(checking, Money(12_500)), Posting::credit(savings, Money(12_500))],
        Some("move-1"),
    )?;
    println!("replayed {again:?}");

    let unbalanced = post(
        TxKind::Transfer,
        vec![Posting::debit(checking, Money(10)), Posting::credit(savings, Money(9))],
        None,
    );
    println!("unbalanced: {}", unbalanced.unwrap_err());
    let overdraft = post(
        TxKind::Transfer,
        vec![Posting::debit(savings, Money(1_000_000)), Posting::credit(checking, Money(1_000_000))],
        None,
    );
    println!("overdraft: {}", overdraft.unwrap_err());

    let mut total = 0i64;
    for account in bank.accounts() {
        println!("{}  {:?}  {}", account.id, account.kind, account.balance.to_decimal_string());
        total += account.balance.minor();
    }
    println!("sum of all balances: {total}");
    Ok(())
}
