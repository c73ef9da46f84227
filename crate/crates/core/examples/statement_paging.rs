//! Cursor pagination over an account history with amount and time filters.
//!
//! ```text
//! cargo run --example statement_paging
//! ```

use std::sync::Arc;

use netbank::auth::HashParams;
use netbank::clock::ManualClock;
use netbank::ledger::{AccountKind, Money, PostingQuery};
use netbank::services::NewCustomer;
use netbank::Bank;

fn main() -> netbank::Result<()> {
    let clock = Arc::new(ManualClock::new(1_700_000_000_000));
    let bank = Bank::builder().hash_params(HashParams::Fast).clock(clock.clone()).open()?;
    bank.bootstrap_admin("admin", "admin-password")?;
    let admin = bank.login("admin", "admin-password")?.token;
    let owner = bank
        .admin_create_customer(
            &admin,
            &NewCustomer {
                username: "pat".into(),
                full_name: "Pat Example".into(),
                email: "pat@mail.example".into(),
                phone: "+1 555 0100".into(),
                postal_address: "1 Main Street".into(),
            },
            "pat-password",
        )?
        .id;
    let from = bank
        .admin_open_funded_account(&admin, owner, AccountKind::CustomerChecking, Money(1_000_000))?
        .id;
    let to = bank
        .admin_open_funded_account(&admin, owner, AccountKind::CustomerSavings, Money::ZERO)?
        .id;
    let pat = bank.login("pat", "pat-password")?.token;
    for i in 1..=40 {
        clock.advance(60_000);
        bank.transfer_funds(&pat, from, to, Money(i * 250), &format!("saving {i}"), &format!("s{i}"))?;
    }

    let query = PostingQuery {
        min_amount: Some(Money(2_500)),
        ..PostingQuery::with_limit(7)
    };
    let mut cursor = None;
    let mut page_no = 0;
    loop {
        let page = bank.view_statement(&pat, from, &PostingQuery { cursor, ..query.clone() })?;
        page_no += 1;
        let ids: Vec<String> = page.lines.iter().map(|l| l.tx_id.to_string()).collect();
        println!("page {page_no}: {}", ids.join(" "));
        match page.next_cursor {
            Some(next) => cursor = Some(next),
            None => break,
        }
    }
    println!("live balance {}", bank.account_balance(&pat, from)?.to_decimal_string());
    Ok(())
}
