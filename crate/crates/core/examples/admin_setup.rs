//! Administrator setup: customers, accounts, billers, and status changes.
//!
//! ```text
//! cargo run --example admin_setup
//! ```

use netbank::ledger::{AccountKind, AccountStatus, Money};
use netbank::services::{BillerStatus, NewCustomer};
use netbank::Bank;

fn main() -> netbank::Result<()> {
    let bank = Bank::in_memory();
    bank.bootstrap_admin("admin", "admin-password")?;
    let admin = bank.login("admin", "admin-password")?.token;

    let profile = bank.admin_create_customer(
        &admin,
        &NewCustomer {
            username: "jordan".into(),
            full_name: "Jo Example".into(),
            email: "jo@mail.example".into(),
            phone: "+1 555 0100".into(),
            postal_address: "1 Main Street".into(),
        },
        "jo-initial-password",
    )?;
    println!("created {} ({})", profile.id, profile.username);

    let checking = bank.admin_open_funded_account(&admin, profile.id, AccountKind::CustomerChecking, Money(10_000))?;
    let savings = bank.admin_open_funded_account(&admin, profile.id, AccountKind::CustomerSavings, Money::ZERO)?;
    println!("opened {} with {} and {}", checking.id, checking.balance.to_decimal_string(), savings.id);

    let water = bank.admin_register_biller(&admin, "Water Board")?;
    println!("registered biller {} {}", water.id, water.name);

    let jo = bank.login("jordan", "jo-initial-password")?.token;
    bank.admin_set_account_status(&admin, checking.id, AccountStatus::Frozen)?;
    let blocked = bank.transfer_funds(&jo, checking.id, savings.id, Money(100), "", "k1");
    println!("transfer from a frozen account: {}", blocked.unwrap_err());
    bank.admin_set_account_status(&admin, checking.id, AccountStatus::Active)?;
    bank.transfer_funds(&jo, checking.id, savings.id, Money(100), "", "k1")?;
    println!("unfrozen, transfer went through");

    bank.admin_set_biller_status(&admin, water.id, BillerStatus::Retired)?;
    println!("billers visible to jordan: {:?}", bank.list_active_billers(&jo)?);

    // Customers cannot reach admin operations.
    println!("customer as admin: {}", bank.admin_register_biller(&jo, "Nope").unwrap_err());
    Ok(())
}
