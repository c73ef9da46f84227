//! Durable journal, snapshots, and recovery after a torn write.
//!
//! ```text
//! cargo run --example journal_recovery
//! ```

use std::fs::OpenOptions;
use std::io::Write;

use netbank::auth::HashParams;
use netbank::persistence::{self, JOURNAL_FILE};
use netbank::Bank;

fn open(dir: &std::path::Path) -> netbank::Result<Bank> {
    Bank::builder()
        .data_dir(dir)
        .hash_params(HashParams::Fast)
        .snapshot_every(4)
        .open()
}

fn main() -> netbank::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");

    let bank = open(dir.path())?;
    bank.bootstrap_admin("admin", "admin-password")?;
    let admin = bank.login("admin", "admin-password")?.token;
    for name in ["City Power", "Water Board", "Gas Co"] {
        bank.admin_register_biller(&admin, name)?;
    }
    println!("wrote {} records", bank.last_seq());
    println!("snapshots at {:?}", persistence::list_snapshots(dir.path())?);
    let before = bank.snapshot_state();
    drop(bank);

    // Simulate a crash halfway through appending a record.
    let mut journal = OpenOptions::new()
        .append(true)
        .open(dir.path().join(JOURNAL_FILE))
        .expect("journal");
    journal.write_all(br#"{"kind":"AUDIT","payload":{"#).expect("append");
    drop(journal);

    let bank = open(dir.path())?;
    println!("recovered to seq {}", bank.last_seq());
    assert_eq!(bank.snapshot_state(), before);
    println!("state after recovery matches the state before the crash");
    Ok(())
}
