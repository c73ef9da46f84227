//! Sessions, idle expiry, and lockout after repeated bad passwords.
//!
//! ```text
//! cargo run --example auth_lockout
//! ```

use std::sync::Arc;

use netbank::auth::HashParams;
use netbank::clock::ManualClock;
use netbank::Bank;

fn main() -> netbank::Result<()> {
    let clock = Arc::new(ManualClock::new(1_700_000_000_000));
    let bank = Bank::builder()
        .hash_params(HashParams::Fast)
        .clock(clock.clone())
        .open()?;
    bank.bootstrap_admin("admin", "admin-password")?;

    let session = bank.login("admin", "admin-password")?;
    println!("token {}… idle ttl {}s", &session.token[..8], session.idle_ttl_s);

    clock.advance(session.idle_ttl_s * 1000 + 1);
    println!("after idling: {}", bank.authenticate(&session.token).unwrap_err());

    // Unknown users and wrong passwords look the same.
    println!("unknown user: {}", bank.login("nobody", "guess").unwrap_err());
    println!("wrong password: {}", bank.login("admin", "guess").unwrap_err());

    for i in 2..=5 {
        let err = bank.login("admin", "guess").unwrap_err();
        println!("failure {i}: {}", err.code);
    }
    println!("correct password now: {}", bank.login("admin", "admin-password").unwrap_err());

    clock.advance(bank.auth_policy().lockout_window_s * 1000);
    bank.login("admin", "admin-password")?;
    println!("window passed, login works again");
    Ok(())
}
