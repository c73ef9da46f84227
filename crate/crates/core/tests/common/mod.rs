//! Shared fixtures and the independent posting-sum oracle.
//!
//! The oracle reads raw journal lines with nothing but `serde_json`, so it
//! shares no code with the ledger it checks.

#![allow(dead_code)]

pub mod twin;

use std::collections::BTreeMap;
use std::sync::Arc;

use netbank::auth::HashParams;
use netbank::clock::ManualClock;
use netbank::ids::{AccountId, BillerId, CustomerId};
use netbank::ledger::{AccountKind, Money};
use netbank::services::NewCustomer;
use netbank::Bank;
use serde_json::Value;

pub const ADMIN_USER: &str = "admin";
pub const ADMIN_PASSWORD: &str = "admin-pass-1";
pub const CUSTOMER_PASSWORD: &str = "customer-pass-1";
pub const T0: u64 = 1_700_000_000_000;

/// One posting as seen by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OraclePosting {
    pub tx_id: String,
    pub timestamp: u64,
    pub kind: String,
    pub account: String,
    /// Credit positive, debit negative.
    pub signed: i64,
    pub memo: String,
}

#[derive(Debug, Default, Clone)]
pub struct Oracle {
    pub records: usize,
    pub transactions: Vec<Value>,
    pub postings: Vec<OraclePosting>,
    pub balances: BTreeMap<String, i128>,
    pub account_kinds: BTreeMap<String, String>,
}

impl Oracle {
    /// Rebuilds balances from genesis by summing every committed posting.
    pub fn from_journal(bytes: &[u8]) -> Oracle {
        let mut o = Oracle::default();
        for line in bytes.split(|b| *b == b'\n').filter(|l| !l.is_empty()) {
            let rec: Value = serde_json::from_slice(line).expect("journal line is JSON");
            o.records += 1;
            let payload = &rec["payload"];
            match rec["kind"].as_str().unwrap() {
                "ACCOUNT_OPENED" => {
                    let id = payload["account_id"].as_str().unwrap().to_string();
                    o.balances.entry(id.clone()).or_insert(0);
                    o.account_kinds
                        .insert(id, payload["kind"].as_str().unwrap().to_string());
                }
                "TX_COMMITTED" => {
                    let tx_id = payload["tx_id"].as_str().unwrap().to_string();
                    for p in payload["postings"].as_array().unwrap() {
                        let amount = p["amount_minor"].as_i64().unwrap();
                        let signed = match p["direction"].as_str().unwrap() {
                            "CREDIT" => amount,
                            "DEBIT" => -amount,
                            other => panic!("unknown direction {other}"),
                        };
                        let account = p["account_id"].as_str().unwrap().to_string();
                        *o.balances.entry(account.clone()).or_insert(0) += signed as i128;
                        o.postings.push(OraclePosting {
                            tx_id: tx_id.clone(),
                            timestamp: payload["timestamp"].as_u64().unwrap(),
                            kind: payload["kind"].as_str().unwrap().to_string(),
                            account,
                            signed,
                            memo: payload["memo"].as_str().unwrap_or_default().to_string(),
                        });
                    }
                    o.transactions.push(payload.clone());
                }
                _ => {}
            }
        }
        o
    }

    pub fn balance(&self, account: AccountId) -> i128 {
        self.balances.get(&account.to_string()).copied().unwrap_or(0)
    }

    pub fn total(&self) -> i128 {
        self.balances.values().sum()
    }

    pub fn records_of_kind(bytes: &[u8], kind: &str) -> usize {
        bytes
            .split(|b| *b == b'\n')
            .filter(|l| !l.is_empty())
            .filter(|l| {
                let v: Value = serde_json::from_slice(l).unwrap();
                v["kind"] == kind
            })
            .count()
    }

    /// Transactions whose debits and credits differ.
    pub fn unbalanced(&self) -> usize {
        self.transactions
            .iter()
            .filter(|tx| {
                let (mut d, mut c) = (0i128, 0i128);
                for p in tx["postings"].as_array().unwrap() {
                    let a = p["amount_minor"].as_i64().unwrap() as i128;
                    if p["direction"] == "DEBIT" {
                        d += a
                    } else {
                        c += a
                    }
                }
                d != c
            })
            .count()
    }

    /// Replays transactions one at a time and reports the first customer
    /// account that ever went negative.
    pub fn first_customer_overdraft(&self) -> Option<(String, String)> {
        let mut running: BTreeMap<String, i128> = BTreeMap::new();
        for tx in &self.transactions {
            for p in tx["postings"].as_array().unwrap() {
                let a = p["amount_minor"].as_i64().unwrap() as i128;
                let acct = p["account_id"].as_str().unwrap().to_string();
                let e = running.entry(acct).or_insert(0);
                *e += if p["direction"] == "DEBIT" { -a } else { a };
            }
            for (acct, bal) in &running {
                let customer = self
                    .account_kinds
                    .get(acct)
                    .is_some_and(|k| k.starts_with("CUSTOMER_"));
                if customer && *bal < 0 {
                    return Some((tx["tx_id"].as_str().unwrap().to_string(), acct.clone()));
                }
            }
        }
        None
    }

    /// All postings on one account, in journal order.
    pub fn postings_for(&self, account: AccountId) -> Vec<OraclePosting> {
        let id = account.to_string();
        self.postings.iter().filter(|p| p.account == id).cloned().collect()
    }
}

pub fn manual_clock() -> Arc<ManualClock> {
    Arc::new(ManualClock::new(T0))
}

pub fn fast_bank() -> Bank {
    Bank::builder().hash_params(HashParams::Fast).open().unwrap()
}

pub fn fast_bank_with_clock(clock: Arc<ManualClock>) -> Bank {
    Bank::builder()
        .hash_params(HashParams::Fast)
        .clock(clock)
        .open()
        .unwrap()
}

pub fn admin_token(bank: &Bank) -> String {
    if !bank.has_admin() {
        bank.bootstrap_admin(ADMIN_USER, ADMIN_PASSWORD).unwrap();
    }
    bank.login(ADMIN_USER, ADMIN_PASSWORD).unwrap().token
}

pub fn new_customer_record(username: &str) -> NewCustomer {
    NewCustomer {
        username: username.to_string(),
        full_name: format!("{username} example"),
        email: format!("{username}@mail.example"),
        phone: "+1 555 0100".to_string(),
        postal_address: "1 Main Street".to_string(),
    }
}

/// Creates a customer and returns its id and a fresh session token.
pub fn customer(bank: &Bank, admin: &str, username: &str) -> (CustomerId, String) {
    let profile = bank
        .admin_create_customer(admin, &new_customer_record(username), CUSTOMER_PASSWORD)
        .unwrap();
    let token = bank.login(username, CUSTOMER_PASSWORD).unwrap().token;
    (profile.id, token)
}

pub fn account(bank: &Bank, admin: &str, owner: CustomerId, deposit: i64) -> AccountId {
    bank.admin_open_funded_account(admin, owner, AccountKind::CustomerChecking, Money(deposit))
        .unwrap()
        .id
}

pub fn biller(bank: &Bank, admin: &str, name: &str) -> BillerId {
    bank.admin_register_biller(admin, name).unwrap().id
}

/// A small populated bank: alice with a funded checking account, bob with
/// an empty one, one biller.
pub struct World {
    pub bank: Bank,
    pub clock: Arc<ManualClock>,
    pub admin: String,
    pub alice: String,
    pub alice_id: CustomerId,
    pub bob: String,
    pub bob_id: CustomerId,
    pub alice_acct: AccountId,
    pub bob_acct: AccountId,
    pub biller: BillerId,
}

impl World {
    pub fn new(alice_deposit: i64) -> World {
        let clock = manual_clock();
        let bank = fast_bank_with_clock(clock.clone());
        Self::populate(bank, clock, alice_deposit)
    }

    pub fn populate(bank: Bank, clock: Arc<ManualClock>, alice_deposit: i64) -> World {
        let admin = admin_token(&bank);
        let (alice_id, alice) = customer(&bank, &admin, "alice");
        let (bob_id, bob) = customer(&bank, &admin, "bob");
        let alice_acct = account(&bank, &admin, alice_id, alice_deposit);
        let bob_acct = account(&bank, &admin, bob_id, 0);
        let biller = biller(&bank, &admin, "City Electric");
        World {
            bank,
            clock,
            admin,
            alice,
            alice_id,
            bob,
            bob_id,
            alice_acct,
            bob_acct,
            biller,
        }
    }

    pub fn oracle(&self) -> Oracle {
        Oracle::from_journal(&self.bank.journal_bytes().unwrap())
    }
}

/// Bitwise CRC-32 (IEEE, reflected), kept separate from the library's.
pub fn crc32_ieee(bytes: &[u8]) -> u32 {
    let mut crc = !0u32;
    for &b in bytes {
        crc ^= b as u32;
        for _ in 0..8 {
            crc = if crc & 1 != 0 { (crc >> 1) ^ 0xEDB8_8320 } else { crc >> 1 };
        }
    }
    !crc
}

/// Checks every journal line's `crc` field against the bytes before it.
pub fn crc_mismatches(bytes: &[u8]) -> Vec<usize> {
    let suffix_len = r#","crc":"00000000"}"#.len();
    bytes
        .split(|b| *b == b'\n')
        .filter(|l| !l.is_empty())
        .enumerate()
        .filter(|(_, line)| {
            let (head, tail) = line.split_at(line.len() - suffix_len);
            let stated = std::str::from_utf8(&tail[8..16]).unwrap();
            format!("{:08x}", crc32_ieee(head)) != stated
        })
        .map(|(i, _)| i + 1)
        .collect()
}
