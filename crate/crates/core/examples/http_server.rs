//! Embedded HTTP server and a few raw JSON calls against it.
//!
//! ```text
//! cargo run --example http_server
//! ```

use std::sync::Arc;

use netbank::api;
use netbank::auth::HashParams;
use netbank::ledger::{AccountKind, Money};
use netbank::services::NewCustomer;
use netbank::Bank;
use serde_json::{json, Value};

fn call(http: &reqwest::blocking::Client, method: reqwest::Method, url: String, token: Option<&str>, body: Option<Value>) -> (u16, Value) {
    let mut req = http.request(method, url);
    if let Some(t) = token {
        req = req.bearer_auth(t);
    }
    if let Some(b) = body {
        req = req.header("content-type", "application/json").body(b.to_string());
    }
    let resp = req.send().expect("request");
    let status = resp.status().as_u16();
    (status, serde_json::from_slice(&resp.bytes().expect("body")).expect("json"))
}

fn main() -> netbank::Result<()> {
    let bank = Bank::builder().hash_params(HashParams::Fast).open()?;
    bank.bootstrap_admin("admin", "admin-password")?;
    let admin = bank.login("admin", "admin-password")?.token;
    let customer = bank
        .admin_create_customer(
            &admin,
            &NewCustomer {
                username: "sam".into(),
                full_name: "Sam Example".into(),
                email: "sam@mail.example".into(),
                phone: "+1 555 0100".into(),
                postal_address: "1 Main Street".into(),
            },
            "sam-password",
        )?
        .id;
    bank.admin_open_funded_account(&admin, customer, AccountKind::CustomerChecking, Money(30_000))?;
    bank.admin_open_funded_account(&admin, customer, AccountKind::CustomerSavings, Money::ZERO)?;

    let server = api::start(Arc::new(bank), "127.0.0.1:0".parse().unwrap())?;
    let base = format!("{}{}", server.url(), api::API_PREFIX);
    println!("serving on {}", server.url());
    let http = reqwest::blocking::Client::new();

    let (_, health) = call(&http, reqwest::Method::GET, format!("{}/healthz", server.url()), None, None);
    println!("GET /healthz -> {health}");

    let (status, session) = call(
        &http,
        reqwest::Method::POST,
        format!("{base}/session"),
        None,
        Some(json!({"username": "sam", "password": "sam-password"})),
    );
    println!("POST /session -> {status}");
    let token = session["token"].as_str().unwrap().to_string();

    let (status, accounts) = call(&http, reqwest::Method::GET, format!("{base}/accounts"), Some(&token), None);
    println!("GET /accounts -> {status} {accounts}");

    let transfer = json!({
        "from_account": "ACC-000002",
        "to_account": "ACC-000003",
        "amount_minor": 7_500,
        "memo": "to savings",
        "idempotency_key": "example-1",
    });
    for attempt in 1..=2 {
        let (status, receipt) = call(&http, reqwest::Method::POST, format!("{base}/transfers"), Some(&token), Some(transfer.clone()));
        println!("POST /transfers (attempt {attempt}) -> {status} {receipt}");
    }

    let (status, err) = call(&http, reqwest::Method::POST, format!("{base}/transfers"), None, Some(transfer));
    println!("POST /transfers without a token -> {status} {err}");

    server.shutdown();
    Ok(())
}
