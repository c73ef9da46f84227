mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use common::*;
use netbank::api::{self, render, render_error, Rendered};
use netbank::auth::HashParams;
use netbank::ids::{AccountId, BillerId};
use netbank::ledger::{Money, PostingQuery};
use netbank::Bank;
use proptest::prelude::*;
use rand::SeedableRng;
use serde_json::{json, Value};
use tower::ServiceExt;

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread()
        .worker_threads(2)
        .enable_all()
        .build()
        .unwrap()
}

fn call(rt: &tokio::runtime::Runtime, app: &Router, method: &str, path: &str, token: Option<&str>, body: Option<&[u8]>) -> Rendered {
    let mut req = Request::builder().method(method).uri(path);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = req
        .header("content-type", "application/json")
        .body(Body::from(body.map(<[u8]>::to_vec).unwrap_or_default()))
        .unwrap();
    rt.block_on(async {
        let resp = app.clone().oneshot(req).await.unwrap();
        let status = resp.status().as_u16();
        let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
        Rendered {
            status,
            body: bytes.to_vec(),
        }
    })
}

fn json_body(v: Value) -> Vec<u8> {
    serde_json::to_vec(&v).unwrap()
}

/// Deterministic bank: fixed clock and seeded RNG, so two of them built the
/// same way issue identical tokens and ids.
fn twin(seed: u64) -> World {
    let clock = manual_clock();
    let bank = Bank::builder()
        .hash_params(HashParams::Fast)
        .clock(clock.clone())
        .rng(Box::new(rand_chacha::ChaCha20Rng::seed_from_u64(seed)))
        .open()
        .unwrap();
    World::populate(bank, clock, 50_000)
}

#[test]
fn unauthenticated_transfer_is_401() {
    let rt = runtime();
    let bank = Arc::new(fast_bank());
    let app = api::router(bank);
    let r = call(
        &rt,
        &app,
        "POST",
        "/api/v1/transfers",
        None,
        Some(&json_body(json!({"from_account":"ACC-000002","to_account":"ACC-000003","amount_minor":1,"idempotency_key":"k"}))),
    );
    assert_eq!(r.status, 401);
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!(v["error"]["code"], "UNAUTHENTICATED");
    assert!(v["error"]["message"].is_string());
    assert_eq!(v.as_object().unwrap().len(), 1);
}

#[test]
fn healthz_on_fresh_bank() {
    let rt = runtime();
    let app = api::router(Arc::new(fast_bank()));
    let r = call(&rt, &app, "GET", "/healthz", None, None);
    assert_eq!(r.status, 200);
    assert_eq!(r.body, br#"{"status":"ok","last_seq":0}"#);
}

#[test]
fn routing_errors() {
    let rt = runtime();
    let app = api::router(Arc::new(fast_bank()));
    let r = call(&rt, &app, "GET", "/api/v1/nowhere", None, None);
    assert_eq!(r.status, 404);
    assert!(String::from_utf8_lossy(&r.body).contains("NOT_FOUND"));
    let r = call(&rt, &app, "GET", "/api/v1/transfers", None, None);
    assert_eq!(r.status, 405);
    assert!(String::from_utf8_lossy(&r.body).contains("METHOD_NOT_ALLOWED"));
    let r = call(&rt, &app, "DELETE", "/healthz", None, None);
    assert_eq!(r.status, 405);
}

#[test]
fn status_mapping_over_http() {
    let rt = runtime();
    let w = twin(1);
    let (alice, bob, admin) = (w.alice.clone(), w.bob.clone(), w.admin.clone());
    let bank = Arc::new(w.bank);
    let app = api::router(bank.clone());
    let post = |path: &str, token: &str, body: Value| {
        call(&rt, &app, "POST", path, Some(token), Some(&json_body(body)))
    };
    let transfer = |amount: i64, key: &str| {
        json!({"from_account":"ACC-000002","to_account":"ACC-000003","amount_minor":amount,"idempotency_key":key})
    };

    assert_eq!(post("/api/v1/transfers", &alice, transfer(50_001, "a")).status, 409);
    assert_eq!(post("/api/v1/transfers", &bob, transfer(1, "b")).status, 403);
    assert_eq!(post("/api/v1/transfers", &alice, transfer(0, "c")).status, 422);
    let ok = post("/api/v1/transfers", &alice, transfer(100, "d"));
    assert_eq!(ok.status, 201);

    let r = call(&rt, &app, "POST", "/api/v1/transfers", Some(&alice), Some(b"{not json"));
    assert_eq!(r.status, 400);
    assert!(String::from_utf8_lossy(&r.body).contains("MALFORMED_JSON"));
    let r = post("/api/v1/transfers", &alice, json!({"from_account":"ACC-000002","amount_minor":"12"}));
    assert_eq!(r.status, 422);
    let r = post(
        "/api/v1/transfers",
        &alice,
        json!({"from_account":"ACCOUNT-2","to_account":"ACC-000003","amount_minor":1,"idempotency_key":"x"}),
    );
    assert_eq!(r.status, 422);

    let r = call(&rt, &app, "GET", "/api/v1/accounts/ACC-000099/balance", Some(&admin), None);
    assert_eq!(r.status, 404);
    let r = post("/api/v1/admin/billers", &alice, json!({"name":"X"}));
    assert_eq!(r.status, 403);
    let r = post("/api/v1/session", "", json!({"username":"alice","password":"nope-nope"}));
    assert_eq!(r.status, 401);
    let r = call(&rt, &app, "GET", "/api/v1/accounts/ACC-000002/transactions?limit=0", Some(&alice), None);
    assert_eq!(r.status, 422);
    let r = call(&rt, &app, "GET", "/api/v1/accounts/ACC-000002/transactions?limit=abc", Some(&alice), None);
    assert_eq!(r.status, 422);
    let r = post("/api/v1/cheques/book-requests", &alice, json!({"account_id":"ACC-000002","leaves":25}));
    assert_eq!(r.status, 201);
    let r = post("/api/v1/admin/cheques/book-requests/CHB-000001/decision", &admin, json!({"decision":"APPROVED"}));
    assert_eq!(r.status, 200);
    let r = post("/api/v1/admin/cheques/book-requests/CHB-000001/decision", &admin, json!({"decision":"REJECTED"}));
    assert_eq!(r.status, 409);
    let r = post("/api/v1/admin/cheques/book-requests/CHB-000009/decision", &admin, json!({"decision":"REJECTED"}));
    assert_eq!(r.status, 404);
    let r = post("/api/v1/cheques/stop-orders", &alice, json!({"account_id":"ACC-000002","cheque_number":"000123"}));
    assert_eq!(r.status, 201);
    let r = post("/api/v1/cheques/stop-orders", &alice, json!({"account_id":"ACC-000002","cheque_number":"000123"}));
    assert_eq!(r.status, 200);
    let r = post("/api/v1/admin/customers", &admin, json!({
        "username":"alice","full_name":"A","email":"a@b.example","phone":"1","postal_address":"x","initial_password":"longenough"
    }));
    assert_eq!(r.status, 409);

    for _ in 0..5 {
        post("/api/v1/session", "", json!({"username":"bob","password":"wrong-wrong"}));
    }
    let r = post("/api/v1/session", "", json!({"username":"bob","password":CUSTOMER_PASSWORD}));
    assert_eq!(r.status, 423);
    assert!(String::from_utf8_lossy(&r.body).contains("LOCKED_OUT"));

    let r = call(&rt, &app, "DELETE", "/api/v1/session", Some(&alice), None);
    assert_eq!(r.status, 200);
    let r = call(&rt, &app, "GET", "/api/v1/accounts", Some(&alice), None);
    assert_eq!(r.status, 401);
    let r = call(&rt, &app, "GET", "/healthz", None, None);
    assert_eq!(
        serde_json::from_slice::<Value>(&r.body).unwrap()["last_seq"],
        bank.last_seq()
    );
}

#[test]
fn valid_transfer_receipt_matches_service_call() {
    let rt = runtime();
    let http = twin(7);
    let direct = twin(7);
    assert_eq!(http.alice, direct.alice, "twins issue identical tokens");
    let token = http.alice.clone();
    let app = api::router(Arc::new(http.bank));
    let r = call(
        &rt,
        &app,
        "POST",
        "/api/v1/transfers",
        Some(&token),
        Some(&json_body(json!({"from_account":"ACC-000002","to_account":"ACC-000003","amount_minor":1234,"memo":"hi","idempotency_key":"k1"}))),
    );
    let receipt = direct
        .bank
        .transfer_funds(&direct.alice, direct.alice_acct, direct.bob_acct, Money(1234), "hi", "k1")
        .unwrap();
    assert_eq!(r.status, 201);
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!(v["tx_id"], receipt.tx_id.to_string());
    assert_eq!(r.body, serde_json::to_vec(&receipt).unwrap());
}

#[test]
fn idempotent_http_replays_return_the_same_body() {
    let rt = runtime();
    let w = twin(3);
    let token = w.alice.clone();
    let bank = Arc::new(w.bank);
    let app = api::router(bank.clone());
    let body = json_body(json!({"from_account":"ACC-000002","biller_id":"BIL-0001","reference":"ELEC-77","amount_minor":500,"idempotency_key":"same"}));
    let first = call(&rt, &app, "POST", "/api/v1/payments/bill", Some(&token), Some(&body));
    assert_eq!(first.status, 201);
    for _ in 0..5 {
        assert_eq!(call(&rt, &app, "POST", "/api/v1/payments/bill", Some(&token), Some(&body)), first);
    }
    assert_eq!(bank.transaction_count(), 2);
}

#[derive(Debug, Clone)]
enum Req {
    Transfer { from: u64, to: u64, amount: i64, key: u8, who: u8 },
    Bill { from: u64, biller: u64, amount: i64, key: u8, who: u8 },
    Balance { acct: u64, who: u8 },
    Statement { acct: u64, limit: usize, min: Option<i64>, who: u8 },
    Accounts { who: u8 },
    Cheque { acct: u64, leaves: u32, who: u8 },
    Stop { acct: u64, number: u32, who: u8 },
    Freeze { acct: u64, frozen: bool, who: u8 },
}

fn req() -> impl Strategy<Value = Req> {
    let acct = 1u64..6;
    let who = 0u8..4;
    prop_oneof![
        4 => (acct.clone(), acct.clone(), -10i64..30_000, 0u8..4, who.clone())
            .prop_map(|(from, to, amount, key, who)| Req::Transfer { from, to, amount, key, who }),
        2 => (acct.clone(), 0u64..3, -10i64..30_000, 0u8..4, who.clone())
            .prop_map(|(from, biller, amount, key, who)| Req::Bill { from, biller, amount, key, who }),
        2 => (acct.clone(), who.clone()).prop_map(|(acct, who)| Req::Balance { acct, who }),
        2 => (acct.clone(), 0usize..12, prop::option::of(0i64..20_000), who.clone())
            .prop_map(|(acct, limit, min, who)| Req::Statement { acct, limit, min, who }),
        1 => who.clone().prop_map(|who| Req::Accounts { who }),
        1 => (acct.clone(), prop::sample::select(vec![25u32, 30, 50, 100]), who.clone())
            .prop_map(|(acct, leaves, who)| Req::Cheque { acct, leaves, who }),
        1 => (acct.clone(), 0u32..3, who.clone()).prop_map(|(acct, number, who)| Req::Stop { acct, number, who }),
        1 => (acct, any::<bool>(), who).prop_map(|(acct, frozen, who)| Req::Freeze { acct, frozen, who }),
    ]
}

fn token_for(w: &World, who: u8) -> String {
    match who {
        0 => w.alice.clone(),
        1 => w.bob.clone(),
        2 => w.admin.clone(),
        _ => "0".repeat(64),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every request rendered over HTTP equals the direct service result
    /// rendered by the same pure function.
    #[test]
    fn http_and_service_paths_agree(reqs in prop::collection::vec(req(), 1..25)) {
        let rt = runtime();
        let http = twin(11);
        let direct = twin(11);
        let tokens: Vec<String> = (0..4).map(|i| token_for(&http, i)).collect();
        let app = api::router(Arc::new(http.bank));
        let b = &direct.bank;
        for r in reqs {
            let (got, want) = match r {
                Req::Transfer { from, to, amount, key, who } => {
                    let key = format!("key-{key}");
                    let g = call(&rt, &app, "POST", "/api/v1/transfers", Some(&tokens[who as usize]), Some(&json_body(json!({
                        "from_account": AccountId(from).to_string(), "to_account": AccountId(to).to_string(),
                        "amount_minor": amount, "memo": "m", "idempotency_key": key
                    }))));
                    (g, render(b.transfer_funds(&tokens[who as usize], AccountId(from), AccountId(to), Money(amount), "m", &key), 201))
                }
                Req::Bill { from, biller, amount, key, who } => {
                    let key = format!("bill-{key}");
                    let g = call(&rt, &app, "POST", "/api/v1/payments/bill", Some(&tokens[who as usize]), Some(&json_body(json!({
                        "from_account": AccountId(from).to_string(), "biller_id": BillerId(biller).to_string(),
                        "reference": "R-1", "amount_minor": amount, "idempotency_key": key
                    }))));
                    (g, render(b.pay_bill(&tokens[who as usize], AccountId(from), BillerId(biller), "R-1", Money(amount), &key), 201))
                }
                Req::Balance { acct, who } => {
                    let g = call(&rt, &app, "GET", &format!("/api/v1/accounts/{}/balance", AccountId(acct)), Some(&tokens[who as usize]), None);
                    let w = b.account_balance(&tokens[who as usize], AccountId(acct))
                        .map(|m| api::dto::BalanceView::new(AccountId(acct), m));
                    (g, render(w, 200))
                }
                Req::Statement { acct, limit, min, who } => {
                    let mut path = format!("/api/v1/accounts/{}/transactions?limit={limit}", AccountId(acct));
                    if let Some(m) = min { path.push_str(&format!("&min_amount={m}")); }
                    let g = call(&rt, &app, "GET", &path, Some(&tokens[who as usize]), None);
                    let q = PostingQuery { min_amount: min.map(Money), ..PostingQuery::with_limit(limit) };
                    (g, render(b.view_statement(&tokens[who as usize], AccountId(acct), &q), 200))
                }
                Req::Accounts { who } => {
                    let g = call(&rt, &app, "GET", "/api/v1/accounts", Some(&tokens[who as usize]), None);
                    let w = b.list_accounts(&tokens[who as usize]).map(|a| api::dto::AccountList {
                        accounts: a.iter().map(api::dto::AccountView::from).collect(),
                    });
                    (g, render(w, 200))
                }
                Req::Cheque { acct, leaves, who } => {
                    let g = call(&rt, &app, "POST", "/api/v1/cheques/book-requests", Some(&tokens[who as usize]), Some(&json_body(json!({
                        "account_id": AccountId(acct).to_string(), "leaves": leaves
                    }))));
                    (g, render(b.request_cheque_book(&tokens[who as usize], AccountId(acct), leaves), 201))
                }
                Req::Stop { acct, number, who } => {
                    let number = format!("{:06}", number * 7);
                    let g = call(&rt, &app, "POST", "/api/v1/cheques/stop-orders", Some(&tokens[who as usize]), Some(&json_body(json!({
                        "account_id": AccountId(acct).to_string(), "cheque_number": number, "reason": "lost"
                    }))));
                    let w = match b.stop_cheque(&tokens[who as usize], AccountId(acct), &number, "lost") {
                        Ok((o, created)) => render(Ok(o), if created { 201 } else { 200 }),
                        Err(e) => render_error(&e),
                    };
                    (g, w)
                }
                Req::Freeze { acct, frozen, who } => {
                    let status = if frozen { "FROZEN" } else { "ACTIVE" };
                    let g = call(&rt, &app, "POST", &format!("/api/v1/admin/accounts/{}/status", AccountId(acct)), Some(&tokens[who as usize]), Some(&json_body(json!({"status": status}))));
                    let st = if frozen { netbank::ledger::AccountStatus::Frozen } else { netbank::ledger::AccountStatus::Active };
                    let w = b.admin_set_account_status(&tokens[who as usize], AccountId(acct), st)
                        .map(|a| api::dto::AccountView::from(&a));
                    (g, render(w, 200))
                }
            };
            prop_assert_eq!(got.status, want.status, "{}", String::from_utf8_lossy(&got.body));
            prop_assert_eq!(String::from_utf8(got.body).unwrap(), String::from_utf8(want.body).unwrap());
        }
    }
}

fn collect_keys(v: &Value, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                out.insert(k.clone());
                collect_keys(v, out);
            }
        }
        Value::Array(a) => a.iter().for_each(|v| collect_keys(v, out)),
        _ => {}
    }
}

#[test]
fn responses_expose_only_allowlisted_fields() {
    let rt = runtime();
    let w = twin(5);
    let (alice, admin) = (w.alice.clone(), w.admin.clone());
    let bank = Arc::new(w.bank);
    let app = api::router(bank.clone());
    let p = |path: &str, t: &str, body: Value| call(&rt, &app, "POST", path, Some(t), Some(&json_body(body)));
    let g = |path: &str, t: &str| call(&rt, &app, "GET", path, Some(t), None);
    let mut bodies = vec![
        p("/api/v1/session", "", json!({"username":"alice","password":CUSTOMER_PASSWORD})),
        g("/api/v1/accounts", &alice),
        g("/api/v1/accounts/ACC-000002/balance", &alice),
        p("/api/v1/transfers", &alice, json!({"from_account":"ACC-000002","to_account":"ACC-000003","amount_minor":10,"idempotency_key":"a"})),
        p("/api/v1/payments/bill", &alice, json!({"from_account":"ACC-000002","biller_id":"BIL-0001","reference":"x","amount_minor":10,"idempotency_key":"b"})),
        g("/api/v1/accounts/ACC-000002/transactions?limit=10", &alice),
        p("/api/v1/cheques/book-requests", &alice, json!({"account_id":"ACC-000002","leaves":50})),
        p("/api/v1/cheques/stop-orders", &alice, json!({"account_id":"ACC-000002","cheque_number":"000001","reason":"r"})),
        call(&rt, &app, "PUT", "/api/v1/profile/contact", Some(&alice), Some(&json_body(json!({"phone":"2"})))),
        g("/api/v1/billers", &alice),
        p("/api/v1/admin/customers", &admin, json!({"username":"carol","full_name":"C","email":"c@d.example","phone":"1","postal_address":"x","initial_password":"carol-password"})),
        p("/api/v1/admin/accounts", &admin, json!({"customer_id":"CUS-000003","kind":"CUSTOMER_SAVINGS","amount_minor":5})),
        p("/api/v1/admin/billers", &admin, json!({"name":"Gas"})),
        p("/api/v1/admin/cheques/book-requests/CHB-000001/decision", &admin, json!({"decision":"APPROVED"})),
        p("/api/v1/admin/accounts/ACC-000003/status", &admin, json!({"status":"FROZEN"})),
        p("/api/v1/admin/billers/BIL-0002/status", &admin, json!({"status":"RETIRED"})),
        p("/api/v1/profile/password", &alice, json!({"old_password":CUSTOMER_PASSWORD,"new_password":"changed-pass"})),
        p("/api/v1/session", "", json!({"username":"nobody","password":"x"})),
        call(&rt, &app, "DELETE", "/api/v1/session", Some(&alice), None),
        call(&rt, &app, "GET", "/healthz", None, None),
    ];
    let allow: BTreeSet<&str> = [
        "token", "principal_id", "role", "idle_ttl_s", "accounts", "account_id", "kind", "status",
        "amount_minor", "tx_id", "timestamp", "from_account", "counterparty", "memo", "lines",
        "running_balance_minor", "next_cursor", "id", "leaves", "requested_ts", "decided_ts",
        "cheque_number", "reason", "username", "full_name", "email", "phone", "postal_address",
        "billers", "biller_id", "name", "error", "code", "message", "last_seq",
    ]
    .into_iter()
    .collect();
    let state = bank.snapshot_state();
    let secrets: Vec<String> = state
        .credentials
        .values()
        .flat_map(|c| [c.salt.clone(), c.password_hash.clone()])
        .chain([CUSTOMER_PASSWORD.to_string(), "changed-pass".into(), "carol-password".into()])
        .collect();
    for r in bodies.drain(..) {
        assert!(r.status < 500, "{}", String::from_utf8_lossy(&r.body));
        let v: Value = serde_json::from_slice(&r.body).unwrap();
        let mut keys = BTreeSet::new();
        collect_keys(&v, &mut keys);
        for k in &keys {
            assert!(allow.contains(k.as_str()), "field {k} leaked in {v}");
        }
        let text = String::from_utf8(r.body).unwrap();
        for s in &secrets {
            assert!(!text.contains(s.as_str()), "secret leaked in {text}");
        }
        // Internal settlement account ids never appear.
        for acct in state.book.accounts().filter(|a| !a.kind.is_customer()) {
            assert!(!text.contains(&acct.id.to_string()), "{} leaked in {text}", acct.id);
        }
    }
}

#[test]
fn customer_sees_only_own_accounts() {
    let rt = runtime();
    let w = twin(9);
    let bob = w.bob.clone();
    let app = api::router(Arc::new(w.bank));
    let r = call(&rt, &app, "GET", "/api/v1/accounts", Some(&bob), None);
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    let ids: Vec<&str> = v["accounts"].as_array().unwrap().iter().map(|a| a["account_id"].as_str().unwrap()).collect();
    assert_eq!(ids, vec!["ACC-000003"]);
    let r = call(&rt, &app, "GET", "/api/v1/accounts/ACC-000002/transactions?limit=5", Some(&bob), None);
    assert_eq!(r.status, StatusCode::FORBIDDEN.as_u16());
}

#[test]
fn server_lifecycle_and_restart() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = netbank::config::ServerConfig {
        listen_port: 0,
        data_dir: dir.path().to_path_buf(),
        password_hash: HashParams::Fast,
        ..Default::default()
    };
    let handle = api::serve(&config).unwrap();
    let health: Value = reqwest::blocking::get(format!("{}/healthz", handle.url()))
        .unwrap()
        .bytes()
        .map(|b| serde_json::from_slice(&b).unwrap())
        .unwrap();
    assert_eq!(health, json!({"status":"ok","last_seq":0}));
    {
        let bank = handle.bank();
        let admin = admin_token(bank);
        for i in 0..3 {
            bank.admin_register_biller(&admin, &format!("Biller {i}")).unwrap();
        }
    }
    let journal = std::fs::read(dir.path().join("journal.log")).unwrap();
    let records = Oracle::from_journal(&journal).records as u64;
    // Bootstrap writes two records, the vault one, each biller three.
    assert_eq!(records, 12);
    let port = handle.addr().port();
    handle.shutdown();

    config.listen_port = port;
    let handle = api::serve(&config).unwrap();
    let health: Value = reqwest::blocking::get(format!("{}/healthz", handle.url()))
        .unwrap()
        .bytes()
        .map(|b| serde_json::from_slice(&b).unwrap())
        .unwrap();
    assert_eq!(health["last_seq"], records);

    // A second server cannot take the same port.
    let err = api::start(Arc::new(fast_bank()), handle.addr()).err().unwrap();
    assert!(err.message.contains("cannot listen"), "{err}");
}
