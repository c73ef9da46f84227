//! Application-server tier: HTTP/JSON endpoints over the service flows.
//!
//! Each endpoint is a thin adapter: parse the request, call one service
//! operation, and [`render`] the result. Status and body are a pure
//! function of the service result, so the same call made directly against
//! [`Bank`] renders byte-identically.

pub mod dto;
mod server;

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use server::{serve, start, ServerHandle};

use crate::bank::Bank;
use crate::error::{BankError, ErrorCode, Result};
use crate::ids::{AccountId, BillerId, ChequeRequestId, TxId};
use crate::ledger::{Money, PostingQuery};
use crate::services::{ContactUpdate, NewCustomer};
use dto::*;

pub const API_PREFIX: &str = "/api/v1";
pub const DEFAULT_PAGE_LIMIT: usize = 20;

/// A fully rendered HTTP response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub status: u16,
    pub body: Vec<u8>,
}

pub fn render_error(err: &BankError) -> Rendered {
    let envelope = ErrorEnvelope {
        error: ErrorBody {
            code: err.code.as_str(),
            message: &err.message,
        },
    };
    Rendered {
        status: err.code.http_status(),
        body: serde_json::to_vec(&envelope).expect("envelope serializes"),
    }
}

pub fn render<T: Serialize>(result: Result<T>, ok_status: u16) -> Rendered {
    match result {
        Ok(value) => match serde_json::to_vec(&value) {
            Ok(body) => Rendered {
                status: ok_status,
                body,
            },
            Err(e) => render_error(&BankError::internal(e.to_string())),
        },
        Err(err) => render_error(&err),
    }
}

impl IntoResponse for Rendered {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let mut resp = (status, self.body).into_response();
        resp.headers_mut().insert(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/json"),
        );
        resp
    }
}

/// Parses a JSON body: syntax errors are `MALFORMED_JSON` (400), shape
/// errors such as missing fields are `VALIDATION` (422).
pub fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T> {
    let value: serde_json::Value = serde_json::from_slice(body)
        .map_err(|e| BankError::new(ErrorCode::MalformedJson, format!("malformed JSON: {e}")))?;
    serde_json::from_value(value).map_err(|e| BankError::validation(e.to_string()))
}

pub fn bearer_token(headers: &HeaderMap) -> String {
    headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(|t| t.trim().to_string())
        .unwrap_or_default()
}

fn parse_id<T: std::str::FromStr<Err = BankError>>(raw: &str) -> Result<T> {
    raw.parse()
}

fn parse_num<T: std::str::FromStr>(params: &HashMap<String, String>, key: &str) -> Result<Option<T>> {
    params
        .get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| BankError::validation(format!("query parameter {key} must be an integer")))
        })
        .transpose()
}

/// Builds a statement query from URL parameters.
pub fn statement_query(params: &HashMap<String, String>) -> Result<PostingQuery> {
    Ok(PostingQuery {
        from_ts: parse_num(params, "from_ts")?,
        to_ts: parse_num(params, "to_ts")?,
        min_amount: parse_num::<i64>(params, "min_amount")?.map(Money),
        max_amount: parse_num::<i64>(params, "max_amount")?.map(Money),
        cursor: params.get("cursor").map(|c| c.parse::<TxId>()).transpose()?,
        limit: parse_num(params, "limit")?.unwrap_or(DEFAULT_PAGE_LIMIT),
    })
}

type Shared = State<Arc<Bank>>;

/// Runs blocking service work off the async executor.
async fn blocking(f: impl FnOnce() -> Rendered + Send + 'static) -> Rendered {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| render_error(&BankError::internal(e.to_string())))
}

macro_rules! try_render {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return render_error(&err),
        }
    };
}

// Each `op_*` function is the synchronous core of one endpoint.

pub fn op_login(bank: &Bank, body: &[u8]) -> Rendered {
    let req: LoginRequest = try_render!(parse_body(body));
    render(bank.login(&req.username, &req.password).map(|s| SessionView::from(&s)), 200)
}

pub fn op_logout(bank: &Bank, token: &str) -> Rendered {
    bank.logout(token);
    render(Ok(Ack::ok()), 200)
}

pub fn op_accounts(bank: &Bank, token: &str) -> Rendered {
    render(
        bank.list_accounts(token).map(|accounts| AccountList {
            accounts: accounts.iter().map(AccountView::from).collect(),
        }),
        200,
    )
}

pub fn op_balance(bank: &Bank, token: &str, account: &str) -> Rendered {
    let account: AccountId = try_render!(parse_id(account));
    render(
        bank.account_balance(token, account).map(|b| BalanceView::new(account, b)),
        200,
    )
}

pub fn op_statement(bank: &Bank, token: &str, account: &str, params: &HashMap<String, String>) -> Rendered {
    // Authenticate before looking at the query so bad tokens always get 401.
    try_render!(bank.authenticate(token));
    let account: AccountId = try_render!(parse_id(account));
    let query = try_render!(statement_query(params));
    render(bank.view_statement(token, account, &query), 200)
}

pub fn op_pay_bill(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.authenticate(token));
    let req: BillPaymentRequest = try_render!(parse_body(body));
    render(
        bank.pay_bill(
            token,
            req.from_account,
            req.biller_id,
            &req.reference,
            Money(req.amount_minor),
            &req.idempotency_key,
        ),
        201,
    )
}

pub fn op_transfer(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.authenticate(token));
    let req: TransferRequest = try_render!(parse_body(body));
    render(
        bank.transfer_funds(
            token,
            req.from_account,
            req.to_account,
            Money(req.amount_minor),
            &req.memo,
            &req.idempotency_key,
        ),
        201,
    )
}

pub fn op_cheque_book(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.authenticate(token));
    let req: ChequeBookRequestBody = try_render!(parse_body(body));
    render(bank.request_cheque_book(token, req.account_id, req.leaves), 201)
}

pub fn op_stop_cheque(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.authenticate(token));
    let req: StopOrderRequest = try_render!(parse_body(body));
    match bank.stop_cheque(token, req.account_id, &req.cheque_number, &req.reason) {
        Ok((order, created)) => render(Ok(order), if created { 201 } else { 200 }),
        Err(err) => render_error(&err),
    }
}

pub fn op_change_password(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.authenticate(token));
    let req: PasswordChangeRequest = try_render!(parse_body(body));
    render(
        bank.change_password(token, &req.old_password, &req.new_password)
            .map(|_| Ack::ok()),
        200,
    )
}

pub fn op_update_contact(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.authenticate(token));
    let req: ContactRequest = try_render!(parse_body(body));
    let update = ContactUpdate {
        email: req.email,
        phone: req.phone,
        postal_address: req.postal_address,
    };
    render(bank.update_contact(token, &update), 200)
}

pub fn op_billers(bank: &Bank, token: &str) -> Rendered {
    render(
        bank.list_active_billers(token).map(|billers| BillerList {
            billers: billers.iter().map(BillerView::from).collect(),
        }),
        200,
    )
}

pub fn op_admin_customer(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.require_admin(token));
    let req: NewCustomerRequest = try_render!(parse_body(body));
    let customer = NewCustomer {
        username: req.username,
        full_name: req.full_name,
        email: req.email,
        phone: req.phone,
        postal_address: req.postal_address,
    };
    render(bank.admin_create_customer(token, &customer, &req.initial_password), 201)
}

pub fn op_admin_account(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.require_admin(token));
    let req: OpenAccountRequest = try_render!(parse_body(body));
    render(
        bank.admin_open_funded_account(token, req.customer_id, req.kind, Money(req.amount_minor))
            .map(|a| AccountView::from(&a)),
        201,
    )
}

pub fn op_admin_biller(bank: &Bank, token: &str, body: &[u8]) -> Rendered {
    try_render!(bank.require_admin(token));
    let req: NewBillerRequest = try_render!(parse_body(body));
    render(
        bank.admin_register_biller(token, &req.name).map(|b| BillerView::from(&b)),
        201,
    )
}

pub fn op_admin_biller_status(bank: &Bank, token: &str, biller: &str, body: &[u8]) -> Rendered {
    try_render!(bank.require_admin(token));
    let biller: BillerId = try_render!(parse_id(biller));
    let req: BillerStatusRequest = try_render!(parse_body(body));
    render(
        bank.admin_set_biller_status(token, biller, req.status)
            .map(|b| BillerView::from(&b)),
        200,
    )
}

pub fn op_admin_decide(bank: &Bank, token: &str, request: &str, body: &[u8]) -> Rendered {
    try_render!(bank.require_admin(token));
    let id: ChequeRequestId = try_render!(parse_id(request));
    let req: DecisionRequest = try_render!(parse_body(body));
    render(bank.admin_decide_cheque_request(token, id, req.decision), 200)
}

pub fn op_admin_account_status(bank: &Bank, token: &str, account: &str, body: &[u8]) -> Rendered {
    try_render!(bank.require_admin(token));
    let account: AccountId = try_render!(parse_id(account));
    let req: AccountStatusRequest = try_render!(parse_body(body));
    render(
        bank.admin_set_account_status(token, account, req.status)
            .map(|a| AccountView::from(&a)),
        200,
    )
}

pub fn op_health(bank: &Bank) -> Rendered {
    render(
        Ok(Health {
            status: "ok".to_string(),
            last_seq: bank.last_seq(),
        }),
        200,
    )
}

/// The full route table.
pub fn router(bank: Arc<Bank>) -> Router {
    let api = Router::new()
        .route(
            "/session",
            post(|State(b): Shared, body: Bytes| async move {
                blocking(move || op_login(&b, &body)).await
            })
            .delete(|State(b): Shared, h: HeaderMap| async move {
                blocking(move || op_logout(&b, &bearer_token(&h))).await
            }),
        )
        .route(
            "/accounts",
            get(|State(b): Shared, h: HeaderMap| async move {
                blocking(move || op_accounts(&b, &bearer_token(&h))).await
            }),
        )
        .route(
            "/accounts/{id}/balance",
            get(|State(b): Shared, h: HeaderMap, Path(id): Path<String>| async move {
                blocking(move || op_balance(&b, &bearer_token(&h), &id)).await
            }),
        )
        .route(
            "/accounts/{id}/transactions",
            get(
                |State(b): Shared,
                 h: HeaderMap,
                 Path(id): Path<String>,
                 Query(q): Query<HashMap<String, String>>| async move {
                    blocking(move || op_statement(&b, &bearer_token(&h), &id, &q)).await
                },
            ),
        )
        .route(
            "/payments/bill",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_pay_bill(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/transfers",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_transfer(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/cheques/book-requests",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_cheque_book(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/cheques/stop-orders",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_stop_cheque(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/profile/password",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_change_password(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/profile/contact",
            put(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_update_contact(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/billers",
            get(|State(b): Shared, h: HeaderMap| async move {
                blocking(move || op_billers(&b, &bearer_token(&h))).await
            }),
        )
        .route(
            "/admin/customers",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_admin_customer(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/admin/accounts",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_admin_account(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/admin/billers",
            post(|State(b): Shared, h: HeaderMap, body: Bytes| async move {
                blocking(move || op_admin_biller(&b, &bearer_token(&h), &body)).await
            }),
        )
        .route(
            "/admin/billers/{id}/status",
            post(
                |State(b): Shared, h: HeaderMap, Path(id): Path<String>, body: Bytes| async move {
                    blocking(move || op_admin_biller_status(&b, &bearer_token(&h), &id, &body)).await
                },
            ),
        )
        .route(
            "/admin/cheques/book-requests/{id}/decision",
            post(
                |State(b): Shared, h: HeaderMap, Path(id): Path<String>, body: Bytes| async move {
                    blocking(move || op_admin_decide(&b, &bearer_token(&h), &id, &body)).await
                },
            ),
        )
        .route(
            "/admin/accounts/{id}/status",
            post(
                |State(b): Shared, h: HeaderMap, Path(id): Path<String>, body: Bytes| async move {
                    blocking(move || op_admin_account_status(&b, &bearer_token(&h), &id, &body))
                        .await
                },
            ),
        );

    Router::new()
        .nest(API_PREFIX, api)
        .route(
            "/healthz",
            get(|State(b): Shared| async move { op_health(&b) }),
        )
        .fallback(|| async {
            render_error(&BankError::new(ErrorCode::NotFound, "no such route"))
        })
        .method_not_allowed_fallback(|| async {
            render_error(&BankError::new(
                ErrorCode::MethodNotAllowed,
                "method not allowed for this route",
            ))
        })
        .with_state(bank)
}
