//! Headless client for the HTTP API, plus the `serve` subcommand.
//!
//! ```text
//! bank [--server URL] [--json] [--session-file PATH] <command>
//! ```
//!
//! Exit codes: 0 on success, 1 for API, auth, or network errors (the error
//! envelope goes to stderr), 2 for usage errors. With `--json`, stdout is
//! exactly the server's response body followed by a newline.
//!
//! Passwords are never taken from arguments: they are prompted for on a
//! terminal, or read one per line from stdin otherwise.

pub mod session;

use std::io::{BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::api::dto::{AccountList, AccountView, BalanceView, BillerList, BillerView, SessionView};
use crate::api::render_error;
use crate::config::{ServerConfig, CONFIG_ENV, DEFAULT_PORT};
use crate::error::{BankError, ErrorCode};
use crate::ledger::Money;
use crate::services::{ChequeBookRequest, CustomerProfile, Receipt, StatementPage, StopChequeOrder};
use session::SessionFile;

pub const SERVER_ENV: &str = "BANK_SERVER";
pub const SESSION_ENV: &str = "BANK_SESSION_FILE";

fn default_server() -> String {
    format!("http://localhost:{DEFAULT_PORT}")
}

#[derive(Debug, Parser)]
#[command(name = "bank", version, about = "Internet banking client and server")]
struct Cli {
    /// API base URL [default: the login session's server, else http://localhost:8475]
    #[arg(long, env = SERVER_ENV, global = true)]
    server: Option<String>,
    /// Print raw JSON response bodies
    #[arg(long, global = true)]
    json: bool,
    /// Where the login session is kept [default: ~/.bank-session.json]
    #[arg(long, env = SESSION_ENV, global = true)]
    session_file: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the API server
    Serve(ServeArgs),
    /// Start a session (password is prompted for)
    Login {
        #[arg(long)]
        user: String,
    },
    /// End the current session
    Logout,
    /// List your accounts
    Accounts,
    /// Show one account balance
    Balance { account: String },
    /// Show account transactions with running balances
    Statement(StatementArgs),
    /// Move money between accounts
    Transfer {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Amount in minor units (cents)
        #[arg(long, allow_negative_numbers = true)]
        amount: i64,
        #[arg(long, default_value = "")]
        memo: String,
        /// Reuse a key to retry safely; a fresh one is generated otherwise
        #[arg(long)]
        idempotency_key: Option<String>,
    },
    /// Pay a registered biller
    Paybill {
        #[arg(long)]
        from: String,
        #[arg(long)]
        biller: String,
        #[arg(long)]
        reference: String,
        /// Amount in minor units (cents)
        #[arg(long, allow_negative_numbers = true)]
        amount: i64,
        #[arg(long)]
        idempotency_key: Option<String>,
    },
    /// Cheque book requests and stop orders
    #[command(subcommand)]
    Cheque(ChequeCommand),
    /// Change your password (old and new are prompted for)
    Password,
    /// Update contact details
    Contact {
        #[arg(long)]
        email: Option<String>,
        #[arg(long)]
        phone: Option<String>,
        #[arg(long)]
        address: Option<String>,
    },
    /// List billers you can pay
    Billers,
    /// Administrator operations
    #[command(subcommand)]
    Admin(AdminCommand),
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Config file of `key = value` lines
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long)]
    port: Option<u16>,
    #[arg(long)]
    host: Option<String>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatementArgs {
    account: String,
    #[arg(long)]
    from_ts: Option<u64>,
    #[arg(long)]
    to_ts: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    min_amount: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    max_amount: Option<i64>,
    #[arg(long)]
    cursor: Option<String>,
    #[arg(long)]
    limit: Option<usize>,
    /// Follow cursors until the last page
    #[arg(long)]
    all: bool,
}

#[derive(Debug, Subcommand)]
enum ChequeCommand {
    /// Request a cheque book
    Request {
        #[arg(long)]
        account: String,
        #[arg(long, default_value_t = 25)]
        leaves: u32,
    },
    /// Stop payment of a cheque
    Stop {
        #[arg(long)]
        account: String,
        #[arg(long)]
        number: String,
        #[arg(long, default_value = "")]
        reason: String,
    },
}

#[derive(Debug, Subcommand)]
enum AdminCommand {
    /// Create a customer (initial password is prompted for)
    CustomerCreate {
        #[arg(long)]
        username: String,
        #[arg(long)]
        full_name: String,
        #[arg(long)]
        email: String,
        #[arg(long)]
        phone: String,
        #[arg(long)]
        address: String,
    },
    /// Open a customer account with an optional opening deposit
    AccountOpen {
        #[arg(long)]
        customer: String,
        /// CUSTOMER_CHECKING or CUSTOMER_SAVINGS (or checking / savings)
        #[arg(long, default_value = "CUSTOMER_CHECKING")]
        kind: String,
        /// Opening deposit in minor units
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        deposit: i64,
    },
    /// Register a biller
    BillerAdd {
        #[arg(long)]
        name: String,
    },
    /// Retire or reactivate a biller
    BillerStatus {
        biller: String,
        /// ACTIVE or RETIRED
        #[arg(long)]
        status: String,
    },
    /// Approve or reject a cheque book request
    ChequeDecide {
        request: String,
        /// APPROVED or REJECTED (or approve / reject)
        #[arg(long)]
        decision: String,
    },
    /// Freeze an account, or set another status with --status
    Freeze {
        account: String,
        /// FROZEN, ACTIVE, or CLOSED
        #[arg(long, default_value = "FROZEN")]
        status: String,
    },
}

/// Standard streams for one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    /// Prompt on the terminal for secrets instead of reading stdin lines.
    pub interactive: bool,
}

enum Failure {
    Usage(String),
    /// Non-2xx response body from the server.
    Api(Vec<u8>),
    /// Error produced without reaching the server.
    Local(BankError),
    Network(String),
}

impl From<BankError> for Failure {
    fn from(e: BankError) -> Self {
        Failure::Local(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Local(BankError::storage(e.to_string()))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            let code = err.exit_code();
            let out: &mut dyn Write = if err.use_stderr() { io.stderr } else { io.stdout };
            let _ = out.write_all(text.as_bytes());
            return code;
        }
    };
    let result = execute(cli, io);
    let code = match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            2
        }
        Err(Failure::Api(body)) => {
            let _ = io.stderr.write_all(&body);
            let _ = writeln!(io.stderr);
            1
        }
        Err(Failure::Local(err)) => {
            let _ = io.stderr.write_all(&render_error(&err).body);
            let _ = writeln!(io.stderr);
            1
        }
        Err(Failure::Network(msg)) => {
            let _ = writeln!(io.stderr, "network error: {msg}");
            1
        }
    };
    let _ = io.stdout.flush();
    let _ = io.stderr.flush();
    code
}

struct Client {
    http: reqwest::blocking::Client,
    base: String,
    token: Option<String>,
    json: bool,
}

struct Response {
    status: u16,
    body: Vec<u8>,
}

impl Client {
    fn url(&self, segments: &[&str]) -> std::result::Result<reqwest::Url, Failure> {
        let mut url = reqwest::Url::parse(&self.base)
            .map_err(|e| Failure::Usage(format!("bad server URL {:?}: {e}", self.base)))?;
        url.path_segments_mut()
            .map_err(|_| Failure::Usage(format!("bad server URL {:?}", self.base)))?
            .pop_if_empty()
            .extend(segments);
        Ok(url)
    }

    fn token(&self) -> std::result::Result<&str, Failure> {
        self.token
            .as_deref()
            .ok_or_else(|| Failure::Local(crate::auth::unauthenticated()))
    }

    fn send(
        &self,
        method: reqwest::Method,
        segments: &[&str],
        query: &[(&str, String)],
        body: Option<&Value>,
        authed: bool,
    ) -> std::result::Result<Response, Failure> {
        let mut req = self.http.request(method, self.url(segments)?);
        if authed {
            req = req.bearer_auth(self.token()?);
        }
        if !query.is_empty() {
            req = req.query(query);
        }
        if let Some(body) = body {
            req = req
                .header(reqwest::header::CONTENT_TYPE, "application/json")
                .body(serde_json::to_vec(body).expect("request serializes"));
        }
        let resp = req
            .send()
            .map_err(|e| Failure::Network(format!("cannot reach {}: {e}", self.base)))?;
        let status = resp.status().as_u16();
        let body = resp
            .bytes()
            .map_err(|e| Failure::Network(format!("reading response from {}: {e}", self.base)))?
            .to_vec();
        if !(200..300).contains(&status) {
            return Err(Failure::Api(body));
        }
        Ok(Response { status, body })
    }

    fn get(&self, segments: &[&str]) -> std::result::Result<Response, Failure> {
        self.send(reqwest::Method::GET, segments, &[], None, true)
    }

    fn post(&self, segments: &[&str], body: Value) -> std::result::Result<Response, Failure> {
        self.send(reqwest::Method::POST, segments, &[], Some(&body), true)
    }
}

fn decode<T: DeserializeOwned>(resp: &Response) -> std::result::Result<T, Failure> {
    serde_json::from_slice(&resp.body).map_err(|e| {
        Failure::Network(format!("unexpected response (HTTP {}): {e}", resp.status))
    })
}

/// Prints the raw body under `--json`, otherwise the decoded value through
/// `human`.
fn emit<T: DeserializeOwned>(
    client: &Client,
    io: &mut Io<'_>,
    resp: Response,
    human: impl FnOnce(&T) -> String,
) -> Outcome {
    if client.json {
        io.stdout.write_all(&resp.body)?;
        writeln!(io.stdout)?;
    } else {
        let value: T = decode(&resp)?;
        writeln!(io.stdout, "{}", human(&value))?;
    }
    Ok(())
}

fn read_secret(io: &mut Io<'_>, prompt: &str) -> std::result::Result<String, Failure> {
    if io.interactive {
        return rpassword::prompt_password(prompt)
            .map_err(|e| Failure::Usage(format!("cannot read password: {e}")));
    }
    let mut line = String::new();
    let n = io.stdin.read_line(&mut line)?;
    if n == 0 {
        return Err(Failure::Usage(format!(
            "{} expected on stdin",
            prompt.trim_end_matches([':', ' '])
        )));
    }
    Ok(line.trim_end_matches(['\n', '\r']).to_string())
}

fn money(minor: i64) -> String {
    Money(minor).to_decimal_string()
}

fn normalize_kind(kind: &str) -> String {
    match kind.to_ascii_lowercase().as_str() {
        "checking" => "CUSTOMER_CHECKING".to_string(),
        "savings" => "CUSTOMER_SAVINGS".to_string(),
        _ => kind.to_ascii_uppercase(),
    }
}

fn normalize_decision(decision: &str) -> String {
    match decision.to_ascii_lowercase().as_str() {
        "approve" => "APPROVED".to_string(),
        "reject" => "REJECTED".to_string(),
        _ => decision.to_ascii_uppercase(),
    }
}

fn fresh_key() -> String {
    uuid::Uuid::new_v4().to_string()
}

fn account_line(a: &AccountView) -> String {
    format!(
        "{}  {:<17}  {:<6}  {:>16}",
        a.account_id,
        json!(a.kind).as_str().unwrap_or_default(),
        json!(a.status).as_str().unwrap_or_default(),
        money(a.amount_minor)
    )
}

fn receipt_line(r: &Receipt) -> String {
    format!(
        "{}  {}  {} from {} to {}  {}",
        r.tx_id,
        json!(r.kind).as_str().unwrap_or_default(),
        r.amount.to_decimal_string(),
        r.from_account,
        r.counterparty,
        r.memo
    )
    .trim_end()
    .to_string()
}

fn statement_lines(page: &StatementPage) -> String {
    let mut out = String::new();
    for l in &page.lines {
        out.push_str(&format!(
            "{}  {:>13}  {:<15}  {:>14}  {:>16}  {}\n",
            l.tx_id,
            l.timestamp,
            json!(l.kind).as_str().unwrap_or_default(),
            money(l.amount_minor),
            money(l.running_balance_minor),
            l.memo
        ));
    }
    out
}

fn execute(cli: Cli, io: &mut Io<'_>) -> Outcome {
    let Cli {
        server,
        json,
        session_file,
        command,
    } = cli;
    if let Command::Serve(args) = command {
        return serve(args, io);
    }
    let session_path = session_file.unwrap_or_else(session::default_path);
    let saved = session::load(&session_path);
    let base = server
        .or_else(|| saved.as_ref().map(|s| s.server_url.clone()))
        .unwrap_or_else(default_server);
    let http = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(60))
        .build()
        .map_err(|e| Failure::Network(e.to_string()))?;
    let client = Client {
        http,
        base: base.trim_end_matches('/').to_string(),
        token: saved.map(|s| s.token),
        json,
    };

    match command {
        Command::Serve(_) => unreachable!("handled above"),
        Command::Login { user } => {
            let password = read_secret(io, "Password: ")?;
            let resp = client.send(
                reqwest::Method::POST,
                &["api", "v1", "session"],
                &[],
                Some(&json!({"username": user, "password": password})),
                false,
            )?;
            let view: SessionView = decode(&resp)?;
            session::save(
                &session_path,
                &SessionFile {
                    server_url: client.base.clone(),
                    token: view.token.clone(),
                },
            )?;
            emit(&client, io, resp, |v: &SessionView| {
                format!(
                    "Logged in as {} ({}); session expires after {}s idle",
                    v.principal_id,
                    json!(v.role).as_str().unwrap_or_default(),
                    v.idle_ttl_s
                )
            })
        }
        Command::Logout => {
            if client.token.is_none() {
                writeln!(io.stdout, "Not logged in")?;
                return Ok(());
            }
            let result = client.send(reqwest::Method::DELETE, &["api", "v1", "session"], &[], None, true);
            session::remove(&session_path)?;
            match result {
                Ok(resp) => emit(&client, io, resp, |_: &Value| "Logged out".to_string()),
                Err(Failure::Network(msg)) => {
                    writeln!(io.stdout, "Logged out locally; server not reached: {msg}")?;
                    Ok(())
                }
                Err(other) => Err(other),
            }
        }
        Command::Accounts => {
            let resp = client.get(&["api", "v1", "accounts"])?;
            emit(&client, io, resp, |list: &AccountList| {
                if list.accounts.is_empty() {
                    return "No accounts".to_string();
                }
                list.accounts.iter().map(account_line).collect::<Vec<_>>().join("\n")
            })
        }
        Command::Balance { account } => {
            let resp = client.get(&["api", "v1", "accounts", &account, "balance"])?;
            emit(&client, io, resp, |b: &BalanceView| {
                format!("{}  {}", b.account_id, money(b.amount_minor))
            })
        }
        Command::Statement(args) => statement(&client, io, args),
        Command::Transfer {
            from,
            to,
            amount,
            memo,
            idempotency_key,
        } => {
            let resp = client.post(
                &["api", "v1", "transfers"],
                json!({
                    "from_account": from,
                    "to_account": to,
                    "amount_minor": amount,
                    "memo": memo,
                    "idempotency_key": idempotency_key.unwrap_or_else(fresh_key),
                }),
            )?;
            emit(&client, io, resp, receipt_line)
        }
        Command::Paybill {
            from,
            biller,
            reference,
            amount,
            idempotency_key,
        } => {
            let resp = client.post(
                &["api", "v1", "payments", "bill"],
                json!({
                    "from_account": from,
                    "biller_id": biller,
                    "reference": reference,
                    "amount_minor": amount,
                    "idempotency_key": idempotency_key.unwrap_or_else(fresh_key),
                }),
            )?;
            emit(&client, io, resp, receipt_line)
        }
        Command::Cheque(ChequeCommand::Request { account, leaves }) => {
            let resp = client.post(
                &["api", "v1", "cheques", "book-requests"],
                json!({"account_id": account, "leaves": leaves}),
            )?;
            emit(&client, io, resp, |r: &ChequeBookRequest| {
                format!(
                    "{}  {}  {} leaves for {}",
                    r.id,
                    json!(r.status).as_str().unwrap_or_default(),
                    r.leaves,
                    r.account_id
                )
            })
        }
        Command::Cheque(ChequeCommand::Stop {
            account,
            number,
            reason,
        }) => {
            let resp = client.post(
                &["api", "v1", "cheques", "stop-orders"],
                json!({"account_id": account, "cheque_number": number, "reason": reason}),
            )?;
            emit(&client, io, resp, |o: &StopChequeOrder| {
                format!(
                    "{}  {}  cheque {} on {}",
                    o.id,
                    json!(o.status).as_str().unwrap_or_default(),
                    o.cheque_number,
                    o.account_id
                )
            })
        }
        Command::Password => {
            client.token()?;
            let old = read_secret(io, "Current password: ")?;
            let new = read_secret(io, "New password: ")?;
            if io.interactive && read_secret(io, "Repeat new password: ")? != new {
                return Err(Failure::Usage("passwords do not match".to_string()));
            }
            let resp = client.post(
                &["api", "v1", "profile", "password"],
                json!({"old_password": old, "new_password": new}),
            )?;
            emit(&client, io, resp, |_: &Value| "Password changed".to_string())
        }
        Command::Contact {
            email,
            phone,
            address,
        } => {
            let mut body = serde_json::Map::new();
            if let Some(v) = email {
                body.insert("email".into(), v.into());
            }
            if let Some(v) = phone {
                body.insert("phone".into(), v.into());
            }
            if let Some(v) = address {
                body.insert("postal_address".into(), v.into());
            }
            let resp = client.send(
                reqwest::Method::PUT,
                &["api", "v1", "profile", "contact"],
                &[],
                Some(&Value::Object(body)),
                true,
            )?;
            emit(&client, io, resp, |p: &CustomerProfile| {
                format!(
                    "Contact details updated for {}: {}, {}, {}",
                    p.id, p.email, p.phone, p.postal_address
                )
            })
        }
        Command::Billers => {
            let resp = client.get(&["api", "v1", "billers"])?;
            emit(&client, io, resp, |list: &BillerList| {
                if list.billers.is_empty() {
                    return "No billers".to_string();
                }
                list.billers
                    .iter()
                    .map(|b| format!("{}  {}", b.biller_id, b.name))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
        }
        Command::Admin(cmd) => admin(&client, io, cmd),
    }
}

fn statement(client: &Client, io: &mut Io<'_>, args: StatementArgs) -> Outcome {
    let mut cursor = args.cursor.clone();
    let mut wrote_header = false;
    loop {
        let mut query: Vec<(&str, String)> = Vec::new();
        if let Some(v) = args.from_ts {
            query.push(("from_ts", v.to_string()));
        }
        if let Some(v) = args.to_ts {
            query.push(("to_ts", v.to_string()));
        }
        if let Some(v) = args.min_amount {
            query.push(("min_amount", v.to_string()));
        }
        if let Some(v) = args.max_amount {
            query.push(("max_amount", v.to_string()));
        }
        if let Some(v) = &cursor {
            query.push(("cursor", v.clone()));
        }
        if let Some(v) = args.limit {
            query.push(("limit", v.to_string()));
        }
        let resp = client.send(
            reqwest::Method::GET,
            &["api", "v1", "accounts", &args.account, "transactions"],
            &query,
            None,
            true,
        )?;
        let page: StatementPage = decode(&resp)?;
        if client.json {
            io.stdout.write_all(&resp.body)?;
            writeln!(io.stdout)?;
        } else {
            if !wrote_header {
                writeln!(
                    io.stdout,
                    "{:<13}  {:>13}  {:<15}  {:>14}  {:>16}  MEMO",
                    "TX", "TIMESTAMP", "KIND", "AMOUNT", "BALANCE"
                )?;
                wrote_header = true;
            }
            io.stdout.write_all(statement_lines(&page).as_bytes())?;
        }
        match page.next_cursor {
            Some(next) if args.all => cursor = Some(next.to_string()),
            Some(next) => {
                if !client.json {
                    writeln!(io.stdout, "More: --cursor {next}")?;
                }
                return Ok(());
            }
            None => return Ok(()),
        }
    }
}

fn admin(client: &Client, io: &mut Io<'_>, cmd: AdminCommand) -> Outcome {
    match cmd {
        AdminCommand::CustomerCreate {
            username,
            full_name,
            email,
            phone,
            address,
        } => {
            client.token()?;
            let password = read_secret(io, "Initial password: ")?;
            let resp = client.post(
                &["api", "v1", "admin", "customers"],
                json!({
                    "username": username,
                    "full_name": full_name,
                    "email": email,
                    "phone": phone,
                    "postal_address": address,
                    "initial_password": password,
                }),
            )?;
            emit(client, io, resp, |p: &CustomerProfile| {
                format!("{}  {}  {}", p.id, p.username, p.full_name)
            })
        }
        AdminCommand::AccountOpen {
            customer,
            kind,
            deposit,
        } => {
            let resp = client.post(
                &["api", "v1", "admin", "accounts"],
                json!({
                    "customer_id": customer,
                    "kind": normalize_kind(&kind),
                    "amount_minor": deposit,
                }),
            )?;
            emit(client, io, resp, account_line)
        }
        AdminCommand::BillerAdd { name } => {
            let resp = client.post(&["api", "v1", "admin", "billers"], json!({"name": name}))?;
            emit(client, io, resp, |b: &BillerView| {
                format!("{}  {}", b.biller_id, b.name)
            })
        }
        AdminCommand::BillerStatus { biller, status } => {
            let resp = client.post(
                &["api", "v1", "admin", "billers", &biller, "status"],
                json!({"status": status.to_ascii_uppercase()}),
            )?;
            emit(client, io, resp, |b: &BillerView| {
                format!(
                    "{}  {}  {}",
                    b.biller_id,
                    b.name,
                    json!(b.status).as_str().unwrap_or_default()
                )
            })
        }
        AdminCommand::ChequeDecide { request, decision } => {
            let resp = client.post(
                &["api", "v1", "admin", "cheques", "book-requests", &request, "decision"],
                json!({"decision": normalize_decision(&decision)}),
            )?;
            emit(client, io, resp, |r: &ChequeBookRequest| {
                format!(
                    "{}  {}  {} leaves for {}",
                    r.id,
                    json!(r.status).as_str().unwrap_or_default(),
                    r.leaves,
                    r.account_id
                )
            })
        }
        AdminCommand::Freeze { account, status } => {
            let resp = client.post(
                &["api", "v1", "admin", "accounts", &account, "status"],
                json!({"status": status.to_ascii_uppercase()}),
            )?;
            emit(client, io, resp, account_line)
        }
    }
}

fn serve(args: ServeArgs, io: &mut Io<'_>) -> Outcome {
    let mut config = match &args.config {
        Some(path) => ServerConfig::load(path)?,
        None => ServerConfig::default(),
    };
    if let Some(port) = args.port {
        config.listen_port = port;
    }
    if let Some(host) = args.host {
        config.listen_host = host;
    }
    if let Some(dir) = args.data_dir {
        config.data_dir = dir;
    }
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .try_init();
    let handle = crate::api::serve(&config).map_err(|e| {
        if e.code == ErrorCode::CorruptRecord {
            tracing::error!("refusing to start: {}", e.message);
        }
        Failure::Local(e)
    })?;
    writeln!(
        io.stdout,
        "listening on {} (data in {}, last_seq {})",
        handle.url(),
        config.data_dir.display(),
        handle.bank().last_seq()
    )?;
    io.stdout.flush()?;
    handle.wait();
    Ok(())
}
