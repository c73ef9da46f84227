use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::thread::JoinHandle;

use tokio::sync::oneshot;

use crate::bank::Bank;
use crate::config::ServerConfig;
use crate::error::{BankError, Result};

pub const ADMIN_USER_ENV: &str = "BANK_ADMIN_USER";
pub const ADMIN_PASSWORD_ENV: &str = "BANK_ADMIN_PASSWORD";

/// A running server. Dropping the handle stops it.
pub struct ServerHandle {
    addr: SocketAddr,
    bank: Arc<Bank>,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn bank(&self) -> &Arc<Bank> {
        &self.bank
    }

    /// Blocks until the server exits.
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    /// Stops accepting connections, drains in-flight requests, and closes
    /// the journal.
    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
        self.bank.close();
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Binds `addr` and serves the API on a background thread. Binding is
/// synchronous, so an occupied port fails here rather than later.
pub fn start(bank: Arc<Bank>, addr: SocketAddr) -> Result<ServerHandle> {
    let listener = TcpListener::bind(addr)
        .map_err(|e| BankError::storage(format!("cannot listen on {addr}: {e}")))?;
    listener.set_nonblocking(true)?;
    let local = listener.local_addr()?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| BankError::internal(format!("cannot start runtime: {e}")))?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = super::router(Arc::clone(&bank));
    let thread = std::thread::Builder::new()
        .name("bank-http".to_string())
        .spawn(move || {
            runtime.block_on(async move {
                let listener = match tokio::net::TcpListener::from_std(listener) {
                    Ok(l) => l,
                    Err(e) => {
                        tracing::error!("listener setup failed: {e}");
                        return;
                    }
                };
                let shutdown = async {
                    let _ = rx.await;
                };
                if let Err(e) = axum::serve(listener, app)
                    .with_graceful_shutdown(shutdown)
                    .await
                {
                    tracing::error!("server error: {e}");
                }
            });
        })?;
    tracing::info!(%local, "listening");
    Ok(ServerHandle {
        addr: local,
        bank,
        shutdown: Some(tx),
        thread: Some(thread),
    })
}

/// Recovers state from the configured data directory and starts serving.
///
/// When no administrator exists yet and `BANK_ADMIN_PASSWORD` is set, an
/// administrator named by `BANK_ADMIN_USER` (default `admin`) is created.
pub fn serve(config: &ServerConfig) -> Result<ServerHandle> {
    std::fs::create_dir_all(&config.data_dir).map_err(|e| {
        BankError::storage(format!("cannot create {}: {e}", config.data_dir.display()))
    })?;
    let bank = Bank::builder()
        .data_dir(&config.data_dir)
        .auth_policy(config.auth_policy())
        .hash_params(config.password_hash)
        .snapshot_every(config.snapshot_every)
        .open()?;
    if !bank.has_admin() {
        if let Ok(password) = std::env::var(ADMIN_PASSWORD_ENV) {
            let user = std::env::var(ADMIN_USER_ENV).unwrap_or_else(|_| "admin".to_string());
            let id = bank.bootstrap_admin(&user, &password)?;
            tracing::info!(%id, user, "created administrator");
        }
    }
    let host: std::net::IpAddr = config
        .listen_host
        .parse()
        .map_err(|_| BankError::validation(format!("bad listen_host {:?}", config.listen_host)))?;
    start(Arc::new(bank), SocketAddr::new(host, config.listen_port))
}
