//! Server configuration: `key = value` lines, `#` comments.

use std::path::{Path, PathBuf};

use crate::auth::{AuthPolicy, HashParams};
use crate::error::{BankError, Result};

pub const DEFAULT_PORT: u16 = 8475;
pub const CONFIG_ENV: &str = "BANK_CONFIG";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerConfig {
    pub listen_host: String,
    pub listen_port: u16,
    pub data_dir: PathBuf,
    pub session_idle_ttl_s: u64,
    pub lockout_threshold: u32,
    pub lockout_window_s: u64,
    pub snapshot_every: u64,
    /// Display only; amounts are always integer minor units.
    pub currency_code: String,
    pub password_hash: HashParams,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            listen_host: "127.0.0.1".to_string(),
            listen_port: DEFAULT_PORT,
            data_dir: PathBuf::from("bank-data"),
            session_idle_ttl_s: 900,
            lockout_threshold: 5,
            lockout_window_s: 900,
            snapshot_every: crate::DEFAULT_SNAPSHOT_EVERY,
            currency_code: "USD".to_string(),
            password_hash: HashParams::Standard,
        }
    }
}

fn positive<T: std::str::FromStr + PartialOrd + Default>(key: &str, value: &str) -> Result<T> {
    match value.parse::<T>() {
        Ok(v) if v > T::default() => Ok(v),
        _ => Err(BankError::validation(format!(
            "config key {key}: expected a positive integer, got {value:?}"
        ))),
    }
}

impl ServerConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                BankError::validation(format!("config line {}: expected key = value", lineno + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            BankError::storage(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "listen_host" => self.listen_host = value.to_string(),
            "listen_port" => self.listen_port = positive(key, value)?,
            "data_dir" => {
                if value.is_empty() {
                    return Err(BankError::validation("config key data_dir must not be empty"));
                }
                self.data_dir = PathBuf::from(value)
            }
            "session_idle_ttl_s" => self.session_idle_ttl_s = positive(key, value)?,
            "lockout_threshold" => self.lockout_threshold = positive(key, value)?,
            "lockout_window_s" => self.lockout_window_s = positive(key, value)?,
            "snapshot_every" => self.snapshot_every = positive(key, value)?,
            "currency_code" => {
                if value.len() != 3 || !value.bytes().all(|b| b.is_ascii_uppercase()) {
                    return Err(BankError::validation(format!(
                        "config key currency_code: expected a 3-letter code, got {value:?}"
                    )));
                }
                self.currency_code = value.to_string()
            }
            "password_hash" => self.password_hash = value.parse()?,
            other => {
                return Err(BankError::validation(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    pub fn auth_policy(&self) -> AuthPolicy {
        AuthPolicy {
            lockout_threshold: self.lockout_threshold,
            lockout_window_s: self.lockout_window_s,
            session_idle_ttl_s: self.session_idle_ttl_s,
        }
    }
}
