//! Salted, deliberately slow password hashing (PBKDF2-HMAC-SHA256).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::Sha256;
use subtle::ConstantTimeEq;

use crate::error::{BankError, Result};
use crate::ids::PrincipalId;

pub const SALT_LEN: usize = 16;
const HASH_LEN: usize = 32;

/// A named cost setting. The name is stored with each credential so old
/// hashes stay verifiable when the default changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashParams {
    /// PBKDF2-HMAC-SHA256, 600k iterations. The production default.
    Standard,
    /// PBKDF2-HMAC-SHA256, 1k iterations. For tests and demos only.
    Fast,
}

impl HashParams {
    pub fn name(self) -> &'static str {
        match self {
            HashParams::Standard => "pbkdf2-sha256-600000",
            HashParams::Fast => "pbkdf2-sha256-1000",
        }
    }

    fn iterations(self) -> u32 {
        match self {
            HashParams::Standard => 600_000,
            HashParams::Fast => 1_000,
        }
    }
}

impl fmt::Display for HashParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HashParams {
    type Err = BankError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pbkdf2-sha256-600000" | "standard" => Ok(HashParams::Standard),
            "pbkdf2-sha256-1000" | "fast" => Ok(HashParams::Fast),
            other => Err(BankError::validation(format!("unknown hash parameter set {other:?}"))),
        }
    }
}

pub fn hash_password(password: &str, salt: &[u8], params: HashParams) -> Result<Vec<u8>> {
    if password.is_empty() {
        return Err(BankError::validation("password must not be empty"));
    }
    let mut out = vec![0u8; HASH_LEN];
    pbkdf2::pbkdf2_hmac::<Sha256>(password.as_bytes(), salt, params.iterations(), &mut out);
    Ok(out)
}

/// Stored proof of a password. Salt and hash are lowercase hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credential {
    pub principal_id: PrincipalId,
    pub salt: String,
    pub password_hash: String,
    pub hash_params: String,
}

impl Credential {
    pub fn create(
        principal_id: PrincipalId,
        password: &str,
        salt: [u8; SALT_LEN],
        params: HashParams,
    ) -> Result<Self> {
        let hash = hash_password(password, &salt, params)?;
        Ok(Self {
            principal_id,
            salt: hex::encode(salt),
            password_hash: hex::encode(hash),
            hash_params: params.name().to_string(),
        })
    }

    /// Recomputes the hash and compares in constant time.
    pub fn verify(&self, password: &str) -> bool {
        let (Ok(params), Ok(salt), Ok(stored)) = (
            self.hash_params.parse::<HashParams>(),
            hex::decode(&self.salt),
            hex::decode(&self.password_hash),
        ) else {
            return false;
        };
        match hash_password(password, &salt, params) {
            Ok(computed) => computed.ct_eq(&stored).into(),
            Err(_) => false,
        }
    }
}
