//! Error codes shared by every layer, from ledger validation up to the HTTP envelope.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Closed set of machine-readable error codes.
///
/// The string form (`UPPER_SNAKE`) is what crosses the wire in the error
/// envelope and what the CLI prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    Validation,
    Unbalanced,
    UnknownAccount,
    UnknownCustomer,
    UnknownBiller,
    UnknownRequest,
    Frozen,
    InsufficientFunds,
    SelfTransfer,
    BillerRetired,
    AlreadyDecided,
    DuplicateUsername,
    Unauthenticated,
    BadCredentials,
    LockedOut,
    Forbidden,
    NotOwner,
    MalformedJson,
    NotFound,
    MethodNotAllowed,
    CorruptRecord,
    StorageFailure,
    Internal,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Validation => "VALIDATION",
            ErrorCode::Unbalanced => "UNBALANCED",
            ErrorCode::UnknownAccount => "UNKNOWN_ACCOUNT",
            ErrorCode::UnknownCustomer => "UNKNOWN_CUSTOMER",
            ErrorCode::UnknownBiller => "UNKNOWN_BILLER",
            ErrorCode::UnknownRequest => "UNKNOWN_REQUEST",
            ErrorCode::Frozen => "FROZEN",
            ErrorCode::InsufficientFunds => "INSUFFICIENT_FUNDS",
            ErrorCode::SelfTransfer => "SELF_TRANSFER",
            ErrorCode::BillerRetired => "BILLER_RETIRED",
            ErrorCode::AlreadyDecided => "ALREADY_DECIDED",
            ErrorCode::DuplicateUsername => "DUPLICATE_USERNAME",
            ErrorCode::Unauthenticated => "UNAUTHENTICATED",
            ErrorCode::BadCredentials => "BAD_CREDENTIALS",
            ErrorCode::LockedOut => "LOCKED_OUT",
            ErrorCode::Forbidden => "FORBIDDEN",
            ErrorCode::NotOwner => "NOT_OWNER",
            ErrorCode::MalformedJson => "MALFORMED_JSON",
            ErrorCode::NotFound => "NOT_FOUND",
            ErrorCode::MethodNotAllowed => "METHOD_NOT_ALLOWED",
            ErrorCode::CorruptRecord => "CORRUPT_RECORD",
            ErrorCode::StorageFailure => "STORAGE_FAILURE",
            ErrorCode::Internal => "INTERNAL",
        }
    }

    /// HTTP status for this code.
    pub fn http_status(self) -> u16 {
        match self {
            ErrorCode::Validation | ErrorCode::Unbalanced => 422,
            ErrorCode::Unauthenticated | ErrorCode::BadCredentials => 401,
            ErrorCode::LockedOut => 423,
            ErrorCode::Forbidden | ErrorCode::NotOwner => 403,
            ErrorCode::UnknownAccount
            | ErrorCode::UnknownCustomer
            | ErrorCode::UnknownBiller
            | ErrorCode::UnknownRequest
            | ErrorCode::NotFound => 404,
            ErrorCode::InsufficientFunds
            | ErrorCode::Frozen
            | ErrorCode::SelfTransfer
            | ErrorCode::AlreadyDecided
            | ErrorCode::DuplicateUsername
            | ErrorCode::BillerRetired => 409,
            ErrorCode::MalformedJson => 400,
            ErrorCode::MethodNotAllowed => 405,
            ErrorCode::CorruptRecord | ErrorCode::StorageFailure | ErrorCode::Internal => 500,
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An error carrying a code and a human-readable message.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {message}")]
pub struct BankError {
    pub code: ErrorCode,
    pub message: String,
}

impl BankError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Validation, message)
    }

    pub fn storage(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::StorageFailure, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Internal, message)
    }
}

impl From<std::io::Error> for BankError {
    fn from(err: std::io::Error) -> Self {
        BankError::storage(err.to_string())
    }
}

pub type Result<T, E = BankError> = std::result::Result<T, E>;
