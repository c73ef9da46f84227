//! Internet banking core.
//!
//! Layers, top to bottom:
//!
//! - [`api`]: HTTP/JSON endpoints and the server lifecycle
//! - [`services`]: the customer flows and administrator operations
//! - [`ledger`]: double-entry accounts and transactions
//! - [`persistence`]: checksummed journal, snapshots, crash recovery
//!
//! [`auth`] provides credentials, sessions, and lockout; [`Bank`] owns the
//! single commit path that ties the layers together. The `bank` binary is
//! a thin wrapper over [`cli::run`].

pub mod api;
pub mod auth;
mod bank;
pub mod cli;
pub mod clock;
pub mod config;
pub mod error;
pub mod ids;
pub mod ledger;
pub mod persistence;
pub mod services;
pub mod state;

pub use bank::{Bank, BankBuilder, DEFAULT_SNAPSHOT_EVERY};
pub use error::{BankError, ErrorCode, Result};
