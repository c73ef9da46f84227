//! Sequence-derived identifiers. Each renders as a fixed prefix plus a
//! zero-padded decimal sequence number, e.g. `ACC-000002`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::BankError;

macro_rules! sequence_id {
    ($(#[$meta:meta])* $name:ident, $prefix:literal, $width:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u64);

        impl $name {
            pub const PREFIX: &'static str = $prefix;

            pub fn seq(self) -> u64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{:0width$}", $prefix, self.0, width = $width)
            }
        }

        impl FromStr for $name {
            type Err = BankError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let digits = s.strip_prefix($prefix).ok_or_else(|| {
                    BankError::validation(format!("malformed id {s:?}, expected {}", $prefix))
                })?;
                if digits.len() < $width || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(BankError::validation(format!("malformed id {s:?}")));
                }
                digits
                    .parse::<u64>()
                    .ok()
                    .map($name)
                    .ok_or_else(|| BankError::validation(format!("malformed id {s:?}")))
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

sequence_id!(AccountId, "ACC-", 6);
sequence_id!(CustomerId, "CUS-", 6);
sequence_id!(
    /// Ledger transaction id. Strictly increasing in commit order.
    TxId,
    "TX-",
    10
);
sequence_id!(BillerId, "BIL-", 4);
sequence_id!(ChequeRequestId, "CHB-", 6);
sequence_id!(StopOrderId, "STP-", 6);
sequence_id!(AdminId, "ADM-", 4);

/// An authenticated identity: a customer or an administrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrincipalId {
    Customer(CustomerId),
    Admin(AdminId),
}

impl fmt::Display for PrincipalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrincipalId::Customer(id) => id.fmt(f),
            PrincipalId::Admin(id) => id.fmt(f),
        }
    }
}

impl FromStr for PrincipalId {
    type Err = BankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.starts_with(CustomerId::PREFIX) {
            s.parse().map(PrincipalId::Customer)
        } else {
            s.parse().map(PrincipalId::Admin)
        }
    }
}

impl Serialize for PrincipalId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PrincipalId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
