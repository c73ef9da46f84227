use super::{forbidden, CustomerProfile};
use crate::auth::{bad_credentials, validate_new_password, Credential, Role};
use crate::bank::Bank;
use crate::error::{BankError, Result};
use crate::ids::PrincipalId;
use crate::state::Event;

pub const CONTACT_FIELD_MAX: usize = 200;

/// Fields to change; `None` leaves a field as it is.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContactUpdate {
    pub email: Option<String>,
    pub phone: Option<String>,
    pub postal_address: Option<String>,
}

/// Accepts `local@domain.tld` shapes: one `@`, no whitespace, and a dot
/// inside the domain with text on both sides.
pub(crate) fn validate_email(email: &str) -> Result<()> {
    let bad = || BankError::validation(format!("{email:?} is not an email address"));
    if email.len() > CONTACT_FIELD_MAX || email.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let (local, domain) = email.split_once('@').ok_or_else(bad)?;
    if local.is_empty() || domain.contains('@') {
        return Err(bad());
    }
    match domain.rsplit_once('.') {
        Some((host, tld)) if !host.is_empty() && !tld.is_empty() && !host.ends_with('.') => Ok(()),
        _ => Err(bad()),
    }
}

pub(crate) fn validate_contact_field(name: &str, value: &str) -> Result<()> {
    if value.trim().is_empty() || value.chars().count() > CONTACT_FIELD_MAX {
        return Err(BankError::validation(format!(
            "{name} must be 1 to {CONTACT_FIELD_MAX} characters"
        )));
    }
    Ok(())
}

impl Bank {
    /// Replaces the caller's password after checking the old one. Every
    /// other session of the caller is logged out; this one survives.
    ///
    /// A wrong old password does not count toward login lockout.
    pub fn change_password(&self, token: &str, old_password: &str, new_password: &str) -> Result<()> {
        let principal = self.authenticate(token)?;
        validate_new_password(new_password)?;
        let (username, credential) = self.read(|s| {
            let username = s
                .usernames
                .iter()
                .find(|(_, e)| e.principal_id == principal.id)
                .map(|(u, _)| u.clone());
            (username, s.credentials.get(&principal.id).cloned())
        });
        let (Some(username), Some(credential)) = (username, credential) else {
            return Err(crate::auth::unauthenticated());
        };
        if !credential.verify(old_password) {
            return Err(bad_credentials());
        }
        let fresh = Credential::create(principal.id, new_password, self.fresh_salt(), self.hash_params)?;
        self.mutate(|_, _| {
            Ok((
                vec![
                    Event::CredentialSet {
                        principal_id: principal.id,
                        username,
                        role: principal.role,
                        credential: fresh,
                    },
                    Event::audit(principal.id, "change_password", None),
                ],
                (),
            ))
        })?;
        self.auth.lock().invalidate_others(principal.id, token);
        Ok(())
    }

    pub fn update_contact(&self, token: &str, update: &ContactUpdate) -> Result<CustomerProfile> {
        let principal = self.authenticate(token)?;
        let PrincipalId::Customer(customer_id) = principal.id else {
            return Err(forbidden());
        };
        debug_assert_eq!(principal.role, Role::Customer);
        if update.email.is_none() && update.phone.is_none() && update.postal_address.is_none() {
            return Err(BankError::validation("at least one contact field is required"));
        }
        if let Some(email) = &update.email {
            validate_email(email)?;
        }
        if let Some(phone) = &update.phone {
            validate_contact_field("phone", phone)?;
        }
        if let Some(addr) = &update.postal_address {
            validate_contact_field("postal_address", addr)?;
        }
        self.mutate(|state, _| {
            let mut profile = state
                .customers
                .get(&customer_id)
                .cloned()
                .ok_or_else(crate::auth::unauthenticated)?;
            if let Some(email) = &update.email {
                profile.email = email.clone();
            }
            if let Some(phone) = &update.phone {
                profile.phone = phone.clone();
            }
            if let Some(addr) = &update.postal_address {
                profile.postal_address = addr.clone();
            }
            Ok((
                vec![
                    Event::ProfileUpdated {
                        customer_id,
                        email: profile.email.clone(),
                        phone: profile.phone.clone(),
                        postal_address: profile.postal_address.clone(),
                    },
                    Event::audit(principal.id, "update_contact", None),
                ],
                profile,
            ))
        })
    }

    pub fn profile(&self, token: &str) -> Result<CustomerProfile> {
        let principal = self.authenticate(token)?;
        let PrincipalId::Customer(id) = principal.id else {
            return Err(forbidden());
        };
        self.read(|s| s.customers.get(&id).cloned())
            .ok_or_else(crate::auth::unauthenticated)
    }
}
