//! Admin credentials and sessions.
//!
//! Credentials are stored as salted Argon2 hashes. A successful login yields
//! an opaque 128-bit token held in a server-side table; a token expires once
//! it has been idle for longer than the table's TTL.

use std::collections::HashMap;
use std::fmt;
use std::sync::{LazyLock, Mutex};
use std::time::{Duration, Instant};

use argon2::password_hash::rand_core::OsRng;
use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::Argon2;
use rand::RngCore;
use thiserror::Error;

use crate::store::{Store, StoreError};

pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Error)]
pub enum AuthError {
    /// Deliberately the same for an unknown user and a wrong credential.
    #[error("invalid username or credential")]
    InvalidCredentials,
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub fn hash_credential(credential: &str) -> String {
    let salt = SaltString::generate(&mut OsRng);
    Argon2::default()
        .hash_password(credential.as_bytes(), &salt)
        .expect("argon2 with default parameters accepts any input")
        .to_string()
}

/// Verifies in time independent of where the credential first differs.
pub fn verify_credential(stored_hash: &str, credential: &str) -> bool {
    let Ok(parsed) = PasswordHash::new(stored_hash) else {
        return false;
    };
    Argon2::default().verify_password(credential.as_bytes(), &parsed).is_ok()
}

// Unknown usernames are verified against this so they cost the same as a
// wrong credential for a real user.
static DUMMY_HASH: LazyLock<String> = LazyLock::new(|| hash_credential("not-a-real-credential"));

/// Checks a username/credential pair against the store.
pub fn check_admin(store: &Store, username: &str, credential: &str) -> Result<(), AuthError> {
    let stored = store.admin_credential_hash(username)?;
    let (hash, known) = match &stored {
        Some(hash) => (hash.as_str(), true),
        None => (DUMMY_HASH.as_str(), false),
    };
    if verify_credential(hash, credential) && known {
        Ok(())
    } else {
        Err(AuthError::InvalidCredentials)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SessionToken(String);

impl SessionToken {
    fn generate() -> Self {
        let mut bytes = [0u8; 16];
        rand::rng().fill_bytes(&mut bytes);
        SessionToken(bytes.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for SessionToken {
    fn from(s: &str) -> Self {
        SessionToken(s.to_owned())
    }
}

impl fmt::Debug for SessionToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SessionToken(..)")
    }
}

#[derive(Debug)]
struct Session {
    username: String,
    last_seen: Instant,
}

/// Server-side session table with idle expiry.
#[derive(Debug)]
pub struct SessionTable {
    ttl: Duration,
    sessions: Mutex<HashMap<SessionToken, Session>>,
}

impl Default for SessionTable {
    fn default() -> Self {
        SessionTable::new(DEFAULT_SESSION_TTL)
    }
}

impl SessionTable {
    pub fn new(ttl: Duration) -> Self {
        SessionTable { ttl, sessions: Mutex::new(HashMap::new()) }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    /// Verifies the admin and opens a session.
    pub fn login(&self, store: &Store, username: &str, credential: &str) -> Result<SessionToken, AuthError> {
        check_admin(store, username, credential)?;
        Ok(self.issue(username))
    }

    pub fn issue(&self, username: &str) -> SessionToken {
        let token = SessionToken::generate();
        let mut sessions = self.sessions.lock().unwrap();
        let now = Instant::now();
        sessions.retain(|_, s| now.duration_since(s.last_seen) <= self.ttl);
        sessions.insert(token.clone(), Session { username: username.to_owned(), last_seen: now });
        token
    }

    /// Returns the session's username and refreshes its idle timer, or
    /// `None` for unknown and expired tokens.
    pub fn validate(&self, token: &SessionToken) -> Option<String> {
        self.validate_at(token, Instant::now())
    }

    fn validate_at(&self, token: &SessionToken, now: Instant) -> Option<String> {
        let mut sessions = self.sessions.lock().unwrap();
        let session = sessions.get_mut(token)?;
        if now.saturating_duration_since(session.last_seen) > self.ttl {
            sessions.remove(token);
            return None;
        }
        session.last_seen = session.last_seen.max(now);
        Some(session.username.clone())
    }

    pub fn revoke(&self, token: &SessionToken) {
        self.sessions.lock().unwrap().remove(token);
    }
}
