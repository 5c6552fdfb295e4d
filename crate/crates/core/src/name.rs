//! Channel names.
//!
//! Two namespaces share the `Name` type. User names come from source text and
//! match `[a-z][a-zA-Z0-9_]*` (with `tau` and `nu` reserved). Internal names
//! start with `#` and are produced by the library itself: `#3` for canonical
//! or freshened binders, `#f0`, `#f1`, ... for reserve pool names. Keeping
//! the namespaces disjoint means freshening can never collide with user input.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::TermError;

/// A channel name. Ordered and hashed by its text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Name(String);

/// Finite set of names, ordered for deterministic iteration.
pub type NameSet = BTreeSet<Name>;

impl Name {
    /// Validates and builds a user-namespace name.
    pub fn new(text: &str) -> Result<Name, TermError> {
        if !is_valid_user_name(text) {
            return Err(TermError::InvalidName { text: text.to_string() });
        }
        Ok(Name(text.to_string()))
    }

    /// Builds an internal name without user-namespace validation.
    /// Accepts both namespaces; used by the parser, which has already lexed
    /// a well-formed name token.
    pub(crate) fn from_token(text: &str) -> Name {
        Name(text.to_string())
    }

    /// The canonical internal name `#k`.
    pub fn internal(k: usize) -> Name {
        Name(format!("#{k}"))
    }

    /// The reserve pool name `#fk`.
    pub fn pool_fresh(k: usize) -> Name {
        Name(format!("#f{k}"))
    }

    /// True for `#`-prefixed names, which never occur in user input positions.
    pub fn is_internal(&self) -> bool {
        self.0.starts_with('#')
    }

    /// For a canonical `#k` name, its index.
    pub(crate) fn internal_index(&self) -> Option<usize> {
        self.0.strip_prefix('#').and_then(|rest| rest.parse().ok())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_valid_user_name(text: &str) -> bool {
    let mut chars = text.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_lowercase());
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && text != "tau"
        && text != "nu"
}

/// Smallest `#k` not contained in `avoid`.
pub fn fresh_name(avoid: &NameSet) -> Name {
    fresh_names(avoid, 1).pop().expect("one fresh name")
}

/// The `count` smallest `#k` names not contained in `avoid`, ascending.
pub fn fresh_names(avoid: &NameSet, count: usize) -> Vec<Name> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count {
        let candidate = Name::internal(k);
        if !avoid.contains(&candidate) {
            out.push(candidate);
        }
        k += 1;
    }
    out
}
