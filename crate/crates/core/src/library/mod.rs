//! Named document sets with set algebra, an append-only audit log and a
//! line-oriented snapshot format.

mod key;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::{Clock, SystemClock};
use crate::corpus::LibraryResolver;

pub use key::{generate_key, is_valid_key, KEY_LEN};

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("unknown library {0}")]
    UnknownLibraryKey(String),
    #[error("library name must not be empty")]
    EmptyName,
    #[error("`{0}` is not a valid library key")]
    InvalidKey(String),
    #[error("library key {0} already exists")]
    DuplicateKey(String),
    #[error("library name `{0}` is ambiguous; use its key")]
    AmbiguousName(String),
    #[error("libraries {a} and {b} are mutually exclusive; rejected {bibcodes:?}")]
    ExclusiveConflict {
        a: String,
        b: String,
        bibcodes: Vec<String>,
    },
    #[error("a library cannot be exclusive with itself")]
    SelfExclusive,
    #[error("snapshot I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Library {
    pub key: String,
    pub name: String,
    pub description: String,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub members: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

impl SetOp {
    pub fn parse(s: &str) -> Option<SetOp> {
        match s.to_ascii_lowercase().as_str() {
            "union" => Some(SetOp::Union),
            "intersection" | "intersect" => Some(SetOp::Intersection),
            "difference" | "diff" => Some(SetOp::Difference),
            _ => None,
        }
    }

    pub fn apply(self, a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
        match self {
            SetOp::Union => a.union(b).cloned().collect(),
            SetOp::Intersection => a.intersection(b).cloned().collect(),
            SetOp::Difference => a.difference(b).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AuditOp {
    Create {
        key: String,
        name: String,
        description: String,
    },
    Add {
        key: String,
        bibcodes: Vec<String>,
        changed: usize,
    },
    Remove {
        key: String,
        bibcodes: Vec<String>,
        changed: usize,
    },
    Exclusive {
        a: String,
        b: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub seq: u64,
    pub at: DateTime<Utc>,
    pub who: String,
    #[serde(flatten)]
    pub op: AuditOp,
}

/// All libraries plus the mutation log that produced them.
///
/// Every mutation goes through `&mut self`, so one writer at a time is
/// enforced by the borrow checker; share across threads behind a `RwLock`.
#[derive(Clone)]
pub struct Catalog {
    libraries: BTreeMap<String, Library>,
    audit: Vec<AuditEntry>,
    exclusive: Vec<(String, String)>,
    actor: String,
    clock: Arc<dyn Clock>,
}

impl fmt::Debug for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Catalog")
            .field("libraries", &self.libraries)
            .field("audit", &self.audit.len())
            .field("exclusive", &self.exclusive)
            .finish()
    }
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.libraries == other.libraries
            && self.audit == other.audit
            && self.exclusive == other.exclusive
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog::new()
    }
}

impl Catalog {
    pub fn new() -> Self {
        Catalog::with_clock(Arc::new(SystemClock))
    }

    pub fn with_clock(clock: Arc<dyn Clock>) -> Self {
        Catalog {
            libraries: BTreeMap::new(),
            audit: Vec::new(),
            exclusive: Vec::new(),
            actor: "local".into(),
            clock,
        }
    }

    /// Name recorded as `who` on subsequent audit entries.
    pub fn set_actor(&mut self, actor: impl Into<String>) {
        self.actor = actor.into();
    }

    pub fn set_clock(&mut self, clock: Arc<dyn Clock>) {
        self.clock = clock;
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn libraries(&self) -> impl Iterator<Item = &Library> {
        self.libraries.values()
    }

    pub fn len(&self) -> usize {
        self.libraries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.libraries.is_empty()
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    pub fn exclusive_pairs(&self) -> &[(String, String)] {
        &self.exclusive
    }

    pub fn get(&self, key: &str) -> Option<&Library> {
        self.libraries.get(key)
    }

    pub fn members(&self, key: &str) -> Result<&BTreeSet<String>, LibraryError> {
        self.get(key)
            .map(|l| &l.members)
            .ok_or_else(|| LibraryError::UnknownLibraryKey(key.to_string()))
    }

    /// Looks a library up by key, falling back to a unique name match.
    pub fn resolve(&self, key_or_name: &str) -> Result<&Library, LibraryError> {
        if let Some(l) = self.libraries.get(key_or_name) {
            return Ok(l);
        }
        let mut named = self.libraries.values().filter(|l| l.name == key_or_name);
        match (named.next(), named.next()) {
            (Some(l), None) => Ok(l),
            (Some(_), Some(_)) => Err(LibraryError::AmbiguousName(key_or_name.to_string())),
            _ => Err(LibraryError::UnknownLibraryKey(key_or_name.to_string())),
        }
    }

    /// Creates an empty library under a fresh random key.
    pub fn create_library(
        &mut self,
        name: &str,
        description: &str,
    ) -> Result<String, LibraryError> {
        let mut rng = rand::rng();
        let key = loop {
            let k = generate_key(&mut rng);
            if !self.libraries.contains_key(&k) {
                break k;
            }
        };
        self.create_library_with_key(&key, name, description)?;
        Ok(key)
    }

    /// Creates an empty library under a caller-chosen key, e.g. one issued
    /// by a remote service.
    pub fn create_library_with_key(
        &mut self,
        key: &str,
        name: &str,
        description: &str,
    ) -> Result<(), LibraryError> {
        if name.trim().is_empty() {
            return Err(LibraryError::EmptyName);
        }
        if !is_valid_key(key) {
            return Err(LibraryError::InvalidKey(key.to_string()));
        }
        if self.libraries.contains_key(key) {
            return Err(LibraryError::DuplicateKey(key.to_string()));
        }
        self.commit(AuditOp::Create {
            key: key.to_string(),
            name: name.to_string(),
            description: description.to_string(),
        })?;
        Ok(())
    }

    /// Adds members; returns how many were new. Re-adding is a no-op.
    pub fn add_members<I, S>(&mut self, key: &str, bibcodes: I) -> Result<usize, LibraryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let bibcodes: Vec<String> = bibcodes.into_iter().map(Into::into).collect();
        self.members(key)?;
        self.check_exclusive(key, &bibcodes)?;
        self.commit(AuditOp::Add {
            key: key.to_string(),
            changed: 0,
            bibcodes,
        })
    }

    /// Removes members; returns how many were present.
    pub fn remove_members<I, S>(&mut self, key: &str, bibcodes: I) -> Result<usize, LibraryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let bibcodes: Vec<String> = bibcodes.into_iter().map(Into::into).collect();
        self.members(key)?;
        self.commit(AuditOp::Remove {
            key: key.to_string(),
            changed: 0,
            bibcodes,
        })
    }

    /// Declares two libraries mutually exclusive: later adds that would make
    /// them overlap are rejected. Fails if they already overlap.
    pub fn set_exclusive(&mut self, a: &str, b: &str) -> Result<(), LibraryError> {
        if a == b {
            return Err(LibraryError::SelfExclusive);
        }
        let overlap: Vec<String> = self
            .members(a)?
            .intersection(self.members(b)?)
            .cloned()
            .collect();
        if !overlap.is_empty() {
            return Err(LibraryError::ExclusiveConflict {
                a: a.to_string(),
                b: b.to_string(),
                bibcodes: overlap,
            });
        }
        if self.is_exclusive(a, b) {
            return Ok(());
        }
        self.commit(AuditOp::Exclusive {
            a: a.to_string(),
            b: b.to_string(),
        })?;
        Ok(())
    }

    pub fn is_exclusive(&self, a: &str, b: &str) -> bool {
        self.exclusive
            .iter()
            .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    /// Pure set operation over two libraries; neither input changes.
    pub fn set_op(&self, op: SetOp, a: &str, b: &str) -> Result<BTreeSet<String>, LibraryError> {
        Ok(op.apply(self.members(a)?, self.members(b)?))
    }

    /// Stores `members` as a new library and returns its key.
    pub fn materialize(
        &mut self,
        name: &str,
        description: &str,
        members: BTreeSet<String>,
    ) -> Result<String, LibraryError> {
        let key = self.create_library(name, description)?;
        if !members.is_empty() {
            self.add_members(&key, members)?;
        }
        Ok(key)
    }

    fn check_exclusive(&self, key: &str, bibcodes: &[String]) -> Result<(), LibraryError> {
        for (x, y) in &self.exclusive {
            let other = if x == key {
                y
            } else if y == key {
                x
            } else {
                continue;
            };
            let others = self.members(other)?;
            let clash: Vec<String> = bibcodes
                .iter()
                .filter(|b| others.contains(*b))
                .cloned()
                .collect();
            if !clash.is_empty() {
                return Err(LibraryError::ExclusiveConflict {
                    a: key.to_string(),
                    b: other.clone(),
                    bibcodes: clash,
                });
            }
        }
        Ok(())
    }

    fn commit(&mut self, op: AuditOp) -> Result<usize, LibraryError> {
        let entry = AuditEntry {
            seq: self.audit.len() as u64 + 1,
            at: self.clock.now(),
            who: self.actor.clone(),
            op,
        };
        let (changed, entry) = self.apply(entry)?;
        self.audit.push(entry);
        Ok(changed)
    }

    /// Applies one entry to the state. `changed` counts are recomputed and
    /// written back into the entry.
    fn apply(&mut self, mut entry: AuditEntry) -> Result<(usize, AuditEntry), LibraryError> {
        let at = entry.at;
        let changed = match &mut entry.op {
            AuditOp::Create {
                key,
                name,
                description,
            } => {
                if self.libraries.contains_key(key.as_str()) {
                    return Err(LibraryError::DuplicateKey(key.clone()));
                }
                self.libraries.insert(
                    key.clone(),
                    Library {
                        key: key.clone(),
                        name: name.clone(),
                        description: description.clone(),
                        created_at: at,
                        updated_at: at,
                        members: BTreeSet::new(),
                    },
                );
                0
            }
            AuditOp::Add {
                key,
                bibcodes,
                changed,
            } => {
                let lib = self
                    .libraries
                    .get_mut(key.as_str())
                    .ok_or_else(|| LibraryError::UnknownLibraryKey(key.clone()))?;
                let n = bibcodes
                    .iter()
                    .filter(|b| lib.members.insert((*b).clone()))
                    .count();
                if n > 0 {
                    lib.updated_at = at;
                }
                *changed = n;
                n
            }
            AuditOp::Remove {
                key,
                bibcodes,
                changed,
            } => {
                let lib = self
                    .libraries
                    .get_mut(key.as_str())
                    .ok_or_else(|| LibraryError::UnknownLibraryKey(key.clone()))?;
                let n = bibcodes.iter().filter(|b| lib.members.remove(*b)).count();
                if n > 0 {
                    lib.updated_at = at;
                }
                *changed = n;
                n
            }
            AuditOp::Exclusive { a, b } => {
                self.exclusive.push((a.clone(), b.clone()));
                0
            }
        };
        Ok((changed, entry))
    }

    /// Rebuilds a catalog from its audit log alone.
    pub fn replay(entries: &[AuditEntry]) -> Result<Catalog, LibraryError> {
        let mut catalog = Catalog::new();
        for (i, entry) in entries.iter().enumerate() {
            if entry.seq != i as u64 + 1 {
                return Err(LibraryError::CorruptSnapshot(format!(
                    "audit sequence gap at entry {}",
                    i + 1
                )));
            }
            let (_, applied) = catalog.apply(entry.clone())?;
            if applied != *entry {
                return Err(LibraryError::CorruptSnapshot(format!(
                    "audit entry {} does not replay to the recorded change count",
                    entry.seq
                )));
            }
            catalog.audit.push(applied);
        }
        Ok(catalog)
    }
}

impl LibraryResolver for Catalog {
    fn library_members(&self, key: &str) -> Option<&BTreeSet<String>> {
        self.libraries.get(key).map(|l| &l.members)
    }

    /// `bibgroup:NAME` resolves to the first library (by key) whose name
    /// equals NAME, ignoring case.
    fn bibgroup_members(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.libraries
            .values()
            .find(|l| l.name.eq_ignore_ascii_case(name))
            .map(|l| &l.members)
    }
}
