//! Import and export: versioned JSON snapshots and plain term lists.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Session, SessionParams, TermRecord};
use crate::ensemble::ModelRegistry;
use crate::error::{Error, Result};
use crate::term::{display_form, normalize_term};

pub const SNAPSHOT_FORMAT_VERSION: u64 = 1;

/// Serializable session state. Suggestions are left out; they are
/// recomputed from the accepted and rejected terms on import.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub format_version: u64,
    pub params: SessionParams,
    pub accepted: Vec<TermRecord>,
    pub rejected: Vec<TermRecord>,
}

impl SessionSnapshot {
    /// Parses snapshot JSON, checking the format version before the rest of
    /// the payload.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedSnapshot(e.to_string()))?;
        let version = value
            .get("format_version")
            .ok_or_else(|| Error::MalformedSnapshot("missing format_version".into()))?
            .as_u64()
            .ok_or_else(|| Error::MalformedSnapshot("format_version is not an integer".into()))?;
        if version != SNAPSHOT_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        serde_json::from_value(value).map_err(|e| Error::MalformedSnapshot(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serialization is infallible")
    }
}

impl Session {
    pub fn export_snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            format_version: SNAPSHOT_FORMAT_VERSION,
            params: self.params.clone(),
            accepted: self.accepted(),
            rejected: self.rejected(),
        }
    }

    /// Rebuilds a session (with a fresh id) from a snapshot.
    pub fn import_snapshot(snapshot: &SessionSnapshot, registry: &ModelRegistry) -> Result<Self> {
        Self::from_snapshot(
            uuid::Uuid::new_v4().simple().to_string(),
            snapshot,
            registry,
        )
    }

    /// Rebuilds a session under a known id.
    pub fn from_snapshot(
        id: String,
        snapshot: &SessionSnapshot,
        registry: &ModelRegistry,
    ) -> Result<Self> {
        if snapshot.format_version != SNAPSHOT_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(snapshot.format_version));
        }
        let mut session = Session::with_id(id, snapshot.params.clone(), registry)?;
        let mut seen = HashSet::new();
        let mut checked = |r: &TermRecord| -> Result<(String, String)> {
            let key = normalize_term(&r.term)
                .map_err(|_| Error::MalformedSnapshot(format!("empty term {:?}", r.term)))?;
            if key != r.term {
                return Err(Error::MalformedSnapshot(format!(
                    "term {:?} is not normalized",
                    r.term
                )));
            }
            if !seen.insert(key.clone()) {
                return Err(Error::MalformedSnapshot(format!(
                    "term {key:?} listed twice"
                )));
            }
            let display = match r.display.trim() {
                "" => display_form(&key),
                d => d.to_owned(),
            };
            Ok((key, display))
        };
        let accepted = snapshot
            .accepted
            .iter()
            .map(&mut checked)
            .collect::<Result<Vec<_>>>()?;
        let rejected = snapshot
            .rejected
            .iter()
            .map(&mut checked)
            .collect::<Result<Vec<_>>>()?;

        for (key, display) in rejected {
            session.rejected.insert(key, display);
        }
        for (key, display) in accepted {
            session.insert_accepted(key, display);
        }
        session.recompute();
        Ok(session)
    }

    /// Display forms of the accepted terms, one per line.
    pub fn export_term_list(&self) -> String {
        self.accepted
            .values()
            .map(|display| format!("{display}\n"))
            .collect()
    }

    /// Accepts every non-blank line of `text`, in order.
    pub fn accept_term_list(&mut self, text: &str) -> Result<()> {
        let mut changed = false;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let key = normalize_term(line)?;
            if !self.accepted.contains_key(&key) {
                self.insert_accepted(key, super::display_input(line));
                changed = true;
            }
        }
        if changed {
            self.recompute();
        }
        Ok(())
    }

    /// A new session that has accepted every line of `text`.
    pub fn import_term_list(
        text: &str,
        params: SessionParams,
        registry: &ModelRegistry,
    ) -> Result<Self> {
        let mut session = Session::new(params, registry)?;
        session.accept_term_list(text)?;
        Ok(session)
    }
}
