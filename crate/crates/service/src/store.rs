//! In-memory session storage with optional write-through snapshots.
//!
//! With a snapshot directory configured, every mutation is applied to a
//! copy of the session, the copy is written to `<dir>/<id>.json`, and only
//! then does it replace the stored session. A failed write leaves the
//! session unchanged.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use thiserror::Error;
use vocab_expander::{ModelRegistry, Session, SessionSnapshot};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no session with id {0:?}")]
    NotFound(String),
    #[error(transparent)]
    Session(#[from] vocab_expander::Error),
    #[error("snapshot {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot restore {path}: {source}")]
    Restore {
        path: PathBuf,
        #[source]
        source: vocab_expander::Error,
    },
}

type Shared = Arc<Mutex<Session>>;

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Shared>>,
    snapshot_dir: Option<PathBuf>,
}

fn lock(cell: &Shared) -> MutexGuard<'_, Session> {
    // Sessions are only replaced wholesale after a successful mutation, so
    // a poisoned lock still guards a consistent session.
    cell.lock().unwrap_or_else(|e| e.into_inner())
}

impl SessionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) a snapshot directory and restores every
    /// `*.json` session in it.
    pub fn persistent(
        dir: impl Into<PathBuf>,
        registry: &ModelRegistry,
    ) -> Result<Self, StoreError> {
        let dir = dir.into();
        let io = |path: &Path| {
            let path = path.to_owned();
            move |source| StoreError::Io { path, source }
        };
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        let mut sessions = HashMap::new();
        let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(io(&dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        entries.sort();
        for path in entries {
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_owned) else {
                continue;
            };
            let text = fs::read_to_string(&path).map_err(io(&path))?;
            let restore = |source| StoreError::Restore {
                path: path.clone(),
                source,
            };
            let snapshot = SessionSnapshot::from_json(&text).map_err(restore)?;
            let session =
                Session::from_snapshot(id.clone(), &snapshot, registry).map_err(restore)?;
            sessions.insert(id, Arc::new(Mutex::new(session)));
        }
        log::info!(
            "restored {} session(s) from {}",
            sessions.len(),
            dir.display()
        );
        Ok(SessionStore {
            sessions: RwLock::new(sessions),
            snapshot_dir: Some(dir),
        })
    }

    pub fn snapshot_dir(&self) -> Option<&Path> {
        self.snapshot_dir.as_deref()
    }

    pub fn len(&self) -> usize {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, id: &str) -> Result<Shared, StoreError> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_owned()))
    }

    /// Persists and registers a new session.
    pub fn insert(&self, session: Session) -> Result<(), StoreError> {
        self.persist(&session)?;
        let id = session.id().to_owned();
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(())
    }

    pub fn read<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T, StoreError> {
        let cell = self.get(id)?;
        let guard = lock(&cell);
        Ok(f(&guard))
    }

    /// Applies `f` under the session's lock. The result is persisted before
    /// it becomes visible; on any error the session is left untouched.
    pub fn update<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> Result<T, vocab_expander::Error>,
    ) -> Result<T, StoreError> {
        let cell = self.get(id)?;
        let mut guard = lock(&cell);
        let mut next = guard.clone();
        let out = f(&mut next)?;
        self.persist(&next)?;
        *guard = next;
        Ok(out)
    }

    /// Replaces a session wholesale, keeping its id.
    pub fn replace(&self, id: &str, session: Session) -> Result<(), StoreError> {
        debug_assert_eq!(session.id(), id);
        let cell = self.get(id)?;
        let mut guard = lock(&cell);
        self.persist(&session)?;
        *guard = session;
        Ok(())
    }

    fn persist(&self, session: &Session) -> Result<(), StoreError> {
        let Some(dir) = &self.snapshot_dir else {
            return Ok(());
        };
        let path = dir.join(format!("{}.json", session.id()));
        let tmp = dir.join(format!("{}.json.tmp", session.id()));
        let io = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        let mut file = File::create(&tmp).map_err(io)?;
        file.write_all(session.export_snapshot().to_json().as_bytes())
            .map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        // Make the rename itself durable; not every platform allows
        // syncing a directory handle.
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
        Ok(())
    }
}
