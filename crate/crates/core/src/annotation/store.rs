//! On-disk session store.
//!
//! Layout under the store root:
//!
//! ```text
//! <root>/<session-id>/session.json   snapshot, written once via rename
//! <root>/<session-id>/votes.jsonl    append-only, one VoteRecord per line
//! ```
//!
//! A vote is acknowledged only after its line has been appended and synced.
//! On open, the log is replayed in order (last write wins per term and
//! reviewer); a torn final line left by a crash is truncated away.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock, RwLockReadGuard};

use chrono::Utc;

use super::{
    aggregate, progress, queue, Aggregate, AnnotationError, Judgment, Progress, QueueItem, Result,
    Session, VoteRecord, VoteTable,
};

const SNAPSHOT: &str = "session.json";
const VOTE_LOG: &str = "votes.jsonl";

fn corrupt(path: &Path, reason: impl Into<String>) -> AnnotationError {
    AnnotationError::Corrupt {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

struct State {
    votes: VoteTable,
    log: File,
}

/// One open session. Votes serialize on a write lock; readers see a
/// consistent vote set.
pub struct SessionHandle {
    session: Session,
    state: RwLock<State>,
}

impl SessionHandle {
    pub fn session(&self) -> &Session {
        &self.session
    }

    fn read(&self) -> RwLockReadGuard<'_, State> {
        self.state.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Validates, appends to the log, syncs, then applies.
    pub fn record_vote(
        &self,
        reviewer: &str,
        term: &str,
        judgment: Judgment,
    ) -> Result<VoteRecord> {
        if !self.session.has_reviewer(reviewer) {
            return Err(AnnotationError::UnknownReviewer(reviewer.to_owned()));
        }
        if !self.session.has_term(term) {
            return Err(AnnotationError::UnknownTerm(term.to_owned()));
        }
        let record = VoteRecord {
            term: term.to_owned(),
            reviewer: reviewer.to_owned(),
            judgment,
            recorded_at: Utc::now(),
        };
        let mut line = serde_json::to_vec(&record).expect("vote serializes");
        line.push(b'\n');

        let mut state = self.state.write().unwrap_or_else(|e| e.into_inner());
        state.log.write_all(&line)?;
        state.log.sync_data()?;
        state.votes.apply(record.clone());
        Ok(record)
    }

    pub fn current_vote(&self, term: &str, reviewer: &str) -> Option<VoteRecord> {
        self.read().votes.get(term, reviewer).cloned()
    }

    pub fn votes(&self) -> VoteTable {
        self.read().votes.clone()
    }

    pub fn aggregate(&self) -> Aggregate {
        aggregate(&self.session, &self.read().votes)
    }

    pub fn progress(&self) -> Progress {
        progress(&self.session, &self.read().votes)
    }

    pub fn queue(
        &self,
        reviewer: &str,
        after: Option<&str>,
        limit: usize,
        include_voted: bool,
    ) -> Result<(Vec<QueueItem>, usize)> {
        let state = self.read();
        let items = queue(
            &self.session,
            &state.votes,
            reviewer,
            after,
            limit,
            include_voted,
        )?;
        Ok((items, state.votes.voted_by(reviewer)))
    }
}

/// All sessions under one directory.
pub struct SessionStore {
    root: PathBuf,
    sessions: RwLock<BTreeMap<String, Arc<SessionHandle>>>,
}

impl SessionStore {
    /// Opens (creating if needed) the store and recovers every session in it.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root)?;
        let mut sessions = BTreeMap::new();
        for entry in fs::read_dir(&root)? {
            let dir = entry?.path();
            if !dir.join(SNAPSHOT).is_file() {
                continue;
            }
            let handle = load_session(&dir)?;
            sessions.insert(handle.session.id.clone(), Arc::new(handle));
        }
        Ok(SessionStore {
            root,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn ids(&self) -> Vec<String> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .keys()
            .cloned()
            .collect()
    }

    pub fn get(&self, id: &str) -> Result<Arc<SessionHandle>> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| AnnotationError::UnknownSession(id.to_owned()))
    }

    /// Persists a new session. Re-inserting an identical snapshot is a no-op;
    /// a different session under the same id is rejected.
    pub fn insert(&self, session: Session) -> Result<Arc<SessionHandle>> {
        let mut sessions = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        let dir = self.root.join(&session.id);
        let mut snapshot = serde_json::to_vec_pretty(&session).expect("session serializes");
        snapshot.push(b'\n');
        if let Some(existing) = sessions.get(&session.id) {
            let on_disk = fs::read(dir.join(SNAPSHOT))?;
            if on_disk == snapshot {
                return Ok(existing.clone());
            }
            return Err(AnnotationError::SessionConflict(session.id));
        }
        fs::create_dir_all(&dir)?;
        let tmp = dir.join(format!("{SNAPSHOT}.tmp"));
        {
            let mut f = File::create(&tmp)?;
            f.write_all(&snapshot)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, dir.join(SNAPSHOT))?;
        sync_dir(&dir);
        let handle = Arc::new(load_session(&dir)?);
        sessions.insert(session.id.clone(), handle.clone());
        Ok(handle)
    }
}

fn sync_dir(dir: &Path) {
    // Directory fsync makes the rename durable on Linux; not all platforms
    // allow opening a directory, so failure here is ignored.
    if let Ok(d) = File::open(dir) {
        let _ = d.sync_all();
    }
}

fn load_session(dir: &Path) -> Result<SessionHandle> {
    let snap_path = dir.join(SNAPSHOT);
    let session: Session = serde_json::from_reader(BufReader::new(File::open(&snap_path)?))
        .map_err(|e| corrupt(&snap_path, e.to_string()))?;

    let log_path = dir.join(VOTE_LOG);
    let mut log = OpenOptions::new()
        .read(true)
        .append(true)
        .create(true)
        .open(&log_path)?;
    let mut votes = VoteTable::default();
    let mut good_len = 0u64;
    {
        let mut reader = BufReader::new(&log);
        let mut buf = Vec::new();
        let mut line_no = 0usize;
        loop {
            buf.clear();
            let n = reader.read_until(b'\n', &mut buf)?;
            if n == 0 {
                break;
            }
            line_no += 1;
            let complete = buf.ends_with(b"\n");
            match serde_json::from_slice::<VoteRecord>(&buf) {
                Ok(v) if complete => {
                    if session.has_reviewer(&v.reviewer) && session.has_term(&v.term) {
                        votes.apply(v);
                    }
                    good_len += n as u64;
                }
                // Only the final, newline-less line can be a torn write.
                _ if !complete => break,
                Ok(_) | Err(_) => {
                    return Err(corrupt(
                        &log_path,
                        format!("unparsable vote at line {line_no}"),
                    ));
                }
            }
        }
    }
    let len = log.metadata()?.len();
    if len != good_len {
        log.set_len(good_len)?;
        log.sync_all()?;
    }
    log.seek(SeekFrom::End(0))?;
    Ok(SessionHandle {
        session,
        state: RwLock::new(State { votes, log }),
    })
}
