//! One canonical text file per factsheet, plus a sidecar metadata file
//! and an in-memory index.
//!
//! ```text
//! <dir>/<id>.efs          canonical text
//! <dir>/.meta/<id>.json   {"revision": 3, "updated_at": "...", "sha256": "..."}
//! ```
//!
//! Every write goes to a temporary file in the same directory and is
//! renamed into place, so readers never see a torn document. Temporaries
//! left behind by a crash are removed when the store is opened.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use efs_core::model::VocabId;
use efs_core::{catalog, completeness, parse_canonical, serialize_canonical, Factsheet, QuestionId};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const META_DIR: &str = ".meta";
const EXTENSION: &str = "efs";
const TEMP_PREFIX: &str = ".tmp";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("`{0}` is not a valid id: use 1 to 64 of a-z, 0-9 and -")]
    InvalidId(String),
    #[error("no factsheet with id `{0}`")]
    NotFound(String),
    #[error("revision conflict on `{id}`: expected {expected}, current is {current}")]
    Conflict { id: String, expected: u64, current: u64 },
    #[error("factsheet is structurally invalid: {0}")]
    Invalid(String),
    #[error("storage failure at {path}: {message}")]
    StorageFailure { path: PathBuf, message: String },
}

impl StoreError {
    fn storage(path: &Path, err: impl std::fmt::Display) -> Self {
        StoreError::StorageFailure {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoreEntry {
    pub id: String,
    pub revision: u64,
    pub updated_at: DateTime<Utc>,
    pub factsheet: Factsheet,
}

/// Summary row returned by [`Store::list`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ListItem {
    pub id: String,
    pub title: Option<String>,
    pub completeness: f64,
    pub revision: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Meta {
    revision: u64,
    updated_at: DateTime<Utc>,
    sha256: String,
}

/// `Qid:token`, matching sheets whose answer to the question holds the token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Filter {
    pub question_id: QuestionId,
    pub token: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("filter must look like `M1:model_llm`, got `{0}`")]
    Malformed(String),
    #[error("unknown question id `{0}`")]
    UnknownQuestion(String),
    #[error("question {0} has no vocabulary to filter on")]
    NotVocabulary(QuestionId),
    #[error("`{token}` is not a {vocabulary} token")]
    UnknownToken { token: String, vocabulary: &'static str },
}

impl FromStr for Filter {
    type Err = FilterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (q, token) = s
            .split_once(':')
            .or_else(|| s.split_once('='))
            .ok_or_else(|| FilterError::Malformed(s.to_string()))?;
        let question_id: QuestionId = q
            .parse()
            .map_err(|_| FilterError::UnknownQuestion(q.trim().to_string()))?;
        let vocab: VocabId = catalog()
            .get(question_id)
            .vocabulary
            .ok_or(FilterError::NotVocabulary(question_id))?;
        let token = token.trim();
        let term = vocab
            .terms()
            .iter()
            .find(|t| t.token == token)
            .ok_or_else(|| FilterError::UnknownToken {
                token: token.to_string(),
                vocabulary: vocab.name(),
            })?;
        Ok(Filter {
            question_id,
            token: term.token,
        })
    }
}

impl Filter {
    pub fn matches(&self, fs: &Factsheet) -> bool {
        fs.answer(self.question_id)
            .is_some_and(|a| a.tokens().contains(&self.token))
    }
}

pub fn is_valid_id(id: &str) -> bool {
    (1..=64).contains(&id.len())
        && id
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

type Index = BTreeMap<String, Arc<StoreEntry>>;

/// File-backed store. Reads take a snapshot of the index; writes are
/// serialized per id and publish a new snapshot when done.
pub struct Store {
    dir: PathBuf,
    index: RwLock<Arc<Index>>,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("dir", &self.dir).finish_non_exhaustive()
    }
}

impl Store {
    /// Opens (creating if needed) the store at `dir`, removes stale
    /// temporaries and indexes every `.efs` file.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let dir = dir.into();
        let meta_dir = dir.join(META_DIR);
        fs::create_dir_all(&meta_dir).map_err(|e| StoreError::storage(&meta_dir, e))?;
        remove_temporaries(&dir)?;
        remove_temporaries(&meta_dir)?;

        let mut index = Index::new();
        for entry in fs::read_dir(&dir).map_err(|e| StoreError::storage(&dir, e))? {
            let path = entry.map_err(|e| StoreError::storage(&dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some(EXTENSION) {
                continue;
            }
            let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if !is_valid_id(id) {
                continue;
            }
            let loaded = load_entry(&dir, id)?;
            index.insert(id.to_string(), Arc::new(loaded));
        }
        Ok(Store {
            dir,
            index: RwLock::new(Arc::new(index)),
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn snapshot(&self) -> Arc<Index> {
        self.index.read().unwrap().clone()
    }

    fn lock_for(&self, id: &str) -> Arc<Mutex<()>> {
        self.locks
            .lock()
            .unwrap()
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    fn publish(&self, id: &str, entry: Option<Arc<StoreEntry>>) {
        let mut guard = self.index.write().unwrap();
        let mut next = (**guard).clone();
        match entry {
            Some(e) => next.insert(id.to_string(), e),
            None => next.remove(id),
        };
        *guard = Arc::new(next);
    }

    pub fn get(&self, id: &str) -> Result<Arc<StoreEntry>, StoreError> {
        if !is_valid_id(id) {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        self.snapshot()
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    /// Entries sorted by id, optionally restricted by `filter`.
    pub fn list(&self, filter: Option<&Filter>) -> Vec<ListItem> {
        self.snapshot()
            .values()
            .filter(|e| filter.is_none_or(|f| f.matches(&e.factsheet)))
            .map(|e| ListItem {
                id: e.id.clone(),
                title: e.factsheet.context.title.clone(),
                completeness: completeness(&e.factsheet).overall,
                revision: e.revision,
            })
            .collect()
    }

    pub fn all(&self) -> Vec<Factsheet> {
        self.snapshot().values().map(|e| e.factsheet.clone()).collect()
    }

    /// Writes `fs` under `id`. With `expected_revision`, the write only
    /// happens if the stored revision (0 when absent) still matches.
    pub fn put(
        &self,
        id: &str,
        fs: Factsheet,
        expected_revision: Option<u64>,
    ) -> Result<Arc<StoreEntry>, StoreError> {
        if !is_valid_id(id) {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        let violations = fs.violations();
        if !violations.is_empty() {
            let text: Vec<String> = violations
                .iter()
                .map(|v| format!("{}: {}", v.field, v.message))
                .collect();
            return Err(StoreError::Invalid(text.join("; ")));
        }
        let lock = self.lock_for(id);
        let _held = lock.lock().unwrap();

        let current = self.snapshot().get(id).map_or(0, |e| e.revision);
        if let Some(expected) = expected_revision {
            if expected != current {
                return Err(StoreError::Conflict {
                    id: id.to_string(),
                    expected,
                    current,
                });
            }
        }
        let text = serialize_canonical(&fs);
        let meta = Meta {
            revision: current + 1,
            updated_at: Utc::now(),
            sha256: digest(&text),
        };
        write_atomic(&self.dir, &self.efs_path(id), text.as_bytes())?;
        let meta_json = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
        write_atomic(&self.dir.join(META_DIR), &self.meta_path(id), &meta_json)?;

        let entry = Arc::new(StoreEntry {
            id: id.to_string(),
            revision: meta.revision,
            updated_at: meta.updated_at,
            factsheet: fs,
        });
        self.publish(id, Some(entry.clone()));
        Ok(entry)
    }

    pub fn delete(&self, id: &str, expected_revision: Option<u64>) -> Result<(), StoreError> {
        if !is_valid_id(id) {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        let lock = self.lock_for(id);
        let _held = lock.lock().unwrap();
        let current = self
            .snapshot()
            .get(id)
            .map(|e| e.revision)
            .ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        if let Some(expected) = expected_revision.filter(|e| *e != current) {
            return Err(StoreError::Conflict {
                id: id.to_string(),
                expected,
                current,
            });
        }
        let path = self.efs_path(id);
        fs::remove_file(&path).map_err(|e| StoreError::storage(&path, e))?;
        let meta = self.meta_path(id);
        match fs::remove_file(&meta) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(StoreError::storage(&meta, e)),
        }
        self.publish(id, None);
        Ok(())
    }

    fn efs_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.{EXTENSION}"))
    }

    fn meta_path(&self, id: &str) -> PathBuf {
        self.dir.join(META_DIR).join(format!("{id}.json"))
    }
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn write_atomic(dir: &Path, target: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let mut tmp = tempfile::Builder::new()
        .prefix(TEMP_PREFIX)
        .tempfile_in(dir)
        .map_err(|e| StoreError::storage(dir, e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| StoreError::storage(tmp.path(), e))?;
    tmp.persist(target)
        .map_err(|e| StoreError::storage(target, e.error))?;
    Ok(())
}

fn remove_temporaries(dir: &Path) -> Result<(), StoreError> {
    for entry in fs::read_dir(dir).map_err(|e| StoreError::storage(dir, e))? {
        let entry = entry.map_err(|e| StoreError::storage(dir, e))?;
        let name = entry.file_name();
        if name.to_string_lossy().starts_with(TEMP_PREFIX) && entry.path().is_file() {
            fs::remove_file(entry.path()).map_err(|e| StoreError::storage(&entry.path(), e))?;
        }
    }
    Ok(())
}

/// Reads one document and reconciles it with its metadata. A file edited
/// outside the store (hash mismatch) gets the next revision; one without
/// metadata starts at revision 1.
fn load_entry(dir: &Path, id: &str) -> Result<StoreEntry, StoreError> {
    let path = dir.join(format!("{id}.{EXTENSION}"));
    let text = fs::read_to_string(&path).map_err(|e| StoreError::storage(&path, e))?;
    let factsheet = parse_canonical(&text).map_err(|errs| {
        let first = &errs[0];
        StoreError::storage(&path, first)
    })?;
    let meta_path = dir.join(META_DIR).join(format!("{id}.json"));
    let meta: Option<Meta> = fs::read(&meta_path)
        .ok()
        .and_then(|bytes| serde_json::from_slice(&bytes).ok());
    let modified = || -> DateTime<Utc> {
        fs::metadata(&path)
            .and_then(|m| m.modified())
            .map(DateTime::<Utc>::from)
            .unwrap_or_else(|_| Utc::now())
    };
    let (revision, updated_at) = match meta {
        Some(m) if m.sha256 == digest(&text) => (m.revision.max(1), m.updated_at),
        Some(m) => (m.revision + 1, modified()),
        None => (1, modified()),
    };
    Ok(StoreEntry {
        id: id.to_string(),
        revision,
        updated_at,
        factsheet,
    })
}
