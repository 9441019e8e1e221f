//! Content-addressed run store: `runs/<run_id>.json` documents plus the
//! canonical inputs they reference under `objects/<sha256>.json`.
//!
//! Writes go to a temporary file in the same directory and are renamed into
//! place, so readers never observe a partial document.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::PipelineRun;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no run `{0}` in the store")]
    UnknownRun(String),
    #[error("no object `{0}` in the store")]
    MissingObject(String),
    #[error("{path}: {error}")]
    Io {
        path: PathBuf,
        #[source]
        error: std::io::Error,
    },
    #[error("{path}: {error}")]
    Corrupt {
        path: PathBuf,
        #[source]
        error: serde_json::Error,
    },
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone)]
pub struct RunStore {
    root: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl RunStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        for dir in [root.join("runs"), root.join("objects")] {
            fs::create_dir_all(&dir).map_err(|error| StoreError::Io { path: dir, error })?;
        }
        Ok(RunStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn run_path(&self, run_id: &str) -> PathBuf {
        self.root.join("runs").join(format!("{run_id}.json"))
    }

    fn object_path(&self, hash: &str) -> PathBuf {
        self.root.join("objects").join(format!("{hash}.json"))
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
        let io = |error| StoreError::Io {
            path: path.to_path_buf(),
            error,
        };
        let dir = path.parent().expect("store paths have a parent");
        let tmp = dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(bytes).map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }

    /// Stores canonical input bytes and returns their hash.
    pub fn put_object(&self, bytes: &[u8]) -> Result<String, StoreError> {
        let hash = sha256_hex(bytes);
        let path = self.object_path(&hash);
        if !path.exists() {
            self.write_atomic(&path, bytes)?;
        }
        Ok(hash)
    }

    pub fn get_object(&self, hash: &str) -> Result<Vec<u8>, StoreError> {
        let path = self.object_path(hash);
        fs::read(&path).map_err(|error| {
            if error.kind() == std::io::ErrorKind::NotFound {
                StoreError::MissingObject(hash.to_string())
            } else {
                StoreError::Io { path, error }
            }
        })
    }

    /// Saves `run` unless an identical computation is already stored, in
    /// which case the stored run (with its original timestamp) is returned.
    pub fn persist(&self, run: PipelineRun) -> Result<PipelineRun, StoreError> {
        if let Ok(existing) = self.load(&run.run_id) {
            if existing.same_result(&run) {
                return Ok(existing);
            }
        }
        let bytes = serde_json::to_vec_pretty(&run).expect("runs serialize");
        self.write_atomic(&self.run_path(&run.run_id), &bytes)?;
        Ok(run)
    }

    pub fn load(&self, run_id: &str) -> Result<PipelineRun, StoreError> {
        let path = self.run_path(run_id);
        let bytes = fs::read(&path).map_err(|error| {
            if error.kind() == std::io::ErrorKind::NotFound {
                StoreError::UnknownRun(run_id.to_string())
            } else {
                StoreError::Io {
                    path: path.clone(),
                    error,
                }
            }
        })?;
        serde_json::from_slice(&bytes).map_err(|error| StoreError::Corrupt { path, error })
    }

    /// Run ids in the store, sorted.
    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let dir = self.root.join("runs");
        let mut ids: Vec<String> = fs::read_dir(&dir)
            .map_err(|error| StoreError::Io {
                path: dir.clone(),
                error,
            })?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                e.file_name()
                    .to_str()
                    .and_then(|n| n.strip_suffix(".json"))
                    .map(String::from)
            })
            .collect();
        ids.sort();
        Ok(ids)
    }
}
