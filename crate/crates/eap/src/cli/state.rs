//! Persisted platform state: the aggregate snapshot at `<state>` and the
//! dedup snapshot beside it at `<state>.seen`.

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use eap_core::aggregate::{AggregateConfig, AggregateStore};
use eap_core::ingest::DedupStore;

use super::CliError;

pub fn seen_path(state: &Path) -> PathBuf {
    let mut name = OsString::from(state.as_os_str());
    name.push(".seen");
    PathBuf::from(name)
}

fn read_optional(path: &Path) -> Result<Option<Vec<u8>>, CliError> {
    match fs::read(path) {
        Ok(bytes) => Ok(Some(bytes)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Restores both stores, starting empty when `state` is absent or the
/// files do not exist yet.
pub fn load(
    state: Option<&Path>,
    config: AggregateConfig,
    dedup_capacity: usize,
) -> Result<(AggregateStore, DedupStore), CliError> {
    let Some(state) = state else {
        return Ok((
            AggregateStore::new(config),
            DedupStore::with_capacity(dedup_capacity),
        ));
    };
    let store = match read_optional(state)? {
        Some(bytes) => AggregateStore::restore(&bytes, config).map_err(|e| CliError::State {
            path: state.to_path_buf(),
            detail: e.to_string(),
        })?,
        None => AggregateStore::new(config),
    };
    let seen = seen_path(state);
    let dedup = match read_optional(&seen)? {
        Some(bytes) => {
            DedupStore::restore(&bytes, dedup_capacity).map_err(|e| CliError::State {
                path: seen.clone(),
                detail: e.to_string(),
            })?
        }
        None => DedupStore::with_capacity(dedup_capacity),
    };
    Ok((store, dedup))
}

/// Writes via a temporary sibling and a rename so a crash never leaves a
/// truncated snapshot behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = OsString::from(path.as_os_str());
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn save(state: &Path, store: &AggregateStore, dedup: &DedupStore) -> Result<(), CliError> {
    write_atomic(&seen_path(state), &dedup.snapshot())?;
    write_atomic(state, &store.snapshot())
}
