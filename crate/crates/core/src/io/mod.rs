//! N-Quads ingestion, version manifests and binary store snapshots.

mod manifest;
mod nquads;
mod snapshot;

pub use manifest::{load_manifest, load_manifest_file, VersionManifest};
pub use nquads::{parse_nquads, TermQuad};
pub use snapshot::{decode_snapshot, encode_snapshot, load_snapshot, save_snapshot, FORMAT_VERSION, MAGIC};

use std::path::PathBuf;

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
    #[error("unsupported snapshot format version {0}")]
    UnsupportedFormat(u8),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.into(),
            source,
        }
    }
}
