use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::model::{
    condense, CondensedDataset, DatasetBuilder, FlatDataset, METADATA_VERSION_LABEL,
};

use super::nquads::{parse_nquads, TermQuad};
use super::IngestError;

/// Ordered `(label, path)` pairs; position k (from 1) becomes version ordinal k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VersionManifest {
    entries: Vec<(String, PathBuf)>,
}

impl VersionManifest {
    pub fn new(entries: Vec<(String, PathBuf)>) -> Result<Self, IngestError> {
        if entries.is_empty() {
            return Err(IngestError::Manifest("manifest has no versions".into()));
        }
        let mut seen = HashSet::new();
        for (label, _) in &entries {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(IngestError::Manifest(format!("invalid version label {label:?}")));
            }
            if label == METADATA_VERSION_LABEL {
                return Err(IngestError::Manifest(format!(
                    "version label {label} is reserved for metadata"
                )));
            }
            if !seen.insert(label.as_str()) {
                return Err(IngestError::Manifest(format!("duplicate version label {label}")));
            }
        }
        Ok(VersionManifest { entries })
    }

    /// Parses `label<TAB>path` lines; relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, IngestError> {
        let mut entries = Vec::new();
        for (index, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (label, path) = line.split_once('\t').ok_or_else(|| {
                IngestError::Manifest(format!("line {}: expected label<TAB>path", index + 1))
            })?;
            let (label, path) = (label.trim(), path.trim());
            if path.is_empty() {
                return Err(IngestError::Manifest(format!("line {}: empty path", index + 1)));
            }
            entries.push((label.to_owned(), base.join(path)));
        }
        Self::new(entries)
    }

    pub fn read(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn entries(&self) -> &[(String, PathBuf)] {
        &self.entries
    }
}

/// Reads every version file (in parallel), then interns in manifest order.
pub fn load_manifest(
    manifest: &VersionManifest,
) -> Result<(FlatDataset, CondensedDataset), IngestError> {
    let parsed: Vec<Result<Vec<TermQuad>, IngestError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = manifest
            .entries
            .iter()
            .map(|(_, path)| scope.spawn(move || read_version_file(path)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("parser thread panicked"))
            .collect()
    });
    let mut builder = DatasetBuilder::new();
    for ((label, path), quads) in manifest.entries.iter().zip(parsed) {
        let quads = quads?;
        let version = builder.add_version(label.clone())?;
        log::debug!("version {label}: {} quads from {}", quads.len(), path.display());
        for TermQuad { s, p, o, g } in quads {
            builder.insert_terms(s, p, o, g, version)?;
        }
    }
    let flat = builder.build_flat();
    let condensed = condense(&flat);
    Ok((flat, condensed))
}

pub fn load_manifest_file(
    path: &Path,
) -> Result<(FlatDataset, CondensedDataset), IngestError> {
    load_manifest(&VersionManifest::read(path)?)
}

fn read_version_file(path: &Path) -> Result<Vec<TermQuad>, IngestError> {
    let bytes = std::fs::read(path).map_err(|e| IngestError::io(path, e))?;
    parse_nquads(&bytes, &path.to_string_lossy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::flatten;

    #[test]
    fn parses_manifest_lines() {
        let m = VersionManifest::parse("# header\nv:1\ta.nq\n\nv:2\tsub/b.nq\n", Path::new("/d"))
            .unwrap();
        assert_eq!(
            m.entries(),
            &[
                ("v:1".to_owned(), PathBuf::from("/d/a.nq")),
                ("v:2".to_owned(), PathBuf::from("/d/sub/b.nq")),
            ]
        );
    }

    #[test]
    fn rejects_bad_manifests() {
        let base = Path::new(".");
        for text in ["", "# only comments\n", "v:1\ta\nv:1\tb\n", "v:1 a\n", "v:0\ta\n"] {
            assert!(
                matches!(VersionManifest::parse(text, base), Err(IngestError::Manifest(_))),
                "{text:?}"
            );
        }
        let err = VersionManifest::parse("", base).unwrap_err();
        assert!(err.to_string().contains("manifest has no versions"));
    }

    #[test]
    fn one_empty_file_gives_one_version_and_no_rows() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("v1.nq"), "").unwrap();
        std::fs::write(dir.path().join("m.txt"), "v:1\tv1.nq\n").unwrap();
        let (flat, condensed) = load_manifest_file(&dir.path().join("m.txt")).unwrap();
        assert_eq!(flat.catalog().versions.len(), 1);
        assert!(flat.is_empty());
        assert!(condensed.is_empty());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let m = VersionManifest::new(vec![("v:1".into(), "/nonexistent/x.nq".into())]).unwrap();
        assert!(matches!(load_manifest(&m), Err(IngestError::Io { .. })));
    }

    #[test]
    fn loaded_pair_is_consistent() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.nq"), "<s> <p> \"1\" <g> .\n<s> <p> <o> .\n").unwrap();
        std::fs::write(dir.path().join("b.nq"), "<s> <p> \"1\" <g> .\n").unwrap();
        let m = VersionManifest::parse("v:1\ta.nq\nv:2\tb.nq\n", dir.path()).unwrap();
        let (flat, condensed) = load_manifest(&m).unwrap();
        assert_eq!(flat.len(), 3);
        assert_eq!(condensed.len(), 2);
        assert_eq!(condense(&flat), condensed);
        assert_eq!(flatten(&condensed), flat);
    }
}
