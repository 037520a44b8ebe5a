//! Binary store snapshot: `VRSO`, a format byte, then five length-prefixed sections
//! (dictionary, versions, versioned IRIs, condensed entries, metadata). All integers are
//! little-endian; version sets are stored as their raw 64-bit blocks.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use crate::model::{
    Catalog, CondensedDataset, LiteralKind, Quad, Term, TermDictionary, TermId, VersionId,
    VersionRegistry, VersionSet, VersionedIriRegistry, VersionedQuad, METADATA_VERSION_LABEL,
};

use super::IngestError;

pub const MAGIC: &[u8; 4] = b"VRSO";
pub const FORMAT_VERSION: u8 = 1;

pub fn save_snapshot(dataset: &CondensedDataset, path: &Path) -> Result<(), IngestError> {
    std::fs::write(path, encode_snapshot(dataset)).map_err(|e| IngestError::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<CondensedDataset, IngestError> {
    let bytes = std::fs::read(path).map_err(|e| IngestError::io(path, e))?;
    decode_snapshot(&bytes)
}

pub fn encode_snapshot(dataset: &CondensedDataset) -> Vec<u8> {
    let catalog = dataset.catalog();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(FORMAT_VERSION);

    let mut section = Vec::new();
    put_u32(&mut section, catalog.dictionary.len() as u32);
    for (_, term) in catalog.dictionary.iter() {
        let kind = match term {
            Term::Iri(_) => 0,
            Term::Literal { kind, .. } => match kind {
                LiteralKind::Plain => 1,
                LiteralKind::Numeric => 2,
                LiteralKind::String => 3,
                LiteralKind::Boolean => 4,
            },
        };
        section.push(kind);
        put_str(&mut section, term.lexical());
    }
    put_section(&mut out, &section);

    section.clear();
    let labels: Vec<&str> = catalog.versions.labels().collect();
    put_u32(&mut section, labels.len() as u32);
    for label in labels {
        put_str(&mut section, label);
    }
    put_section(&mut out, &section);

    section.clear();
    put_u32(&mut section, catalog.vi.len() as u32);
    for (vi, version, graph) in catalog.vi.iter() {
        put_u32(&mut section, version.ordinal());
        put_u32(&mut section, graph.get());
        put_u32(&mut section, vi.get());
    }
    put_section(&mut out, &section);

    section.clear();
    put_u32(&mut section, dataset.len() as u32);
    for (quad, versions) in dataset.entries() {
        put_quad(&mut section, quad);
        put_u32(&mut section, versions.blocks().len() as u32);
        for block in versions.blocks() {
            section.extend_from_slice(&block.to_le_bytes());
        }
    }
    put_section(&mut out, &section);

    section.clear();
    put_u32(&mut section, dataset.metadata().len() as u32);
    for row in dataset.metadata() {
        put_quad(&mut section, &row.quad);
        put_u32(&mut section, row.version.ordinal());
    }
    put_section(&mut out, &section);
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<CondensedDataset, IngestError> {
    if bytes.len() < 5 || &bytes[..4] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(IngestError::UnsupportedFormat(bytes[4]));
    }
    let mut outer = Reader { bytes: &bytes[5..] };

    let mut r = outer.section()?;
    let mut dictionary = TermDictionary::new();
    for expected in 1..=r.u32()? {
        let kind = r.u8()?;
        let lexical = r.string()?;
        let term = match kind {
            0 => Term::iri(lexical),
            1 => Term::Literal {
                lexical: lexical.into(),
                kind: LiteralKind::Plain,
            },
            2 => Term::Literal {
                lexical: lexical.into(),
                kind: LiteralKind::Numeric,
            },
            3 => Term::string(lexical),
            4 => Term::Literal {
                lexical: lexical.into(),
                kind: LiteralKind::Boolean,
            },
            k => return Err(corrupt(&format!("unknown term kind {k}"))),
        };
        if dictionary.intern(term).get() != expected {
            return Err(corrupt("duplicate dictionary term"));
        }
    }
    r.finish()?;

    let mut r = outer.section()?;
    let mut versions = VersionRegistry::new();
    let count = r.u32()?;
    for index in 0..count {
        let label = r.string()?;
        if index == 0 {
            if label != METADATA_VERSION_LABEL {
                return Err(corrupt("first version label must be the metadata version"));
            }
        } else {
            versions.register(label)?;
        }
    }
    if count == 0 {
        return Err(corrupt("missing metadata version"));
    }
    r.finish()?;

    let mut r = outer.section()?;
    let mut vi = VersionedIriRegistry::new();
    for _ in 0..r.u32()? {
        let version = VersionId(r.u32()?);
        let graph = r.id(&dictionary)?;
        let iri = r.id(&dictionary)?;
        vi.insert(version, graph, iri)?;
    }
    r.finish()?;

    let mut r = outer.section()?;
    let mut entries = BTreeMap::new();
    for _ in 0..r.u32()? {
        let quad = r.quad(&dictionary)?;
        let blocks = (0..r.u32()?)
            .map(|_| r.u64())
            .collect::<Result<Vec<_>, _>>()?;
        if entries.insert(quad, VersionSet::from_blocks(blocks)).is_some() {
            return Err(corrupt("duplicate condensed entry"));
        }
    }
    r.finish()?;

    let mut r = outer.section()?;
    let mut metadata = BTreeSet::new();
    for _ in 0..r.u32()? {
        let quad = r.quad(&dictionary)?;
        let version = VersionId(r.u32()?);
        metadata.insert(VersionedQuad { quad, version });
    }
    r.finish()?;
    outer.finish()?;

    let catalog = Catalog {
        dictionary,
        versions,
        vi,
    };
    Ok(CondensedDataset::new(Arc::new(catalog), entries, metadata)?)
}

fn corrupt(message: &str) -> IngestError {
    IngestError::CorruptSnapshot(message.to_owned())
}

fn put_u32(out: &mut Vec<u8>, value: u32) {
    out.extend_from_slice(&value.to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, value: &str) {
    put_u32(out, value.len() as u32);
    out.extend_from_slice(value.as_bytes());
}

fn put_quad(out: &mut Vec<u8>, quad: &Quad) {
    for id in [quad.s, quad.p, quad.o, quad.g] {
        put_u32(out, id.get());
    }
}

fn put_section(out: &mut Vec<u8>, section: &[u8]) {
    out.extend_from_slice(&(section.len() as u64).to_le_bytes());
    out.extend_from_slice(section);
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IngestError> {
        if self.bytes.len() < n {
            return Err(corrupt("truncated"));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, IngestError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, IngestError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IngestError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, IngestError> {
        let len = self.u32()? as usize;
        let raw = self.take(len)?;
        String::from_utf8(raw.to_vec()).map_err(|_| corrupt("invalid UTF-8"))
    }

    fn id(&mut self, dictionary: &TermDictionary) -> Result<TermId, IngestError> {
        let raw = self.u32()?;
        TermId::new(raw)
            .filter(|id| dictionary.resolve(*id).is_ok())
            .ok_or_else(|| corrupt(&format!("dangling term id {raw}")))
    }

    fn quad(&mut self, dictionary: &TermDictionary) -> Result<Quad, IngestError> {
        Ok(Quad::new(
            self.id(dictionary)?,
            self.id(dictionary)?,
            self.id(dictionary)?,
            self.id(dictionary)?,
        ))
    }

    fn section(&mut self) -> Result<Reader<'a>, IngestError> {
        let len = self.u64()?;
        let len = usize::try_from(len).map_err(|_| corrupt("section too large"))?;
        Ok(Reader {
            bytes: self.take(len)?,
        })
    }

    fn finish(&self) -> Result<(), IngestError> {
        if self.bytes.is_empty() {
            Ok(())
        } else {
            Err(corrupt("trailing bytes"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DatasetBuilder;

    fn sample() -> CondensedDataset {
        let mut b = DatasetBuilder::new();
        let v1 = b.add_version("v:1").unwrap();
        let v2 = b.add_version("v:2").unwrap();
        for v in [v1, v2] {
            b.insert_terms(
                Term::iri("ex:a"),
                Term::iri("ex:p"),
                Term::string("x"),
                Term::iri("ng:A"),
                v,
            )
            .unwrap();
        }
        b.insert_terms(
            Term::iri("ex:a"),
            Term::iri("ex:p"),
            Term::literal("2.5"),
            Term::iri("ng:B"),
            v2,
        )
        .unwrap();
        b.build_condensed()
    }

    #[test]
    fn round_trip() {
        let d = sample();
        assert_eq!(decode_snapshot(&encode_snapshot(&d)).unwrap(), d);
        let empty = DatasetBuilder::new().build_condensed();
        assert_eq!(decode_snapshot(&encode_snapshot(&empty)).unwrap(), empty);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.vrso");
        let d = sample();
        save_snapshot(&d, &path).unwrap();
        assert_eq!(load_snapshot(&path).unwrap(), d);
    }

    #[test]
    fn rejects_bad_magic_truncation_and_future_formats() {
        let bytes = encode_snapshot(&sample());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_snapshot(&bad), Err(IngestError::CorruptSnapshot(_))));
        for cut in [3, 5, 12, bytes.len() / 2, bytes.len() - 1] {
            assert!(
                matches!(decode_snapshot(&bytes[..cut]), Err(IngestError::CorruptSnapshot(_))),
                "cut at {cut}"
            );
        }
        let mut future = bytes;
        future[4] = 2;
        assert!(matches!(decode_snapshot(&future), Err(IngestError::UnsupportedFormat(2))));
    }
}
