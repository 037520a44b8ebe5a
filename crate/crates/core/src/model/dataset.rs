use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::vocab;
use super::{
    ModelError, Term, TermDictionary, TermId, VersionId, VersionRegistry, VersionSet,
    VersionedIriRegistry,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Quad {
    pub s: TermId,
    pub p: TermId,
    pub o: TermId,
    pub g: TermId,
}

impl Quad {
    pub fn new(s: TermId, p: TermId, o: TermId, g: TermId) -> Self {
        Quad { s, p, o, g }
    }
}

/// A quad together with the version in which it holds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VersionedQuad {
    pub quad: Quad,
    pub version: VersionId,
}

/// Dictionary, version registry and versioned-IRI registry shared by both dataset models.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Catalog {
    pub dictionary: TermDictionary,
    pub versions: VersionRegistry,
    pub vi: VersionedIriRegistry,
}

impl Catalog {
    pub fn term(&self, id: TermId) -> &Term {
        self.dictionary.term(id)
    }

    /// Every registered versioned IRI as a set of `(graph, versions)` pairs, one per graph.
    pub fn graph_version_sets(&self) -> Vec<(TermId, VersionSet)> {
        self.vi
            .graphs()
            .map(|g| (g, self.vi.versions_of(g)))
            .collect()
    }
}

/// The flat model: one row per (quad, version).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlatDataset {
    catalog: Arc<Catalog>,
    rows: BTreeSet<VersionedQuad>,
    metadata: BTreeSet<VersionedQuad>,
}

/// The condensed model: each quad maps to the non-empty set of versions where it holds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CondensedDataset {
    catalog: Arc<Catalog>,
    entries: BTreeMap<Quad, VersionSet>,
    metadata: BTreeSet<VersionedQuad>,
}

impl FlatDataset {
    pub fn new(
        catalog: Arc<Catalog>,
        rows: BTreeSet<VersionedQuad>,
        metadata: BTreeSet<VersionedQuad>,
    ) -> Result<Self, ModelError> {
        let dataset = FlatDataset {
            catalog,
            rows,
            metadata,
        };
        dataset.validate()?;
        Ok(dataset)
    }

    pub fn catalog(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    pub fn rows(&self) -> &BTreeSet<VersionedQuad> {
        &self.rows
    }

    pub fn metadata(&self) -> &BTreeSet<VersionedQuad> {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for row in &self.rows {
            check_quad(&self.catalog, &row.quad)?;
            check_version(&self.catalog, row.quad.g, row.version)?;
        }
        check_metadata(&self.metadata)
    }
}

impl CondensedDataset {
    pub fn new(
        catalog: Arc<Catalog>,
        entries: BTreeMap<Quad, VersionSet>,
        metadata: BTreeSet<VersionedQuad>,
    ) -> Result<Self, ModelError> {
        let dataset = CondensedDataset {
            catalog,
            entries,
            metadata,
        };
        dataset.validate()?;
        Ok(dataset)
    }

    pub fn catalog(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    pub fn entries(&self) -> &BTreeMap<Quad, VersionSet> {
        &self.entries
    }

    pub fn versions_of(&self, quad: &Quad) -> Option<&VersionSet> {
        self.entries.get(quad)
    }

    pub fn metadata(&self) -> &BTreeSet<VersionedQuad> {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of rows the flat model of this dataset has.
    pub fn flat_len(&self) -> usize {
        self.entries.values().map(VersionSet::len).sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (quad, versions) in &self.entries {
            check_quad(&self.catalog, quad)?;
            if versions.is_empty() {
                return Err(ModelError::EmptyVersionSet);
            }
            self.catalog.versions.check(versions)?;
            for v in versions.iter() {
                check_version(&self.catalog, quad.g, v)?;
            }
        }
        check_metadata(&self.metadata)
    }
}

fn check_quad(catalog: &Catalog, quad: &Quad) -> Result<(), ModelError> {
    for id in [quad.s, quad.p, quad.g] {
        let term = catalog.dictionary.resolve(id)?;
        if !term.is_iri() {
            return Err(ModelError::NotAnIri(term.to_string()));
        }
    }
    catalog.dictionary.resolve(quad.o)?;
    Ok(())
}

fn check_version(catalog: &Catalog, graph: TermId, version: VersionId) -> Result<(), ModelError> {
    if version == VersionId::METADATA || catalog.versions.label(version).is_none() {
        return Err(ModelError::UnknownVersion(version.ordinal()));
    }
    if catalog.vi.get(version, graph).is_none() {
        return Err(ModelError::MissingVersionedIri {
            version: version.ordinal(),
            graph: graph.get(),
        });
    }
    Ok(())
}

fn check_metadata(metadata: &BTreeSet<VersionedQuad>) -> Result<(), ModelError> {
    if metadata.iter().any(|m| m.version != VersionId::METADATA) {
        return Err(ModelError::MetadataOutsideReservedVersion);
    }
    Ok(())
}

/// Maps every quad of the flat model to the set of versions it appears in.
pub fn condense(flat: &FlatDataset) -> CondensedDataset {
    let mut entries: BTreeMap<Quad, VersionSet> = BTreeMap::new();
    for row in &flat.rows {
        entries.entry(row.quad).or_default().insert(row.version);
    }
    CondensedDataset {
        catalog: Arc::clone(&flat.catalog),
        entries,
        metadata: flat.metadata.clone(),
    }
}

/// Expands each condensed entry into one row per version.
pub fn flatten(condensed: &CondensedDataset) -> FlatDataset {
    let rows = condensed
        .entries
        .iter()
        .flat_map(|(quad, versions)| {
            versions.iter().map(move |version| VersionedQuad {
                quad: *quad,
                version,
            })
        })
        .collect();
    FlatDataset {
        catalog: Arc::clone(&condensed.catalog),
        rows,
        metadata: condensed.metadata.clone(),
    }
}

/// Emits the `version-of` / `in-version` description of every versioned IRI into the
/// metadata graph, pinned to the reserved version.
pub fn build_metadata_graph(
    vi: &VersionedIriRegistry,
    versions: &VersionRegistry,
    dictionary: &mut TermDictionary,
) -> BTreeSet<VersionedQuad> {
    let mut rows = BTreeSet::new();
    if vi.is_empty() {
        return rows;
    }
    let metadata_graph = dictionary.intern(Term::iri(vocab::METADATA_GRAPH));
    let version_of = dictionary.intern(Term::iri(vocab::VERSION_OF));
    let in_version = dictionary.intern(Term::iri(vocab::IN_VERSION));
    for (iri, version, graph) in vi.iter() {
        let label = versions.label(version).unwrap_or_default();
        let label = dictionary.intern(Term::iri(label));
        for (p, o) in [(version_of, graph), (in_version, label)] {
            rows.insert(VersionedQuad {
                quad: Quad::new(iri, p, o, metadata_graph),
                version: VersionId::METADATA,
            });
        }
    }
    rows
}

/// Incremental construction of a versioned dataset.
#[derive(Default, Debug)]
pub struct DatasetBuilder {
    catalog: Catalog,
    rows: BTreeSet<VersionedQuad>,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from a pre-populated dictionary, e.g. to pin a known id assignment.
    pub fn with_dictionary(dictionary: TermDictionary) -> Self {
        DatasetBuilder {
            catalog: Catalog {
                dictionary,
                ..Catalog::default()
            },
            rows: BTreeSet::new(),
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn intern(&mut self, term: Term) -> TermId {
        self.catalog.dictionary.intern(term)
    }

    pub fn add_version(&mut self, label: impl Into<String>) -> Result<VersionId, ModelError> {
        self.catalog.versions.register(label)
    }

    pub fn version(&self, label: &str) -> Option<VersionId> {
        self.catalog.versions.lookup(label)
    }

    /// Registers (or returns) the versioned IRI of `(version, graph)`.
    pub fn register_graph(
        &mut self,
        version: VersionId,
        graph: TermId,
    ) -> Result<TermId, ModelError> {
        if version == VersionId::METADATA || self.catalog.versions.label(version).is_none() {
            return Err(ModelError::UnknownVersion(version.ordinal()));
        }
        let Catalog { dictionary, vi, .. } = &mut self.catalog;
        vi.register(version, graph, dictionary)
    }

    /// Adds a row; returns `false` if it was already present.
    pub fn insert(&mut self, quad: Quad, version: VersionId) -> Result<bool, ModelError> {
        check_quad(&self.catalog, &quad)?;
        self.register_graph(version, quad.g)?;
        Ok(self.rows.insert(VersionedQuad { quad, version }))
    }

    pub fn insert_terms(
        &mut self,
        s: Term,
        p: Term,
        o: Term,
        g: Term,
        version: VersionId,
    ) -> Result<bool, ModelError> {
        let quad = Quad::new(self.intern(s), self.intern(p), self.intern(o), self.intern(g));
        self.insert(quad, version)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn build_flat(mut self) -> FlatDataset {
        let Catalog {
            dictionary,
            versions,
            vi,
        } = &mut self.catalog;
        let metadata = build_metadata_graph(vi, versions, dictionary);
        FlatDataset {
            catalog: Arc::new(self.catalog),
            rows: self.rows,
            metadata,
        }
    }

    pub fn build_condensed(self) -> CondensedDataset {
        condense(&self.build_flat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_version_builder() -> DatasetBuilder {
        let mut b = DatasetBuilder::new();
        let v1 = b.add_version("v:1").unwrap();
        let v2 = b.add_version("v:2").unwrap();
        let q = |s: &str| Term::iri(s);
        b.insert_terms(q("ex:a"), q("ex:p"), Term::literal("1"), q("ng:A"), v1)
            .unwrap();
        b.insert_terms(q("ex:a"), q("ex:p"), Term::literal("1"), q("ng:A"), v2)
            .unwrap();
        b.insert_terms(q("ex:b"), q("ex:p"), Term::literal("2"), q("ng:B"), v2)
            .unwrap();
        b
    }

    #[test]
    fn condense_and_flatten_round_trip() {
        let flat = two_version_builder().build_flat();
        let condensed = condense(&flat);
        assert_eq!(condensed.len(), 2);
        assert_eq!(condensed.flat_len(), 3);
        assert_eq!(flatten(&condensed), flat);
        assert_eq!(condense(&flatten(&condensed)), condensed);
    }

    #[test]
    fn empty_dataset_condenses_to_empty() {
        let flat = DatasetBuilder::new().build_flat();
        let condensed = condense(&flat);
        assert!(condensed.is_empty());
        assert!(condensed.metadata().is_empty());
    }

    #[test]
    fn literal_subject_is_rejected() {
        let mut b = DatasetBuilder::new();
        let v = b.add_version("v:1").unwrap();
        let err = b
            .insert_terms(
                Term::literal("x"),
                Term::iri("p"),
                Term::literal("o"),
                Term::iri("g"),
                v,
            )
            .unwrap_err();
        assert!(matches!(err, ModelError::NotAnIri(_)));
    }

    #[test]
    fn metadata_has_two_rows_per_versioned_iri() {
        let flat = two_version_builder().build_flat();
        assert_eq!(flat.catalog().vi.len(), 3);
        assert_eq!(flat.metadata().len(), 6);
        assert!(flat
            .metadata()
            .iter()
            .all(|m| m.version == VersionId::METADATA));
    }

    #[test]
    fn validation_catches_empty_version_sets() {
        let condensed = two_version_builder().build_condensed();
        let mut entries = condensed.entries().clone();
        let first = *entries.keys().next().unwrap();
        entries.insert(first, VersionSet::new());
        let err = CondensedDataset::new(
            Arc::clone(condensed.catalog()),
            entries,
            condensed.metadata().clone(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::EmptyVersionSet));
    }
}
