use std::collections::{BTreeMap, HashMap};

use super::{ModelError, Term, TermDictionary, TermId, VersionId, VersionSet};

/// The bijection between (version, named graph) pairs and versioned IRIs.
///
/// Versioned IRIs are minted as `vi:1`, `vi:2`, ... in registration order and interned in
/// the dataset dictionary, so they can travel through the id representation like any term.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct VersionedIriRegistry {
    forward: BTreeMap<(VersionId, TermId), TermId>,
    inverse: HashMap<TermId, (VersionId, TermId)>,
    order: Vec<TermId>,
    by_graph: BTreeMap<TermId, VersionSet>,
}

impl VersionedIriRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the versioned IRI of `(version, graph)`, minting it on first use.
    pub fn register(
        &mut self,
        version: VersionId,
        graph: TermId,
        dictionary: &mut TermDictionary,
    ) -> Result<TermId, ModelError> {
        if let Some(vi) = self.forward.get(&(version, graph)) {
            return Ok(*vi);
        }
        if !dictionary.resolve(graph)?.is_iri() {
            return Err(ModelError::NotAnIri(dictionary.term(graph).to_string()));
        }
        let mut n = self.order.len() + 1;
        let vi = loop {
            let candidate = Term::iri(format!("vi:{n}"));
            if dictionary.lookup(&candidate).is_none() {
                break dictionary.intern(candidate);
            }
            n += 1;
        };
        self.insert(version, graph, vi)?;
        Ok(vi)
    }

    /// Re-establishes a known association, e.g. when loading a snapshot.
    pub fn insert(
        &mut self,
        version: VersionId,
        graph: TermId,
        vi: TermId,
    ) -> Result<(), ModelError> {
        if self.forward.contains_key(&(version, graph)) || self.inverse.contains_key(&vi) {
            return Err(ModelError::DuplicateVersionedIri(vi.get()));
        }
        self.forward.insert((version, graph), vi);
        self.inverse.insert(vi, (version, graph));
        self.order.push(vi);
        self.by_graph.entry(graph).or_default().insert(version);
        Ok(())
    }

    pub fn get(&self, version: VersionId, graph: TermId) -> Option<TermId> {
        self.forward.get(&(version, graph)).copied()
    }

    pub fn inverse_version(&self, vi: TermId) -> Result<VersionId, ModelError> {
        self.inverse
            .get(&vi)
            .map(|(v, _)| *v)
            .ok_or(ModelError::NotVersionedIri(vi.get()))
    }

    pub fn inverse_graph(&self, vi: TermId) -> Result<TermId, ModelError> {
        self.inverse
            .get(&vi)
            .map(|(_, g)| *g)
            .ok_or(ModelError::NotVersionedIri(vi.get()))
    }

    pub fn resolve(&self, vi: TermId) -> Option<(VersionId, TermId)> {
        self.inverse.get(&vi).copied()
    }

    pub fn is_versioned_iri(&self, id: TermId) -> bool {
        self.inverse.contains_key(&id)
    }

    /// `(vi, version, graph)` in registration order.
    pub fn iter(&self) -> impl Iterator<Item = (TermId, VersionId, TermId)> + '_ {
        self.order.iter().map(|vi| {
            let (v, g) = self.inverse[vi];
            (*vi, v, g)
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Named graphs with at least one versioned IRI, in id order.
    pub fn graphs(&self) -> impl Iterator<Item = TermId> + '_ {
        self.by_graph.keys().copied()
    }

    /// Versions in which `graph` has a versioned IRI.
    pub fn versions_of(&self, graph: TermId) -> VersionSet {
        self.by_graph.get(&graph).cloned().unwrap_or_default()
    }

    /// Graphs present in `version`, in id order.
    pub fn graphs_in(&self, version: VersionId) -> impl Iterator<Item = TermId> + '_ {
        self.by_graph
            .iter()
            .filter(move |(_, vs)| vs.contains(version))
            .map(|(g, _)| *g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registration_is_idempotent_and_invertible() {
        let mut dict = TermDictionary::new();
        let g = dict.intern(Term::iri("ng:Gr-Lyon"));
        let mut reg = VersionedIriRegistry::new();
        let vi = reg.register(VersionId(1), g, &mut dict).unwrap();
        assert_eq!(reg.register(VersionId(1), g, &mut dict).unwrap(), vi);
        assert_eq!(dict.term(vi), &Term::iri("vi:1"));
        assert_eq!(reg.inverse_version(vi).unwrap(), VersionId(1));
        assert_eq!(reg.inverse_graph(vi).unwrap(), g);
        assert!(matches!(
            reg.inverse_graph(g),
            Err(ModelError::NotVersionedIri(_))
        ));
    }

    #[test]
    fn minting_skips_names_already_in_use() {
        let mut dict = TermDictionary::new();
        let taken = dict.intern(Term::iri("vi:1"));
        let g = dict.intern(Term::iri("ng:A"));
        let mut reg = VersionedIriRegistry::new();
        let vi = reg.register(VersionId(1), g, &mut dict).unwrap();
        assert_ne!(vi, taken);
        assert_eq!(dict.term(vi), &Term::iri("vi:2"));
    }

    #[test]
    fn literal_graph_is_rejected() {
        let mut dict = TermDictionary::new();
        let lit = dict.intern(Term::literal("x"));
        let mut reg = VersionedIriRegistry::new();
        assert!(reg.register(VersionId(1), lit, &mut dict).is_err());
    }
}
