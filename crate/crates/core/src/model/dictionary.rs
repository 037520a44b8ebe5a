use std::collections::HashMap;
use std::fmt;

use super::{ModelError, Term};

/// Dense dictionary identifier. Zero is never assigned.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn new(raw: u32) -> Option<Self> {
        (raw != 0).then_some(TermId(raw))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijective term interner. Ids are handed out densely from 1 in first-seen order.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct TermDictionary {
    forward: HashMap<Term, TermId>,
    reverse: Vec<Term>,
}

impl TermDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, term: Term) -> TermId {
        if let Some(id) = self.forward.get(&term) {
            return *id;
        }
        let id = TermId(u32::try_from(self.reverse.len() + 1).expect("dictionary overflow"));
        self.reverse.push(term.clone());
        self.forward.insert(term, id);
        id
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.forward.get(term).copied()
    }

    pub fn resolve(&self, id: TermId) -> Result<&Term, ModelError> {
        self.reverse
            .get(id.0 as usize - 1)
            .ok_or(ModelError::UnknownId(id.0))
    }

    /// Like [`resolve`](Self::resolve) for ids that are known to come from this dictionary.
    pub fn term(&self, id: TermId) -> &Term {
        &self.reverse[id.0 as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.reverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }

    /// Terms in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TermId, &Term)> {
        self.reverse
            .iter()
            .enumerate()
            .map(|(i, t)| (TermId(i as u32 + 1), t))
    }
}

impl fmt::Debug for TermDictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intern_is_idempotent() {
        let mut dict = TermDictionary::new();
        let a = dict.intern(Term::iri("ex:a"));
        let b = dict.intern(Term::literal("1"));
        assert_eq!(dict.intern(Term::iri("ex:a")), a);
        assert_eq!(a.get(), 1);
        assert_eq!(b.get(), 2);
        assert_eq!(dict.len(), 2);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let dict = TermDictionary::new();
        assert!(matches!(
            dict.resolve(TermId::new(3).unwrap()),
            Err(ModelError::UnknownId(3))
        ));
        assert!(TermId::new(0).is_none());
    }
}
