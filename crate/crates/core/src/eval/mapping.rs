use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Representation, Var};
use crate::model::{Catalog, Term, TermId, VersionSet};

use super::EvalError;

/// A variable binding; the variant is the bank (ν, ι, ζ or ψ) holding the variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Binding {
    Value(Term),
    Id(TermId),
    Graph(TermId, VersionSet),
    AnyGraph,
}

impl Binding {
    pub fn repr(&self) -> Representation {
        match self {
            Binding::Value(_) => Representation::Nu,
            Binding::Id(_) => Representation::Iota,
            Binding::Graph(..) => Representation::Zeta,
            Binding::AnyGraph => Representation::Psi,
        }
    }

    /// Number of versioned graphs a ζ or ψ binding stands for; 1 otherwise.
    pub fn card(&self, catalog: &Catalog) -> u64 {
        match self {
            Binding::Graph(_, versions) => versions.len() as u64,
            Binding::AnyGraph => catalog.vi.len() as u64,
            _ => 1,
        }
    }

    pub fn display(&self, catalog: &Catalog) -> String {
        match self {
            Binding::Value(t) => t.lexical().to_owned(),
            Binding::Id(id) => catalog.term(*id).lexical().to_owned(),
            Binding::Graph(g, versions) => {
                let labels: Vec<&str> = versions
                    .iter()
                    .map(|v| catalog.versions.label(v).unwrap_or("?"))
                    .collect();
                format!("{}@{{{}}}", catalog.term(*g).lexical(), labels.join(","))
            }
            Binding::AnyGraph => "*".to_owned(),
        }
    }
}

/// A solution mapping: each bound variable sits in exactly one bank, and the mapping
/// stands for `multiplicity` identical solutions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionMapping {
    bindings: BTreeMap<Var, Binding>,
    multiplicity: u64,
}

pub type SolutionSequence = Vec<SolutionMapping>;

impl Default for SolutionMapping {
    fn default() -> Self {
        SolutionMapping {
            bindings: BTreeMap::new(),
            multiplicity: 1,
        }
    }
}

impl SolutionMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (Var, Binding)>) -> Self {
        SolutionMapping {
            bindings: bindings.into_iter().collect(),
            multiplicity: 1,
        }
    }

    pub fn with_multiplicity(mut self, multiplicity: u64) -> Self {
        assert!(multiplicity >= 1, "multiplicity must be positive");
        self.multiplicity = multiplicity;
        self
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    pub fn set_multiplicity(&mut self, multiplicity: u64) {
        assert!(multiplicity >= 1, "multiplicity must be positive");
        self.multiplicity = multiplicity;
    }

    pub fn get(&self, var: &Var) -> Option<&Binding> {
        self.bindings.get(var)
    }

    pub fn insert(&mut self, var: Var, binding: Binding) -> Option<Binding> {
        self.bindings.insert(var, binding)
    }

    pub fn remove(&mut self, var: &Var) -> Option<Binding> {
        self.bindings.remove(var)
    }

    pub fn contains(&self, var: &Var) -> bool {
        self.bindings.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Binding)> {
        self.bindings.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Bindings of one bank.
    pub fn bank(&self, repr: Representation) -> impl Iterator<Item = (&Var, &Binding)> {
        self.bindings.iter().filter(move |(_, b)| b.repr() == repr)
    }

    /// `∏ζ |V| × ∏ψ |all versioned graphs|`: how many flat mappings the bindings encode.
    pub fn card(&self, catalog: &Catalog) -> u64 {
        self.bindings
            .values()
            .map(|b| b.card(catalog))
            .fold(1u64, |acc, c| acc.checked_mul(c).expect("card overflow"))
    }

    /// Multiplicity times card: the flat solutions this mapping stands for.
    pub fn weight(&self, catalog: &Catalog) -> u64 {
        self.multiplicity
            .checked_mul(self.card(catalog))
            .expect("weight overflow")
    }

    /// Checks the invariants: non-empty version sets and positive multiplicity.
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.multiplicity == 0 {
            return Err(EvalError::Malformed("zero multiplicity".into()));
        }
        for (var, b) in &self.bindings {
            if let Binding::Graph(_, versions) = b {
                if versions.is_empty() {
                    return Err(EvalError::Malformed(format!("{var} bound to an empty version set")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SolutionMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, b)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match b {
                Binding::Value(t) => write!(f, "{v}↦{t}")?,
                Binding::Id(id) => write!(f, "{v}↦#{}", id.get())?,
                Binding::Graph(g, vs) => write!(f, "{v}↦(#{}, {vs:?})", g.get())?,
                Binding::AnyGraph => write!(f, "{v}↦•")?,
            }
        }
        write!(f, "}}×{}", self.multiplicity)
    }
}

/// Join key of a binding: graph bindings hash by graph only, since compatibility only
/// requires overlapping version sets.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) enum KeyPart {
    Value(Term),
    Id(TermId),
    Graph(TermId),
    AnyGraph,
}

impl From<&Binding> for KeyPart {
    fn from(b: &Binding) -> Self {
        match b {
            Binding::Value(t) => KeyPart::Value(t.clone()),
            Binding::Id(id) => KeyPart::Id(*id),
            Binding::Graph(g, _) => KeyPart::Graph(*g),
            Binding::AnyGraph => KeyPart::AnyGraph,
        }
    }
}

/// Flat compatibility: shared variables carry the same value or id.
pub fn compat_flat(m1: &SolutionMapping, m2: &SolutionMapping) -> bool {
    m1.iter().all(|(var, b1)| match m2.get(var) {
        None => true,
        Some(b2) => match (b1, b2) {
            (Binding::Value(a), Binding::Value(b)) => a == b,
            (Binding::Id(a), Binding::Id(b)) => a == b,
            _ => false,
        },
    })
}

/// Merge of compatible flat mappings; multiplicities multiply.
pub fn merge_flat(m1: &SolutionMapping, m2: &SolutionMapping) -> Result<SolutionMapping, EvalError> {
    if !compat_flat(m1, m2) {
        return Err(EvalError::Incompatible);
    }
    Ok(merge_unchecked(m1, m2, false))
}

/// Condensed compatibility: equal values, ids and unbound graphs; graph bindings must share
/// the graph and have overlapping version sets.
pub fn compat_cond(m1: &SolutionMapping, m2: &SolutionMapping) -> bool {
    m1.iter().all(|(var, b1)| match m2.get(var) {
        None => true,
        Some(b2) => match (b1, b2) {
            (Binding::Graph(g1, v1), Binding::Graph(g2, v2)) => g1 == g2 && v1.intersects(v2),
            (a, b) => a == b,
        },
    })
}

/// Merge of compatible condensed mappings: shared graph bindings keep the intersection.
pub fn merge_cond(m1: &SolutionMapping, m2: &SolutionMapping) -> Result<SolutionMapping, EvalError> {
    if !compat_cond(m1, m2) {
        return Err(EvalError::Incompatible);
    }
    Ok(merge_unchecked(m1, m2, false))
}

/// Merge without a compatibility check. `union_versions` swaps the intersection of shared
/// version sets for their union; it exists only to seed faults for mutation testing.
pub(crate) fn merge_unchecked(
    m1: &SolutionMapping,
    m2: &SolutionMapping,
    union_versions: bool,
) -> SolutionMapping {
    let mut out = m1.clone();
    for (var, b2) in m2.iter() {
        match (out.bindings.get_mut(var), b2) {
            (Some(Binding::Graph(_, v1)), Binding::Graph(_, v2)) => {
                *v1 = if union_versions {
                    v1.union(v2)
                } else {
                    v1.intersection(v2)
                };
            }
            (Some(_), _) => {}
            (None, b) => {
                out.bindings.insert(var.clone(), b.clone());
            }
        }
    }
    out.multiplicity = m1
        .multiplicity
        .checked_mul(m2.multiplicity)
        .expect("multiplicity overflow");
    out
}
