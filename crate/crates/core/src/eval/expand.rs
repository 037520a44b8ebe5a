//! Expansion of condensed solutions into flat ones, and multiset equivalence.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::Var;
use crate::model::{Catalog, Term};

use super::{Binding, EvalError, SolutionMapping, SolutionSequence};

/// Canonical multiset of flat solutions: sorted bindings to total multiplicity.
pub type ExpandedMultiset = BTreeMap<Vec<(Var, Term)>, u64>;

/// The flat terms a variable of a mapping stands for.
pub fn vals(m: &SolutionMapping, var: &Var, catalog: &Catalog) -> Result<BTreeSet<Term>, EvalError> {
    let vi_term = |v, g| {
        catalog
            .vi
            .get(v, g)
            .map(|id| catalog.term(id).clone())
            .ok_or_else(|| EvalError::Translation(format!("no versioned IRI for {var} in {v:?}")))
    };
    match m.get(var) {
        None => Err(EvalError::UnboundVariable(var.clone())),
        Some(Binding::Value(t)) => Ok(BTreeSet::from([t.clone()])),
        Some(Binding::Id(id)) => Ok(BTreeSet::from([catalog
            .dictionary
            .resolve(*id)
            .map_err(|e| EvalError::Translation(e.to_string()))?
            .clone()])),
        Some(Binding::Graph(g, versions)) => versions.iter().map(|v| vi_term(v, *g)).collect(),
        Some(Binding::AnyGraph) => Ok(catalog.vi.iter().map(|(id, _, _)| catalog.term(id).clone()).collect()),
    }
}

/// Cartesian product of the values of every variable; each result is fully in ν and
/// carries the multiplicity of its source.
pub fn expand(m: &SolutionMapping, catalog: &Catalog) -> Result<SolutionSequence, EvalError> {
    let mut out = vec![SolutionMapping::new().with_multiplicity(m.multiplicity())];
    for var in m.vars() {
        let values = vals(m, var, catalog)?;
        let mut next = Vec::with_capacity(out.len() * values.len());
        for partial in &out {
            for t in &values {
                let mut e = partial.clone();
                e.insert(var.clone(), Binding::Value(t.clone()));
                next.push(e);
            }
        }
        out = next;
    }
    Ok(out)
}

pub fn expand_sequence(seq: &[SolutionMapping], catalog: &Catalog) -> Result<SolutionSequence, EvalError> {
    let mut out = Vec::new();
    for m in seq {
        out.extend(expand(m, catalog)?);
    }
    Ok(out)
}

pub fn expanded_multiset(seq: &[SolutionMapping], catalog: &Catalog) -> Result<ExpandedMultiset, EvalError> {
    let mut out = ExpandedMultiset::new();
    for e in expand_sequence(seq, catalog)? {
        let key = e
            .iter()
            .map(|(v, b)| match b {
                Binding::Value(t) => (v.clone(), t.clone()),
                _ => unreachable!("expansion yields values"),
            })
            .collect();
        *out.entry(key).or_insert(0) += e.multiplicity();
    }
    Ok(out)
}

/// Whether two sequences denote the same multiset of flat solutions.
pub fn equivalent(a: &[SolutionMapping], b: &[SolutionMapping], catalog: &Catalog) -> bool {
    match (expanded_multiset(a, catalog), expanded_multiset(b, catalog)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}
