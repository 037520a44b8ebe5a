//! Value translation between representations and its lifting to mappings and sequences.

use crate::algebra::{Environment, Representation, Var};
use crate::model::Catalog;

use super::{Binding, EvalError, SolutionMapping, SolutionSequence};



/// One elementary step up the chain.
fn step(value: &Binding, catalog: &Catalog) -> Result<Vec<Binding>, EvalError> {
    match value {
        Binding::AnyGraph => Ok(catalog
            .vi
            .graphs()
            .map(|g| Binding::Graph(g, catalog.vi.versions_of(g)))
            .collect()),
        Binding::Graph(g, versions) => versions
            .iter()
            .map(|v| {
                catalog.vi.get(v, *g).map(Binding::Id).ok_or_else(|| {
                    EvalError::Translation(format!(
                        "graph {} has no versioned IRI in version {}",
                        catalog.dictionary.resolve(*g).map(|t| t.to_string()).unwrap_or_default(),
                        v.ordinal()
                    ))
                })
            })
            .collect(),
        Binding::Id(id) => catalog
            .dictionary
            .resolve(*id)
            .map(|t| vec![Binding::Value(t.clone())])
            .map_err(|_| EvalError::Translation(format!("unknown term id {}", id.get()))),
        Binding::Value(_) => Err(EvalError::Translation("ν is the top representation".into())),
    }
}

/// Translates `value` from `from` to `to`, composing elementary steps.
pub fn translate_value(
    from: Representation,
    to: Representation,
    value: &Binding,
    catalog: &Catalog,
) -> Result<Vec<Binding>, EvalError> {
    if value.repr() != from {
        return Err(EvalError::Translation(format!(
            "value is in {}, not {from}",
            value.repr()
        )));
    }
    if from > to {
        return Err(EvalError::Translation(format!("cannot translate {from} down to {to}")));
    }
    let mut current = vec![value.clone()];
    let mut r = from;
    while r < to {
        current = current
            .iter()
            .map(|b| step(b, catalog))
            .collect::<Result<Vec<_>, _>>()?
            .concat();
        r = r.step_up().expect("below ν");
    }
    Ok(current)
}

/// Splits `m` into one mapping per translation of `var`; other bindings and the
/// multiplicity are copied.
pub fn downgrade_mapping(
    var: &Var,
    from: Representation,
    to: Representation,
    m: &SolutionMapping,
    catalog: &Catalog,
) -> Result<SolutionSequence, EvalError> {
    let found = m.get(var).map(Binding::repr);
    if found != Some(from) {
        return Err(EvalError::BankMismatch {
            var: var.clone(),
            expected: from,
            found,
        });
    }
    if from > to {
        return Err(EvalError::IllegalPromotion {
            var: var.clone(),
            from,
            to,
        });
    }
    let value = m.get(var).expect("checked above");
    Ok(translate_value(from, to, value, catalog)?
        .into_iter()
        .map(|b| {
            let mut out = m.clone();
            out.insert(var.clone(), b);
            out
        })
        .collect())
}

/// Raises `var` to `to` wherever it is bound lower; mappings where it is unbound or
/// already at least `to` pass through.
pub fn raise_var(
    var: &Var,
    to: Representation,
    seq: SolutionSequence,
    catalog: &Catalog,
) -> Result<SolutionSequence, EvalError> {
    let mut out = Vec::with_capacity(seq.len());
    for m in seq {
        match m.get(var).map(Binding::repr) {
            Some(r) if r < to => out.extend(downgrade_mapping(var, r, to, &m, catalog)?),
            _ => out.push(m),
        }
    }
    Ok(out)
}

/// Applies the per-variable downgrades taking every mapping from `env` to `env2`.
pub fn transform_sequence(
    env: &Environment,
    env2: &Environment,
    seq: SolutionSequence,
    catalog: &Catalog,
) -> Result<SolutionSequence, EvalError> {
    for (var, r) in env.iter() {
        if let Some(r2) = env2.get(var) {
            if r2 < r {
                return Err(EvalError::IllegalPromotion {
                    var: var.clone(),
                    from: r,
                    to: r2,
                });
            }
        }
    }
    let mut seq = seq;
    for (var, r) in env.iter() {
        let Some(r2) = env2.get(var) else { continue };
        if r == r2 {
            continue;
        }
        let mut out = Vec::with_capacity(seq.len());
        for m in seq {
            match m.get(var).map(Binding::repr) {
                Some(found) if found == r => out.extend(downgrade_mapping(var, r, r2, &m, catalog)?),
                None => out.push(m),
                Some(found) => {
                    return Err(EvalError::BankMismatch {
                        var: var.clone(),
                        expected: r,
                        found: Some(found),
                    })
                }
            }
        }
        seq = out;
    }
    Ok(seq)
}

