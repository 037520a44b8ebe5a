//! Recursive evaluation of algebra trees over the flat and the condensed model.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{Aggregation, Algebra, Expression, PatternTerm, Representation, Var};
use crate::model::{vocab, Catalog, CondensedDataset, FlatDataset, Quad, Term, TermId, VersionSet};

use super::aggregate::{aggregate, WeightedRow};
use super::mapping::{compat_cond, compat_flat, merge_unchecked, KeyPart};
use super::transform::raise_var;
use super::value::{ebv, eval_expression};
use super::{Binding, EvalError, SolutionMapping, SolutionSequence, Value};

/// Deliberate faults for checking that the differential harness notices broken semantics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mutation {
    /// Condensed merge unions shared version sets instead of intersecting them.
    MergeUnionsVersions,
    /// Condensed aggregates weight by multiplicity only.
    AggregatesIgnoreCard,
    /// Condensed projection forgets the versions of dropped graph variables.
    ProjectionIgnoresCard,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::MergeUnionsVersions,
        Mutation::AggregatesIgnoreCard,
        Mutation::ProjectionIgnoresCard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::MergeUnionsVersions => "merge-unions-versions",
            Mutation::AggregatesIgnoreCard => "aggregates-ignore-card",
            Mutation::ProjectionIgnoresCard => "projection-ignores-card",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Clone, Copy, Default, Debug)]
pub struct EvalOptions {
    pub mutation: Option<Mutation>,
}

pub fn eval_flat(dataset: &FlatDataset, algebra: &Algebra) -> Result<SolutionSequence, EvalError> {
    algebra.validate()?;
    Engine {
        catalog: dataset.catalog(),
        model: Model::Flat(dataset),
        options: EvalOptions::default(),
    }
    .eval(algebra)
}

pub fn eval_condensed(
    dataset: &CondensedDataset,
    algebra: &Algebra,
) -> Result<SolutionSequence, EvalError> {
    eval_condensed_with(dataset, algebra, &EvalOptions::default())
}

pub fn eval_condensed_with(
    dataset: &CondensedDataset,
    algebra: &Algebra,
    options: &EvalOptions,
) -> Result<SolutionSequence, EvalError> {
    algebra.validate()?;
    Engine {
        catalog: dataset.catalog(),
        model: Model::Condensed(dataset),
        options: *options,
    }
    .eval(algebra)
}

/// Groups of a solution sequence keyed by the evaluated key expressions, in first-seen
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedSolutions {
    pub groups: Vec<(Vec<Value>, SolutionSequence)>,
}

pub fn group_solutions(keys: &[Expression], seq: SolutionSequence, catalog: &Catalog) -> GroupedSolutions {
    let mut index: HashMap<Vec<Value>, usize> = HashMap::new();
    let mut groups: Vec<(Vec<Value>, SolutionSequence)> = Vec::new();
    for m in seq {
        let key: Vec<Value> = keys.iter().map(|k| eval_expression(k, &m, catalog)).collect();
        match index.get(&key) {
            Some(&i) => groups[i].1.push(m),
            None => {
                index.insert(key.clone(), groups.len());
                groups.push((key, vec![m]));
            }
        }
    }
    GroupedSolutions { groups }
}

#[derive(Clone, Copy)]
enum Model<'a> {
    Flat(&'a FlatDataset),
    Condensed(&'a CondensedDataset),
}

struct Engine<'a> {
    catalog: &'a Catalog,
    model: Model<'a>,
    options: EvalOptions,
}

impl Engine<'_> {
    fn condensed(&self) -> bool {
        matches!(self.model, Model::Condensed(_))
    }

    fn mutated(&self, m: Mutation) -> bool {
        self.condensed() && self.options.mutation == Some(m)
    }

    fn eval(&self, algebra: &Algebra) -> Result<SolutionSequence, EvalError> {
        match algebra {
            Algebra::QuadPattern { s, p, o, g } => Ok(match self.model {
                Model::Flat(d) => self.quad_flat(d, [s, p, o], g),
                Model::Condensed(d) => self.quad_condensed(d, [s, p, o], g),
            }),
            Algebra::Join(l, r) => {
                let (l, r) = (self.eval(l)?, self.eval(r)?);
                self.join(l, r)
            }
            Algebra::Union(l, r) => {
                let mut out = self.eval(l)?;
                out.extend(self.eval(r)?);
                Ok(out)
            }
            Algebra::Filter { conditions, input } => {
                let input = self.eval(input)?;
                Ok(self.filter(conditions, input))
            }
            Algebra::Diff {
                left,
                right,
                condition,
            } => {
                let (l, r) = (self.eval(left)?, self.eval(right)?);
                self.diff(l, r, condition)
            }
            Algebra::LeftJoin {
                left,
                right,
                condition,
            } => {
                let (l, r) = (self.eval(left)?, self.eval(right)?);
                let joined = self.join(l.clone(), r.clone())?;
                let mut out = self.filter(std::slice::from_ref(condition), joined);
                out.extend(self.diff(l, r, condition)?);
                Ok(out)
            }
            Algebra::Projection { input, vars } => {
                let input = self.eval(input)?;
                Ok(self.project(input, vars))
            }
            Algebra::Group { keys, input } => {
                let input = self.eval(input)?;
                let grouped = self.group(keys, input)?;
                let vars: Vec<Option<&Var>> = keys.iter().map(Expression::as_var).collect();
                Ok(grouped
                    .groups
                    .into_iter()
                    .map(|(key, _)| key_mapping(&vars, key))
                    .collect())
            }
            Algebra::Aggregation(a) => self.aggregate_join(std::slice::from_ref(a)),
            Algebra::AggregateJoin(aggs) => self.aggregate_join(aggs),
            Algebra::ViRestrict { vi, var } => Ok(self.vi_restrict(vi, var)),
            Algebra::GraphRestrict { graph, var } => Ok(self.graph_restrict(graph, var)),
            Algebra::VersionRestrict { version, var } => Ok(self.version_restrict(version, var)),
            Algebra::Transform { var, to, input, .. } => {
                let input = self.eval(input)?;
                if self.condensed() {
                    raise_var(var, *to, input, self.catalog)
                } else {
                    Ok(input)
                }
            }
        }
    }

    fn lookup(&self, term: &Term) -> Option<TermId> {
        self.catalog.dictionary.lookup(term)
    }

    /// Resolves constant positions to ids; `None` if a constant is not in the dictionary.
    fn constants(&self, spo: [&PatternTerm; 3]) -> Option<[Option<TermId>; 3]> {
        let mut out = [None; 3];
        for (slot, t) in out.iter_mut().zip(spo) {
            if let PatternTerm::Const(term) = t {
                *slot = Some(self.lookup(term)?);
            }
        }
        Some(out)
    }

    /// Binds the variable positions of a matched triple, checking repeated variables.
    fn bind_spo(
        &self,
        spo: [&PatternTerm; 3],
        quad: &Quad,
        as_value: bool,
    ) -> Option<SolutionMapping> {
        let mut m = SolutionMapping::new();
        for (t, id) in spo.into_iter().zip([quad.s, quad.p, quad.o]) {
            if let PatternTerm::Var(v) = t {
                let b = if as_value {
                    Binding::Value(self.catalog.term(id).clone())
                } else {
                    Binding::Id(id)
                };
                if !bind(&mut m, v, b) {
                    return None;
                }
            }
        }
        Some(m)
    }

    fn matches_constants(consts: &[Option<TermId>; 3], quad: &Quad) -> bool {
        consts
            .iter()
            .zip([quad.s, quad.p, quad.o])
            .all(|(c, id)| c.is_none_or(|c| c == id))
    }

    /// Resolves a constant graph position to the (version, graph) pair of a versioned IRI.
    fn constant_graph(&self, g: &PatternTerm) -> Option<Option<(crate::model::VersionId, TermId)>> {
        match g {
            PatternTerm::Var(_) => None,
            PatternTerm::Const(term) => Some(self.lookup(term).and_then(|id| self.catalog.vi.resolve(id))),
        }
    }

    fn quad_flat(&self, d: &FlatDataset, spo: [&PatternTerm; 3], g: &PatternTerm) -> SolutionSequence {
        let Some(consts) = self.constants(spo) else {
            return Vec::new();
        };
        let constant_graph = self.constant_graph(g);
        let mut out = Vec::new();
        for row in d.rows() {
            if !Self::matches_constants(&consts, &row.quad) {
                continue;
            }
            match constant_graph {
                Some(None) => return Vec::new(),
                Some(Some((v, graph))) if (v, graph) != (row.version, row.quad.g) => continue,
                _ => {}
            }
            let Some(mut m) = self.bind_spo(spo, &row.quad, true) else {
                continue;
            };
            if let PatternTerm::Var(var) = g {
                let vi = self
                    .catalog
                    .vi
                    .get(row.version, row.quad.g)
                    .expect("validated dataset registers every graph");
                if !bind(&mut m, var, Binding::Value(self.catalog.term(vi).clone())) {
                    continue;
                }
            }
            out.push(m);
        }
        out
    }

    fn quad_condensed(
        &self,
        d: &CondensedDataset,
        spo: [&PatternTerm; 3],
        g: &PatternTerm,
    ) -> SolutionSequence {
        let Some(consts) = self.constants(spo) else {
            return Vec::new();
        };
        let constant_graph = self.constant_graph(g);
        let graph_var = g.as_var();
        let graph_in_spo = graph_var.is_some_and(|gv| spo.iter().any(|t| t.as_var() == Some(gv)));
        let mut out = Vec::new();
        for (quad, versions) in d.entries() {
            if !Self::matches_constants(&consts, quad) {
                continue;
            }
            match constant_graph {
                Some(None) => return Vec::new(),
                Some(Some((v, graph))) if graph != quad.g || !versions.contains(v) => continue,
                _ => {}
            }
            let Some(m) = self.bind_spo(spo, quad, false) else {
                continue;
            };
            match graph_var {
                None => out.push(m),
                Some(var) if graph_in_spo => {
                    for v in versions.iter() {
                        let vi = self.catalog.vi.get(v, quad.g).expect("validated dataset");
                        let mut m = m.clone();
                        if bind(&mut m, var, Binding::Id(vi)) {
                            out.push(m);
                        }
                    }
                }
                Some(var) => {
                    let mut m = m;
                    m.insert(var.clone(), Binding::Graph(quad.g, versions.clone()));
                    out.push(m);
                }
            }
        }
        out
    }

    fn single(var: &Var, b: Binding) -> SolutionMapping {
        SolutionMapping::from_bindings([(var.clone(), b)])
    }

    fn metadata_subjects(&self, d: &FlatDataset, predicate: &str, object: &Term) -> Vec<TermId> {
        let (Some(p), Some(o)) = (self.lookup(&Term::iri(predicate)), self.lookup(object)) else {
            return Vec::new();
        };
        d.metadata()
            .iter()
            .filter(|row| row.quad.p == p && row.quad.o == o)
            .map(|row| row.quad.s)
            .collect()
    }

    fn vi_restrict(&self, vi: &Term, var: &Var) -> SolutionSequence {
        let Some(id) = self.lookup(vi) else {
            return Vec::new();
        };
        match self.model {
            Model::Flat(d) => {
                if d.metadata().iter().any(|row| row.quad.s == id) {
                    vec![Self::single(var, Binding::Value(vi.clone()))]
                } else {
                    Vec::new()
                }
            }
            Model::Condensed(_) => match self.catalog.vi.resolve(id) {
                Some((v, g)) => vec![Self::single(var, Binding::Graph(g, VersionSet::singleton(v)))],
                None => Vec::new(),
            },
        }
    }

    fn graph_restrict(&self, graph: &Term, var: &Var) -> SolutionSequence {
        match self.model {
            Model::Flat(d) => self
                .metadata_subjects(d, vocab::VERSION_OF, graph)
                .into_iter()
                .map(|vi| Self::single(var, Binding::Value(self.catalog.term(vi).clone())))
                .collect(),
            Model::Condensed(_) => {
                let Some(g) = self.lookup(graph) else {
                    return Vec::new();
                };
                let versions = self.catalog.vi.versions_of(g);
                if versions.is_empty() {
                    Vec::new()
                } else {
                    vec![Self::single(var, Binding::Graph(g, versions))]
                }
            }
        }
    }

    fn version_restrict(&self, version: &Term, var: &Var) -> SolutionSequence {
        match self.model {
            Model::Flat(d) => self
                .metadata_subjects(d, vocab::IN_VERSION, version)
                .into_iter()
                .map(|vi| Self::single(var, Binding::Value(self.catalog.term(vi).clone())))
                .collect(),
            Model::Condensed(_) => {
                if !version.is_iri() {
                    return Vec::new();
                }
                let Some(v) = self.catalog.versions.lookup(version.lexical()) else {
                    return Vec::new();
                };
                self.catalog
                    .vi
                    .graphs_in(v)
                    .map(|g| Self::single(var, Binding::Graph(g, VersionSet::singleton(v))))
                    .collect()
            }
        }
    }

    fn compatible(&self, m1: &SolutionMapping, m2: &SolutionMapping) -> bool {
        if self.condensed() {
            compat_cond(m1, m2)
        } else {
            compat_flat(m1, m2)
        }
    }

    fn merge(&self, m1: &SolutionMapping, m2: &SolutionMapping) -> SolutionMapping {
        merge_unchecked(m1, m2, self.mutated(Mutation::MergeUnionsVersions))
    }

    /// Condensed only: raises variables shared by both sides to a common bank, at least ζ.
    fn align(
        &self,
        left: SolutionSequence,
        right: SolutionSequence,
    ) -> Result<(SolutionSequence, SolutionSequence), EvalError> {
        if !self.condensed() {
            return Ok((left, right));
        }
        let highest = |seq: &SolutionSequence| {
            let mut out: BTreeMap<Var, Representation> = BTreeMap::new();
            for m in seq {
                for (v, b) in m.iter() {
                    let slot = out.entry(v.clone()).or_insert(b.repr());
                    *slot = (*slot).max(b.repr());
                }
            }
            out
        };
        let (hl, hr) = (highest(&left), highest(&right));
        let (mut left, mut right) = (left, right);
        for (var, rl) in &hl {
            let Some(rr) = hr.get(var) else { continue };
            let target = rl.max(rr).max(&Representation::Zeta);
            let lowest = |seq: &SolutionSequence| {
                seq.iter()
                    .filter_map(|m| m.get(var).map(Binding::repr))
                    .any(|r| r < *target)
            };
            if lowest(&left) {
                left = raise_var(var, *target, left, self.catalog)?;
            }
            if lowest(&right) {
                right = raise_var(var, *target, right, self.catalog)?;
            }
        }
        Ok((left, right))
    }

    fn join(&self, left: SolutionSequence, right: SolutionSequence) -> Result<SolutionSequence, EvalError> {
        let (left, right) = self.align(left, right)?;
        let key_vars: Vec<Var> = always_bound(&left)
            .into_iter()
            .filter(|v| right.iter().all(|m| m.contains(v)))
            .collect();
        let key = |m: &SolutionMapping| -> Vec<KeyPart> {
            key_vars.iter().map(|v| KeyPart::from(m.get(v).expect("always bound"))).collect()
        };
        let mut index: HashMap<Vec<KeyPart>, Vec<usize>> = HashMap::new();
        for (i, m) in right.iter().enumerate() {
            index.entry(key(m)).or_default().push(i);
        }
        let mut out = Vec::new();
        for m1 in &left {
            let Some(candidates) = index.get(&key(m1)) else {
                continue;
            };
            for &i in candidates {
                let m2 = &right[i];
                if self.compatible(m1, m2) {
                    out.push(self.merge(m1, m2));
                }
            }
        }
        Ok(out)
    }

    fn holds(&self, conditions: &[Expression], m: &SolutionMapping) -> bool {
        conditions
            .iter()
            .all(|c| ebv(&eval_expression(c, m, self.catalog), self.catalog))
    }

    fn filter(&self, conditions: &[Expression], input: SolutionSequence) -> SolutionSequence {
        input.into_iter().filter(|m| self.holds(conditions, m)).collect()
    }

    fn diff(
        &self,
        left: SolutionSequence,
        right: SolutionSequence,
        condition: &Expression,
    ) -> Result<SolutionSequence, EvalError> {
        let (left, right) = self.align(left, right)?;
        let removes = |m1: &SolutionMapping, m2: &SolutionMapping| {
            self.compatible(m1, m2)
                && self.holds(std::slice::from_ref(condition), &self.merge(m1, m2))
        };
        if !self.condensed() {
            return Ok(left
                .into_iter()
                .filter(|m1| right.iter().all(|m2| !removes(m1, m2)))
                .collect());
        }
        // A condensed mapping can be only partly removed: subtract the box where the
        // shared version sets overlap and keep the rest as disjoint pieces.
        let mut out = Vec::new();
        for m1 in left {
            let mut pieces = vec![m1];
            for m2 in &right {
                let mut next = Vec::with_capacity(pieces.len());
                for p in pieces {
                    if !removes(&p, m2) {
                        next.push(p);
                        continue;
                    }
                    let mut prefix = p;
                    let shared: Vec<Var> = prefix
                        .iter()
                        .filter(|(v, b)| {
                            matches!(b, Binding::Graph(..)) && matches!(m2.get(v), Some(Binding::Graph(..)))
                        })
                        .map(|(v, _)| v.clone())
                        .collect();
                    for var in shared {
                        let (Some(Binding::Graph(g, a)), Some(Binding::Graph(_, c))) =
                            (prefix.get(&var).cloned(), m2.get(&var))
                        else {
                            unreachable!("filtered to graph bindings");
                        };
                        let rest = a.difference(c);
                        if !rest.is_empty() {
                            let mut piece = prefix.clone();
                            piece.insert(var.clone(), Binding::Graph(g, rest));
                            next.push(piece);
                        }
                        prefix.insert(var, Binding::Graph(g, a.intersection(c)));
                    }
                }
                pieces = next;
            }
            out.extend(pieces);
        }
        Ok(out)
    }

    fn project(&self, input: SolutionSequence, vars: &[Var]) -> SolutionSequence {
        let mut index: HashMap<SolutionMapping, usize> = HashMap::new();
        let mut out: Vec<SolutionMapping> = Vec::new();
        for m in input {
            let mut multiplicity = m.multiplicity();
            let mut kept = SolutionMapping::new();
            for (v, b) in m.iter() {
                if vars.contains(v) {
                    kept.insert(v.clone(), b.clone());
                } else if !self.mutated(Mutation::ProjectionIgnoresCard) {
                    multiplicity = multiplicity
                        .checked_mul(b.card(self.catalog))
                        .expect("multiplicity overflow");
                }
            }
            match index.get(&kept) {
                Some(&i) => {
                    let total = out[i].multiplicity() + multiplicity;
                    out[i].set_multiplicity(total);
                }
                None => {
                    index.insert(kept.clone(), out.len());
                    out.push(kept.with_multiplicity(multiplicity));
                }
            }
        }
        out
    }

    fn group(&self, keys: &[Expression], input: SolutionSequence) -> Result<GroupedSolutions, EvalError> {
        let mut input = input;
        if self.condensed() {
            // Graph-valued keys would compare whole version sets; split them per version.
            for var in keys.iter().filter_map(Expression::as_var) {
                if input.iter().any(|m| m.get(var).is_some_and(|b| b.repr() < Representation::Iota)) {
                    input = raise_var(var, Representation::Iota, input, self.catalog)?;
                }
            }
        }
        Ok(group_solutions(keys, input, self.catalog))
    }

    fn aggregate_join(&self, aggs: &[Aggregation]) -> Result<SolutionSequence, EvalError> {
        let mut cache: HashMap<&Algebra, SolutionSequence> = HashMap::new();
        let mut key_order: Vec<Vec<Value>> = Vec::new();
        let mut rows: HashMap<Vec<Value>, SolutionMapping> = HashMap::new();
        for a in aggs {
            let (keys, input) = a.group_parts()?;
            let seq = match cache.get(input) {
                Some(seq) => seq.clone(),
                None => {
                    let seq = self.eval(input)?;
                    cache.insert(input, seq.clone());
                    seq
                }
            };
            let vars: Vec<Option<&Var>> = keys.iter().map(Expression::as_var).collect();
            let args = a.arguments();
            for (key, members) in self.group(keys, seq)?.groups {
                let weighted: Vec<WeightedRow> = members
                    .iter()
                    .map(|m| WeightedRow {
                        args: args.iter().map(|e| eval_expression(e, m, self.catalog)).collect(),
                        weight: if self.mutated(Mutation::AggregatesIgnoreCard) {
                            m.multiplicity()
                        } else {
                            m.weight(self.catalog)
                        },
                    })
                    .collect();
                let value = aggregate(&a.params, &weighted, self.catalog);
                let row = rows.entry(key.clone()).or_insert_with(|| {
                    key_order.push(key.clone());
                    key_mapping(&vars, key.clone())
                });
                if let Some(b) = value.into_binding() {
                    row.insert(a.target.clone(), b);
                }
            }
        }
        Ok(key_order
            .into_iter()
            .map(|k| rows.remove(&k).expect("inserted with its key"))
            .collect())
    }
}

/// Inserts a binding, or checks it against an existing one.
fn bind(m: &mut SolutionMapping, var: &Var, b: Binding) -> bool {
    match m.get(var) {
        Some(existing) => *existing == b,
        None => {
            m.insert(var.clone(), b);
            true
        }
    }
}

fn always_bound(seq: &SolutionSequence) -> Vec<Var> {
    match seq.split_first() {
        None => Vec::new(),
        Some((first, rest)) => first
            .vars()
            .filter(|v| rest.iter().all(|m| m.contains(v)))
            .cloned()
            .collect(),
    }
}

fn key_mapping(vars: &[Option<&Var>], key: Vec<Value>) -> SolutionMapping {
    let mut m = SolutionMapping::new();
    for (var, value) in vars.iter().zip(key) {
        if let (Some(var), Some(b)) = (var, value.into_binding()) {
            m.insert((*var).clone(), b);
        }
    }
    m
}
