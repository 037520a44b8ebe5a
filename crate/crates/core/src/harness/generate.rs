//! Seeded generators for datasets, algebra trees and condensed solutions.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{
    AggregateFunction, Aggregation, AggregationParams, Algebra, Expression, Function, PatternTerm,
    Var,
};
use crate::eval::{Binding, SolutionMapping};
use crate::model::{vocab, Catalog, CondensedDataset, DatasetBuilder, FlatDataset, Term, VersionSet};

/// A dataset as plain terms per version, easy to shrink and rebuild.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DatasetSpec {
    pub versions: Vec<(String, Vec<[Term; 4]>)>,
}

impl DatasetSpec {
    pub fn builder(&self) -> DatasetBuilder {
        let mut b = DatasetBuilder::new();
        for (label, rows) in &self.versions {
            let v = b.add_version(label.clone()).expect("distinct labels");
            for [s, p, o, g] in rows {
                b.insert_terms(s.clone(), p.clone(), o.clone(), g.clone(), v)
                    .expect("graph names are IRIs");
            }
        }
        b
    }

    pub fn flat(&self) -> FlatDataset {
        self.builder().build_flat()
    }

    pub fn condensed(&self) -> CondensedDataset {
        self.builder().build_condensed()
    }

    pub fn row_count(&self) -> usize {
        self.versions.iter().map(|(_, rows)| rows.len()).sum()
    }
}

const SUBJECTS: [&str; 4] = ["ex:s0", "ex:s1", "ex:s2", "ex:s3"];
const PREDICATES: [&str; 3] = ["ex:p0", "ex:p1", "ex:p2"];
const GRAPHS: [&str; 4] = ["ng:A", "ng:B", "ng:C", vocab::DEFAULT_GRAPH];
/// Objects: subjects, integers and words, never two spellings of one number.
const LITERALS: [&str; 6] = ["1", "2", "3", "10", "a", "b"];

fn random_object(rng: &mut impl Rng) -> Term {
    if rng.gen_bool(0.3) {
        Term::iri(*SUBJECTS.choose(rng).expect("non-empty"))
    } else {
        Term::literal(*LITERALS.choose(rng).expect("non-empty"))
    }
}

/// Random store with at most 8 versions, 4 graphs and 60 rows.
pub fn random_dataset(rng: &mut impl Rng) -> DatasetSpec {
    let version_count = rng.gen_range(1..=8);
    let graph_count = rng.gen_range(1..=GRAPHS.len());
    let row_count = rng.gen_range(0..=60);
    let mut versions: Vec<(String, Vec<[Term; 4]>)> =
        (1..=version_count).map(|k| (format!("v:{k}"), Vec::new())).collect();
    // A shared pool makes quads recur across versions, as in real archives.
    let pool: Vec<[Term; 4]> = (0..rng.gen_range(1..=20))
        .map(|_| {
            [
                Term::iri(*SUBJECTS.choose(rng).expect("non-empty")),
                Term::iri(*PREDICATES.choose(rng).expect("non-empty")),
                random_object(rng),
                Term::iri(GRAPHS[rng.gen_range(0..graph_count)]),
            ]
        })
        .collect();
    for _ in 0..row_count {
        let quad = pool.choose(rng).expect("non-empty pool").clone();
        let rows = &mut versions[rng.gen_range(0..version_count)].1;
        if !rows.contains(&quad) {
            rows.push(quad);
        }
    }
    DatasetSpec { versions }
}

/// Synthetic evolving archive: `shared` quads hold in every version, each version has
/// `volatile` quads of its own, and each version adds `steps` quads kept by all later ones.
pub fn synthetic_dataset(versions: usize, steps: usize, shared: usize, volatile: usize) -> DatasetSpec {
    const SYNTHETIC_GRAPHS: [&str; 3] = ["ng:Gr-Lyon", "ng:IGN", "ng:OSM"];
    let unit = |subject: String, n: usize, height: String, floors: usize| -> [[Term; 4]; 2] {
        let s = Term::iri(format!("ex:bldg#{subject}"));
        let g = Term::iri(SYNTHETIC_GRAPHS[n % SYNTHETIC_GRAPHS.len()]);
        [
            [s.clone(), Term::iri("ex:height"), Term::literal(height), g.clone()],
            [s, Term::iri("ex:floors"), Term::literal(floors.to_string()), g],
        ]
    };
    let mut retained: Vec<[Term; 4]> = (0..shared)
        .flat_map(|n| unit(n.to_string(), n, format!("{}.5", 10 + n % 10), n % 7 + 1))
        .collect();
    let mut next = shared;
    let mut out = Vec::with_capacity(versions);
    for k in 1..=versions {
        let mut rows = retained.clone();
        for j in 0..volatile {
            rows.extend(unit(format!("t{j}"), j, format!("{}", 100 * k + j), k));
        }
        for _ in 0..steps {
            let added = unit(next.to_string(), next, format!("{}", 20 + next % 30), next % 7 + 1);
            next += 1;
            retained.extend(added.iter().cloned());
            rows.extend(added);
        }
        out.push((format!("v:{k}"), rows));
    }
    DatasetSpec { versions: out }
}

/// Random typeable flat algebra trees over the vocabulary of [`random_dataset`].
pub struct TreeGenerator<'a, R: Rng> {
    rng: &'a mut R,
    catalog: Option<&'a Catalog>,
    fresh: usize,
}

const S_VARS: [&str; 3] = ["a", "b", "c"];
const O_VARS: [&str; 3] = ["x", "y", "a"];
const G_VARS: [&str; 2] = ["g", "h"];

impl<'a, R: Rng> TreeGenerator<'a, R> {
    /// `catalog` supplies versioned IRIs and version labels for constants.
    pub fn new(rng: &'a mut R, catalog: Option<&'a Catalog>) -> Self {
        TreeGenerator {
            rng,
            catalog,
            fresh: 0,
        }
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items.choose(self.rng).expect("non-empty").clone()
    }

    fn vi_term(&mut self) -> Term {
        let vis: Vec<Term> = self
            .catalog
            .map(|c| c.vi.iter().map(|(id, _, _)| c.term(id).clone()).collect())
            .unwrap_or_default();
        if vis.is_empty() || self.rng.gen_bool(0.1) {
            Term::iri("vi:99")
        } else {
            self.pick(&vis)
        }
    }

    fn quad(&mut self) -> Algebra {
        let g_var = Var::new(self.pick(&G_VARS));
        let s = if self.rng.gen_bool(0.8) {
            PatternTerm::Var(Var::new(self.pick(&S_VARS)))
        } else {
            PatternTerm::iri(self.pick(&SUBJECTS))
        };
        let p = if self.rng.gen_bool(0.85) {
            PatternTerm::iri(self.pick(&PREDICATES))
        } else {
            PatternTerm::var("p")
        };
        let o = match self.rng.gen_range(0..10) {
            0 => PatternTerm::Var(g_var.clone()),
            1 => PatternTerm::Const(random_object(self.rng)),
            _ => PatternTerm::Var(Var::new(self.pick(&O_VARS))),
        };
        let g = if self.rng.gen_bool(0.15) {
            PatternTerm::Const(self.vi_term())
        } else {
            PatternTerm::Var(g_var)
        };
        Algebra::quad(s, p, o, g)
    }

    fn metadata(&mut self) -> Algebra {
        let var = Var::new(self.pick(&G_VARS));
        match self.rng.gen_range(0..3) {
            0 => Algebra::ViRestrict {
                vi: self.vi_term(),
                var,
            },
            1 => Algebra::GraphRestrict {
                graph: Term::iri(self.pick(&GRAPHS)),
                var,
            },
            _ => Algebra::VersionRestrict {
                version: Term::iri(format!("v:{}", self.rng.gen_range(1..=9))),
                var,
            },
        }
    }

    fn condition(&mut self, vars: &[Var]) -> Expression {
        let operand = |g: &mut Self| -> Expression {
            if !vars.is_empty() && g.rng.gen_bool(0.7) {
                Expression::Var(g.pick(vars))
            } else {
                Expression::Term(g.pick(&[Term::literal("2"), Term::literal("a"), Term::iri("ex:s1")]))
            }
        };
        match self.rng.gen_range(0..7) {
            0 => Expression::call(Function::Gt, vec![operand(self), Expression::Term(Term::literal("2"))]),
            1 => Expression::call(Function::Eq, vec![operand(self), operand(self)]),
            2 => Expression::call(Function::Neq, vec![operand(self), operand(self)]),
            3 => Expression::call(Function::Not, vec![Expression::call(Function::Eq, vec![operand(self), operand(self)])]),
            4 => Expression::call(
                Function::Or,
                vec![
                    Expression::call(Function::Le, vec![operand(self), Expression::Term(Term::literal("3"))]),
                    Expression::call(Function::Eq, vec![operand(self), Expression::Term(Term::literal("a"))]),
                ],
            ),
            5 => Expression::call(
                Function::Eq,
                vec![
                    Expression::call(Function::Concat, vec![operand(self), Expression::Term(Term::literal("!"))]),
                    Expression::Term(Term::literal("a!")),
                ],
            ),
            _ => Expression::Term(Term::boolean(self.rng.gen_bool(0.8))),
        }
    }

    fn subset(&mut self, vars: &[Var]) -> Vec<Var> {
        let out: Vec<Var> = vars.iter().filter(|_| self.rng.gen_bool(0.5)).cloned().collect();
        if out.is_empty() && !vars.is_empty() {
            vec![self.pick(vars)]
        } else {
            out
        }
    }

    fn aggregation(&mut self, keys: &[Var], input: &Algebra, vars: &[Var]) -> Aggregation {
        let function = self.pick(&AggregateFunction::ALL);
        let params = if function == AggregateFunction::GroupConcat {
            AggregationParams::group_concat(",")
        } else {
            AggregationParams::new(function)
        };
        let exprs = if function == AggregateFunction::Count && (vars.is_empty() || self.rng.gen_bool(0.4)) {
            Vec::new()
        } else if vars.is_empty() {
            vec![Expression::Term(Term::literal("1"))]
        } else {
            vec![Expression::Var(self.pick(vars))]
        };
        self.fresh += 1;
        Aggregation {
            exprs,
            params,
            group: Box::new(Algebra::group(keys.iter().cloned().map(Expression::Var).collect(), input.clone())),
            target: Var::new(format!("agg{}", self.fresh)),
        }
    }

    /// A random tree of at most `depth` operator levels.
    pub fn tree(&mut self, depth: usize) -> Algebra {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return if self.rng.gen_bool(0.8) { self.quad() } else { self.metadata() };
        }
        let child = |g: &mut Self| g.tree(depth - 1);
        match self.rng.gen_range(0..11) {
            0 | 1 => Algebra::join(child(self), child(self)),
            2 => Algebra::union(child(self), child(self)),
            3 => {
                let input = child(self);
                let cond = self.condition(&input.output_vars());
                Algebra::filter(vec![cond], input)
            }
            4 => {
                let (l, r) = (child(self), child(self));
                let mut vars = l.output_vars();
                vars.extend(r.output_vars());
                let cond = self.condition(&vars);
                Algebra::diff(l, r, cond)
            }
            5 => {
                let (l, r) = (child(self), child(self));
                let mut vars = l.output_vars();
                vars.extend(r.output_vars());
                let cond = self.condition(&vars);
                Algebra::left_join(l, r, cond)
            }
            6 | 7 => {
                let input = child(self);
                let vars = self.subset(&input.output_vars());
                Algebra::project(input, vars)
            }
            8 => {
                let input = child(self);
                let keys = self.subset(&input.output_vars());
                Algebra::group(keys.into_iter().map(Expression::Var).collect(), input)
            }
            _ => {
                let input = child(self);
                let vars = input.output_vars();
                let keys = if self.rng.gen_bool(0.2) { Vec::new() } else { self.subset(&vars) };
                let n = self.rng.gen_range(1..=3);
                let aggs: Vec<Aggregation> = (0..n).map(|_| self.aggregation(&keys, &input, &vars)).collect();
                if aggs.len() == 1 {
                    Algebra::Aggregation(aggs.into_iter().next().expect("one"))
                } else {
                    Algebra::AggregateJoin(aggs)
                }
            }
        }
    }
}

/// A random valid condensed mapping over `vars`, with bindings drawn from `catalog`.
pub fn random_mapping(rng: &mut impl Rng, catalog: &Catalog, vars: &[Var]) -> SolutionMapping {
    let terms: Vec<_> = catalog.dictionary.iter().map(|(id, _)| id).collect();
    let graphs: Vec<_> = catalog.vi.graphs().collect();
    let mut m = SolutionMapping::new().with_multiplicity(rng.gen_range(1..=3));
    for v in vars {
        let b = match rng.gen_range(0..5) {
            0 if !terms.is_empty() => Binding::Value(catalog.term(*terms.choose(rng).expect("non-empty")).clone()),
            1 | 2 if !graphs.is_empty() => {
                let g = *graphs.choose(rng).expect("non-empty");
                let all: Vec<_> = catalog.vi.versions_of(g).iter().collect();
                let mut set: VersionSet = all.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
                if set.is_empty() {
                    set.insert(*all.choose(rng).expect("graph has versions"));
                }
                Binding::Graph(g, set)
            }
            3 if !graphs.is_empty() && rng.gen_bool(0.3) => Binding::AnyGraph,
            _ if !terms.is_empty() => Binding::Id(*terms.choose(rng).expect("non-empty")),
            _ => continue,
        };
        m.insert(v.clone(), b);
    }
    m
}
