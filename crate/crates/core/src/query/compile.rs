//! Compilation of a parsed query to the flat algebra.

use crate::algebra::{Aggregation, AggregationParams, AggregateFunction, Algebra, Expression, Function, PatternTerm, Var};
use crate::model::{vocab, Term};

use super::parser::{GroupPattern, PatternElement, Query, SelectItem, Selection, TriplePattern};
use super::QueryError;

/// Hidden graph variable of patterns outside any `GRAPH` block.
const DEFAULT_GRAPH_VAR: &str = "__default";

pub fn compile(query: &Query) -> Result<Algebra, QueryError> {
    let mut compiler = Compiler { fresh: 0 };
    let body = compiler.where_clause(&query.pattern)?;
    compiler.select(query, body)
}

#[derive(Clone)]
enum GraphContext {
    Default,
    Named(Var),
}

impl GraphContext {
    fn term(&self) -> PatternTerm {
        match self {
            GraphContext::Default => PatternTerm::Var(Var::new(DEFAULT_GRAPH_VAR)),
            GraphContext::Named(v) => PatternTerm::Var(v.clone()),
        }
    }
}

struct Compiler {
    fresh: usize,
}

fn compile_error(message: impl Into<String>) -> QueryError {
    QueryError::Compile(message.into())
}

fn join_opt(current: Option<Algebra>, next: Algebra) -> Algebra {
    match current {
        Some(c) => Algebra::join(c, next),
        None => next,
    }
}

fn conjunction(mut conditions: Vec<Expression>) -> Expression {
    match conditions.len() {
        0 => Expression::Term(Term::boolean(true)),
        1 => conditions.pop().expect("one condition"),
        _ => {
            let first = conditions.remove(0);
            conditions
                .into_iter()
                .fold(first, |acc, c| Expression::call(Function::And, vec![acc, c]))
        }
    }
}

/// The restriction a metadata triple stands for, if its predicate is a metadata predicate.
fn metadata_restriction(t: &TriplePattern) -> Result<Option<Algebra>, QueryError> {
    let PatternTerm::Const(Term::Iri(p)) = &t.p else {
        return Ok(None);
    };
    let version_of = vocab::is_version_of(p);
    if !version_of && !vocab::is_in_version(p) {
        return Ok(None);
    }
    let PatternTerm::Var(var) = &t.s else {
        return Err(compile_error(format!("subject of {p} must be a graph variable")));
    };
    let PatternTerm::Const(object) = &t.o else {
        return Err(compile_error(format!("object of {p} must be a constant")));
    };
    Ok(Some(if version_of {
        Algebra::GraphRestrict {
            graph: object.clone(),
            var: var.clone(),
        }
    } else {
        Algebra::VersionRestrict {
            version: object.clone(),
            var: var.clone(),
        }
    }))
}

impl Compiler {
    fn where_clause(&mut self, pattern: &GroupPattern) -> Result<Algebra, QueryError> {
        let mut restrictions = Vec::new();
        let mut rest = GroupPattern::default();
        for el in &pattern.elements {
            match el {
                PatternElement::Triple(t) => match metadata_restriction(t)? {
                    Some(r) => restrictions.push(r),
                    None => rest.elements.push(el.clone()),
                },
                _ => rest.elements.push(el.clone()),
            }
        }
        let (body, filters) = self.group_parts(&rest, &GraphContext::Default)?;
        let mut current = body;
        for r in restrictions {
            current = Some(join_opt(current, r));
        }
        let current = current.ok_or_else(|| compile_error("empty WHERE clause"))?;
        Ok(if filters.is_empty() {
            current
        } else {
            Algebra::filter(filters, current)
        })
    }

    fn group(&mut self, pattern: &GroupPattern, ctx: &GraphContext) -> Result<Algebra, QueryError> {
        let (body, filters) = self.group_parts(pattern, ctx)?;
        let body = body.ok_or_else(|| QueryError::UnsupportedFeature("empty group pattern".into()))?;
        Ok(if filters.is_empty() {
            body
        } else {
            Algebra::filter(filters, body)
        })
    }

    /// Joins the elements of a group left to right; filters are returned separately so the
    /// caller decides whether they close the group or condition an optional.
    fn group_parts(
        &mut self,
        pattern: &GroupPattern,
        ctx: &GraphContext,
    ) -> Result<(Option<Algebra>, Vec<Expression>), QueryError> {
        let mut current: Option<Algebra> = None;
        let mut filters = Vec::new();
        let mut default_used = false;
        for el in &pattern.elements {
            match el {
                PatternElement::Triple(t) => {
                    if metadata_restriction(t)?.is_some() {
                        return Err(compile_error(
                            "metadata triples are only supported at the top level of WHERE",
                        ));
                    }
                    default_used |= matches!(ctx, GraphContext::Default);
                    let quad = Algebra::quad(t.s.clone(), t.p.clone(), t.o.clone(), ctx.term());
                    current = Some(join_opt(current, quad));
                }
                PatternElement::Graph(name, inner) => {
                    let block = match name {
                        PatternTerm::Var(v) => self.group(inner, &GraphContext::Named(v.clone()))?,
                        PatternTerm::Const(vi) => {
                            self.fresh += 1;
                            let var = Var::new(format!("__g{}", self.fresh));
                            let body = self.group(inner, &GraphContext::Named(var.clone()))?;
                            Algebra::join(
                                body,
                                Algebra::ViRestrict {
                                    vi: vi.clone(),
                                    var,
                                },
                            )
                        }
                    };
                    current = Some(join_opt(current, block));
                }
                PatternElement::Group(inner) => {
                    let block = self.group(inner, ctx)?;
                    current = Some(join_opt(current, block));
                }
                PatternElement::Union(alternatives) => {
                    let mut branches = alternatives.iter().map(|g| self.group(g, ctx));
                    let first = branches.next().expect("union has alternatives")?;
                    let mut block = first;
                    for b in branches {
                        block = Algebra::union(block, b?);
                    }
                    current = Some(join_opt(current, block));
                }
                PatternElement::Optional(inner) => {
                    let left = current.take().ok_or_else(|| {
                        QueryError::UnsupportedFeature("OPTIONAL without a preceding pattern".into())
                    })?;
                    let (right, conditions) = self.group_parts(inner, ctx)?;
                    let right = right.ok_or_else(|| {
                        QueryError::UnsupportedFeature("empty OPTIONAL pattern".into())
                    })?;
                    current = Some(Algebra::left_join(left, right, conjunction(conditions)));
                }
                PatternElement::Minus(inner) => {
                    let left = current.take().ok_or_else(|| {
                        QueryError::UnsupportedFeature("MINUS without a preceding pattern".into())
                    })?;
                    let right = self.group(inner, ctx)?;
                    let left_vars = left.output_vars();
                    if !right.output_vars().iter().any(|v| left_vars.contains(v) && !v.is_hidden()) {
                        return Err(compile_error("MINUS operands share no variable"));
                    }
                    current = Some(Algebra::diff(left, right, Expression::Term(Term::boolean(true))));
                }
                PatternElement::Filter(e) => filters.push(e.clone()),
            }
        }
        if default_used {
            let restriction = Algebra::GraphRestrict {
                graph: Term::iri(vocab::DEFAULT_GRAPH),
                var: Var::new(DEFAULT_GRAPH_VAR),
            };
            current = Some(join_opt(current, restriction));
        }
        Ok((current, filters))
    }

    fn select(&mut self, query: &Query, body: Algebra) -> Result<Algebra, QueryError> {
        let where_vars = body.all_vars();
        let items: Vec<SelectItem> = match &query.selection {
            Selection::All => {
                if !query.group_by.is_empty() {
                    return Err(compile_error("SELECT * cannot be combined with GROUP BY"));
                }
                body.output_vars()
                    .into_iter()
                    .filter(|v| !v.is_hidden())
                    .map(SelectItem::Var)
                    .collect()
            }
            Selection::Items(items) => items.clone(),
        };
        let aggregated =
            !query.group_by.is_empty() || items.iter().any(|i| matches!(i, SelectItem::Aggregate { .. }));
        for e in &query.group_by {
            if let Some(v) = e.vars().into_iter().find(|v| !where_vars.contains(v)) {
                return Err(compile_error(format!("grouping variable {v} does not occur in WHERE")));
            }
        }
        let group_keys: Vec<Var> = query.group_by.iter().filter_map(|e| e.as_var().cloned()).collect();
        let mut projected = Vec::new();
        let mut aggregations = Vec::new();
        for item in &items {
            match item {
                SelectItem::Var(v) => {
                    if aggregated && !group_keys.contains(v) {
                        return Err(compile_error(format!("{v} is neither grouped nor aggregated")));
                    }
                    if !aggregated && !where_vars.contains(v) {
                        return Err(compile_error(format!("{v} does not occur in WHERE")));
                    }
                    projected.push(v.clone());
                }
                SelectItem::Aggregate { call, alias } => {
                    let target = alias
                        .clone()
                        .unwrap_or_else(|| Var::new((aggregations.len() + 1).to_string()));
                    if where_vars.contains(&target) || projected.contains(&target) {
                        return Err(compile_error(format!("aggregate alias {target} is already bound")));
                    }
                    if let Some(arg) = &call.argument {
                        if let Some(v) = arg.vars().into_iter().find(|v| !where_vars.contains(v)) {
                            return Err(compile_error(format!("{v} does not occur in WHERE")));
                        }
                    }
                    let params = match call.function {
                        AggregateFunction::GroupConcat => {
                            AggregationParams::group_concat(call.separator.clone().unwrap_or_default())
                        }
                        f => AggregationParams::new(f),
                    };
                    aggregations.push(Aggregation {
                        exprs: call.argument.iter().cloned().collect(),
                        params,
                        group: Box::new(Algebra::group(query.group_by.clone(), body.clone())),
                        target: target.clone(),
                    });
                    projected.push(target);
                }
            }
        }
        let body = if !aggregated {
            body
        } else if aggregations.is_empty() {
            Algebra::group(query.group_by.clone(), body)
        } else if aggregations.len() == 1 {
            Algebra::Aggregation(aggregations.pop().expect("one aggregation"))
        } else {
            Algebra::AggregateJoin(aggregations)
        };
        Ok(Algebra::project(body, projected))
    }
}

#[cfg(test)]
mod tests {
    use super::super::prepare;
    use crate::algebra::parse_algebra;

    fn same(query: &str, expected: &str) {
        assert_eq!(prepare(query).unwrap(), parse_algebra(expected).unwrap());
    }

    #[test]
    fn named_graph_query_compiles() {
        same(
            "SELECT ?height WHERE {
                GRAPH ?vng { ?s <building:height> ?height }
                ?vng v:is-version-of ng:Gr-Lyon .
            }",
            "(project (?height) (join (quad ?s <building:height> ?height ?vng) \
             (graph-restrict <ng:Gr-Lyon> ?vng)))",
        );
    }

    #[test]
    fn default_graph_pattern() {
        same(
            "SELECT ?s WHERE { ?s ?p ?o }",
            "(project (?s) (join (quad ?s ?p ?o ?__default) (graph-restrict <default> ?__default)))",
        );
    }

    #[test]
    fn filter_query_compiles() {
        same(
            r#"SELECT ?height (GROUP_CONCAT(CONCAT("B.", ?b); separator=",") AS ?concatbuilding) WHERE {
                GRAPH ?vng { ?b <ex:height> ?height . }
                FILTER(?height > 10)
            } GROUP BY ?height"#,
            r#"(project (?height ?concatbuilding)
                 (aggregate ?concatbuilding group_concat "," ((concat "B." ?b))
                   (group (?height) (filter ((> ?height 10)) (quad ?b <ex:height> ?height ?vng)))))"#,
        );
    }

    #[test]
    fn versioned_iri_graph_block() {
        same(
            "SELECT ?h WHERE { GRAPH <vi:1> { ?s <ex:height> ?h } }",
            "(project (?h) (join (quad ?s <ex:height> ?h ?__g1) (vi-restrict <vi:1> ?__g1)))",
        );
    }

    #[test]
    fn unnamed_aggregates_are_numbered() {
        let a = prepare("SELECT (COUNT(*) AS ?n) SUM(?h) WHERE { GRAPH ?g { ?s <ex:height> ?h } }").unwrap();
        assert_eq!(
            a.output_vars().iter().map(|v| v.name().to_owned()).collect::<Vec<_>>(),
            vec!["n", "2"]
        );
    }

    #[test]
    fn compile_errors() {
        use super::QueryError;
        for q in [
            "SELECT ?x WHERE { ?s ?p ?o }",
            "SELECT ?s (COUNT(*) AS ?n) WHERE { ?s ?p ?o }",
            "SELECT ?h WHERE { GRAPH ?g { ?s <ex:height> ?h } ?g v:in-version ?v }",
            "SELECT ?h WHERE { GRAPH ?g { ?s <ex:height> ?h . ?g v:in-version v:1 } }",
            "SELECT ?h WHERE { GRAPH ?g { ?s <ex:height> ?h } MINUS { GRAPH ?k { ?a ?b ?c } } }",
        ] {
            assert!(matches!(prepare(q), Err(QueryError::Compile(_))), "{q}");
        }
    }
}
