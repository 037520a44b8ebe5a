use crate::model::Term;

use super::{AggregationParams, AlgebraError, Expression, Representation, Var};

/// A quad-pattern position: a constant term or a variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum PatternTerm {
    Const(Term),
    Var(Var),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(Var::new(name))
    }

    pub fn iri(iri: &str) -> Self {
        PatternTerm::Const(Term::iri(iri))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }
}

/// One aggregate: `function(exprs; params)` over the groups of `group`, bound to `target`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Aggregation {
    pub exprs: Vec<Expression>,
    pub params: AggregationParams,
    /// Always an [`Algebra::Group`] node.
    pub group: Box<Algebra>,
    pub target: Var,
}

impl Aggregation {
    /// Key expressions and input of the grouped subtree.
    pub fn group_parts(&self) -> Result<(&[Expression], &Algebra), AlgebraError> {
        match self.group.as_ref() {
            Algebra::Group { keys, input } => Ok((keys, input)),
            other => Err(AlgebraError::Malformed(format!(
                "aggregation over a non-group operator {}",
                other.name()
            ))),
        }
    }

    /// Variables bound by the group keys.
    pub fn key_vars(&self) -> Vec<Var> {
        match self.group.as_ref() {
            Algebra::Group { keys, .. } => key_vars(keys),
            _ => Vec::new(),
        }
    }

    /// Arguments the aggregate function consumes, i.e. without a trailing `Card`.
    pub fn arguments(&self) -> &[Expression] {
        match self.exprs.split_last() {
            Some((Expression::Card, rest)) => rest,
            _ => &self.exprs,
        }
    }
}

pub(crate) fn key_vars(keys: &[Expression]) -> Vec<Var> {
    let mut out: Vec<Var> = Vec::new();
    for v in keys.iter().filter_map(Expression::as_var) {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// Query algebra shared by both engines. Flat trees never contain `Transform` nodes or the
/// `Card` expression; translated trees may.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Algebra {
    QuadPattern {
        s: PatternTerm,
        p: PatternTerm,
        o: PatternTerm,
        g: PatternTerm,
    },
    Join(Box<Algebra>, Box<Algebra>),
    Union(Box<Algebra>, Box<Algebra>),
    Filter {
        conditions: Vec<Expression>,
        input: Box<Algebra>,
    },
    Diff {
        left: Box<Algebra>,
        right: Box<Algebra>,
        condition: Expression,
    },
    LeftJoin {
        left: Box<Algebra>,
        right: Box<Algebra>,
        condition: Expression,
    },
    Projection {
        input: Box<Algebra>,
        vars: Vec<Var>,
    },
    Group {
        keys: Vec<Expression>,
        input: Box<Algebra>,
    },
    Aggregation(Aggregation),
    AggregateJoin(Vec<Aggregation>),
    /// Binds `var` to the graph of one versioned IRI.
    ViRestrict { vi: Term, var: Var },
    /// Binds `var` to every versioned graph of one named graph.
    GraphRestrict { graph: Term, var: Var },
    /// Binds `var` to every graph present in one version.
    VersionRestrict { version: Term, var: Var },
    /// Raises `var` from `from` to `to` in every mapping of `input`.
    Transform {
        var: Var,
        from: Representation,
        to: Representation,
        input: Box<Algebra>,
    },
}

impl Algebra {
    pub fn quad(s: PatternTerm, p: PatternTerm, o: PatternTerm, g: PatternTerm) -> Self {
        Algebra::QuadPattern { s, p, o, g }
    }

    pub fn join(l: Algebra, r: Algebra) -> Self {
        Algebra::Join(Box::new(l), Box::new(r))
    }

    pub fn union(l: Algebra, r: Algebra) -> Self {
        Algebra::Union(Box::new(l), Box::new(r))
    }

    pub fn filter(conditions: Vec<Expression>, input: Algebra) -> Self {
        Algebra::Filter {
            conditions,
            input: Box::new(input),
        }
    }

    pub fn diff(left: Algebra, right: Algebra, condition: Expression) -> Self {
        Algebra::Diff {
            left: Box::new(left),
            right: Box::new(right),
            condition,
        }
    }

    pub fn left_join(left: Algebra, right: Algebra, condition: Expression) -> Self {
        Algebra::LeftJoin {
            left: Box::new(left),
            right: Box::new(right),
            condition,
        }
    }

    pub fn project(input: Algebra, vars: Vec<Var>) -> Self {
        Algebra::Projection {
            input: Box::new(input),
            vars,
        }
    }

    pub fn group(keys: Vec<Expression>, input: Algebra) -> Self {
        Algebra::Group {
            keys,
            input: Box::new(input),
        }
    }

    pub fn transform(var: Var, from: Representation, to: Representation, input: Algebra) -> Self {
        Algebra::Transform {
            var,
            from,
            to,
            input: Box::new(input),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algebra::QuadPattern { .. } => "quad",
            Algebra::Join(..) => "join",
            Algebra::Union(..) => "union",
            Algebra::Filter { .. } => "filter",
            Algebra::Diff { .. } => "diff",
            Algebra::LeftJoin { .. } => "left-join",
            Algebra::Projection { .. } => "project",
            Algebra::Group { .. } => "group",
            Algebra::Aggregation(_) => "aggregate",
            Algebra::AggregateJoin(_) => "aggregate-join",
            Algebra::ViRestrict { .. } => "vi-restrict",
            Algebra::GraphRestrict { .. } => "graph-restrict",
            Algebra::VersionRestrict { .. } => "version-restrict",
            Algebra::Transform { .. } => "transform",
        }
    }

    /// Direct sub-operators, in evaluation order.
    pub fn children(&self) -> Vec<&Algebra> {
        match self {
            Algebra::QuadPattern { .. }
            | Algebra::ViRestrict { .. }
            | Algebra::GraphRestrict { .. }
            | Algebra::VersionRestrict { .. } => Vec::new(),
            Algebra::Join(l, r) | Algebra::Union(l, r) => vec![l, r],
            Algebra::Diff { left, right, .. } | Algebra::LeftJoin { left, right, .. } => {
                vec![left, right]
            }
            Algebra::Filter { input, .. }
            | Algebra::Projection { input, .. }
            | Algebra::Group { input, .. }
            | Algebra::Transform { input, .. } => vec![input],
            Algebra::Aggregation(a) => vec![&a.group],
            Algebra::AggregateJoin(aggs) => aggs.iter().map(|a| a.group.as_ref()).collect(),
        }
    }

    /// Expressions held directly by this node.
    pub fn expressions(&self) -> Vec<&Expression> {
        match self {
            Algebra::Filter { conditions, .. } => conditions.iter().collect(),
            Algebra::Diff { condition, .. } | Algebra::LeftJoin { condition, .. } => {
                vec![condition]
            }
            Algebra::Group { keys, .. } => keys.iter().collect(),
            Algebra::Aggregation(a) => a.exprs.iter().collect(),
            Algebra::AggregateJoin(aggs) => aggs.iter().flat_map(|a| a.exprs.iter()).collect(),
            _ => Vec::new(),
        }
    }

    /// Variables that can be bound in the solutions of this operator, in first-seen order.
    pub fn output_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_output_vars(&mut out);
        out
    }

    fn collect_output_vars(&self, out: &mut Vec<Var>) {
        let mut push = |v: &Var| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        };
        match self {
            Algebra::QuadPattern { s, p, o, g } => {
                [s, p, o, g].into_iter().filter_map(PatternTerm::as_var).for_each(push)
            }
            Algebra::Join(l, r) | Algebra::Union(l, r) => {
                l.collect_output_vars(out);
                r.collect_output_vars(out);
            }
            Algebra::LeftJoin { left, right, .. } => {
                left.collect_output_vars(out);
                right.collect_output_vars(out);
            }
            Algebra::Diff { left, .. } => left.collect_output_vars(out),
            Algebra::Filter { input, .. } | Algebra::Transform { input, .. } => {
                input.collect_output_vars(out)
            }
            Algebra::Projection { vars, .. } => vars.iter().for_each(push),
            Algebra::Group { keys, .. } => key_vars(keys).iter().for_each(push),
            Algebra::Aggregation(a) => {
                a.key_vars().iter().for_each(&mut push);
                push(&a.target);
            }
            Algebra::AggregateJoin(aggs) => {
                for a in aggs {
                    a.key_vars().iter().for_each(&mut push);
                }
                for a in aggs {
                    push(&a.target);
                }
            }
            Algebra::ViRestrict { var, .. }
            | Algebra::GraphRestrict { var, .. }
            | Algebra::VersionRestrict { var, .. } => push(var),
        }
    }

    /// Every variable mentioned anywhere in the tree, in first-seen order.
    pub fn all_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.walk(&mut |node| {
            for v in node.output_vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            for e in node.expressions() {
                e.collect_vars(&mut out);
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&Algebra)) {
        f(self);
        for child in self.children() {
            child.walk(f);
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    pub fn transform_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |node| {
            if matches!(node, Algebra::Transform { .. }) {
                n += 1;
            }
        });
        n
    }

    /// Structural checks independent of typing: arities, aggregation shape, transform
    /// direction and `Card` placement.
    pub fn validate(&self) -> Result<(), AlgebraError> {
        let mut result = Ok(());
        self.walk(&mut |node| {
            if result.is_err() {
                return;
            }
            result = node.validate_node();
        });
        result
    }

    fn validate_node(&self) -> Result<(), AlgebraError> {
        let aggregation_exprs = match self {
            Algebra::Aggregation(a) => vec![a],
            Algebra::AggregateJoin(aggs) => aggs.iter().collect(),
            _ => Vec::new(),
        };
        for e in self.expressions() {
            check_arity(e)?;
        }
        for a in &aggregation_exprs {
            a.group_parts()?;
            if a.arguments().iter().any(Expression::contains_card) {
                return Err(AlgebraError::Malformed(
                    "card may only close an aggregation argument list".into(),
                ));
            }
            let n = a.arguments().len();
            let ok = match a.params.function() {
                super::AggregateFunction::Count => n <= 1,
                _ => n == 1,
            };
            if !ok {
                return Err(AlgebraError::Malformed(format!(
                    "{} takes {} argument(s), found {n}",
                    a.params.function().name(),
                    if a.params.function() == super::AggregateFunction::Count {
                        "0 or 1"
                    } else {
                        "1"
                    }
                )));
            }
        }
        if aggregation_exprs.is_empty() && self.expressions().iter().any(|e| e.contains_card()) {
            return Err(AlgebraError::Malformed(
                "card outside an aggregation argument list".into(),
            ));
        }
        match self {
            Algebra::AggregateJoin(aggs) if aggs.is_empty() => {
                Err(AlgebraError::Malformed("empty aggregate join".into()))
            }
            Algebra::Transform { from, to, .. } if from >= to => Err(AlgebraError::Malformed(
                format!("transform must raise the representation, found {from}⇝{to}"),
            )),
            _ => Ok(()),
        }
    }
}

fn check_arity(e: &Expression) -> Result<(), AlgebraError> {
    if let Expression::Call(f, args) = e {
        if !f.accepts_arity(args.len()) {
            return Err(AlgebraError::Malformed(format!(
                "{} applied to {} argument(s)",
                f.symbol(),
                args.len()
            )));
        }
        args.iter().try_for_each(check_arity)?;
    }
    Ok(())
}
