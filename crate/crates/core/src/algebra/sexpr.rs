//! Stable textual form of algebra trees, e.g.
//! `(project (?height) (join (quad ?s <building:height> ?height ?vng) (graph-restrict <ng:Gr-Lyon> ?vng)))`.

use std::fmt::{self, Write};

use crate::model::{escape_literal, is_numeric_lexical, LiteralKind, Term, XSD_BOOLEAN, XSD_STRING};

use super::{
    AggregateFunction, Aggregation, AggregationParams, Algebra, AlgebraError, Expression,
    Function, PatternTerm, Representation, Var,
};

/// Numeric literals print bare, other literals quoted with a datatype suffix where needed.
pub fn render_term(term: &Term) -> String {
    match term {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Literal { lexical, kind } => match kind {
            LiteralKind::Numeric => lexical.to_string(),
            LiteralKind::Plain => format!("\"{}\"", escape_literal(lexical)),
            LiteralKind::String => format!("\"{}\"^^<{XSD_STRING}>", escape_literal(lexical)),
            LiteralKind::Boolean => format!("\"{}\"^^<{XSD_BOOLEAN}>", escape_literal(lexical)),
        },
    }
}

fn render_pattern(t: &PatternTerm) -> String {
    match t {
        PatternTerm::Const(term) => render_term(term),
        PatternTerm::Var(v) => v.to_string(),
    }
}

fn render_list<T: fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(" "))
}

/// Head of a node and its inline arguments, without the child operators.
fn head(node: &Algebra) -> String {
    match node {
        Algebra::QuadPattern { s, p, o, g } => format!(
            "quad {} {} {} {}",
            render_pattern(s),
            render_pattern(p),
            render_pattern(o),
            render_pattern(g)
        ),
        Algebra::Join(..) => "join".into(),
        Algebra::Union(..) => "union".into(),
        Algebra::Filter { conditions, .. } => format!("filter {}", render_list(conditions)),
        Algebra::Diff { .. } => "diff".into(),
        Algebra::LeftJoin { .. } => "left-join".into(),
        Algebra::Projection { vars, .. } => format!("project {}", render_list(vars)),
        Algebra::Group { keys, .. } => format!("group {}", render_list(keys)),
        Algebra::Aggregation(a) => aggregation_head(a),
        Algebra::AggregateJoin(_) => "aggregate-join".into(),
        Algebra::ViRestrict { vi, var } => format!("vi-restrict {} {var}", render_term(vi)),
        Algebra::GraphRestrict { graph, var } => {
            format!("graph-restrict {} {var}", render_term(graph))
        }
        Algebra::VersionRestrict { version, var } => {
            format!("version-restrict {} {var}", render_term(version))
        }
        Algebra::Transform { var, from, to, .. } => format!("transform {var} {from} {to}"),
    }
}

fn aggregation_head(a: &Aggregation) -> String {
    let mut out = format!("aggregate {} {}", a.target, a.params.function().name());
    if let Some(sep) = a.params.separator() {
        write!(out, " \"{}\"", escape_literal(sep)).unwrap();
    }
    write!(out, " {}", render_list(&a.exprs)).unwrap();
    out
}

/// Trailing expression of diff and optional nodes, printed after the children.
fn tail(node: &Algebra) -> Option<&Expression> {
    match node {
        Algebra::Diff { condition, .. } | Algebra::LeftJoin { condition, .. } => Some(condition),
        _ => None,
    }
}

/// Children as printed: aggregate joins list their aggregations, not the bare groups.
enum Printed<'a> {
    Node(&'a Algebra),
    Agg(&'a Aggregation),
}

fn printed_children(node: &Algebra) -> Vec<Printed<'_>> {
    match node {
        Algebra::AggregateJoin(aggs) => aggs.iter().map(Printed::Agg).collect(),
        Algebra::Aggregation(a) => vec![Printed::Node(&a.group)],
        _ => node.children().into_iter().map(Printed::Node).collect(),
    }
}

fn write_printed(p: &Printed<'_>, out: &mut String, indent: Option<usize>) {
    match p {
        Printed::Node(n) => write_node(n, out, indent),
        Printed::Agg(a) => write_parts(&aggregation_head(a), &[Printed::Node(&a.group)], None, out, indent),
    }
}

fn write_node(node: &Algebra, out: &mut String, indent: Option<usize>) {
    write_parts(&head(node), &printed_children(node), tail(node), out, indent);
}

fn write_parts(
    head: &str,
    children: &[Printed<'_>],
    tail: Option<&Expression>,
    out: &mut String,
    indent: Option<usize>,
) {
    out.push('(');
    out.push_str(head);
    for child in children {
        match indent {
            Some(depth) => {
                out.push('\n');
                out.push_str(&"  ".repeat(depth + 1));
                write_printed(child, out, Some(depth + 1));
            }
            None => {
                out.push(' ');
                write_printed(child, out, None);
            }
        }
    }
    if let Some(e) = tail {
        write!(out, " {e}").unwrap();
    }
    out.push(')');
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_node(self, &mut out, None);
        f.write_str(&out)
    }
}

impl Algebra {
    /// Indented multi-line rendering; parses back like the single-line form.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        write_node(self, &mut out, Some(0));
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Sx {
    List(Vec<Sx>, usize),
    Atom(String, usize),
    Var(Var, usize),
    Term(Term, usize),
    Str(String, usize),
}

impl Sx {
    fn pos(&self) -> usize {
        match self {
            Sx::List(_, p) | Sx::Atom(_, p) | Sx::Var(_, p) | Sx::Term(_, p) | Sx::Str(_, p) => *p,
        }
    }
}

fn err(pos: usize, message: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse {
        position: pos,
        message: message.into(),
    }
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn read(&mut self) -> Result<Sx, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        let c = self.rest().chars().next().ok_or_else(|| err(start, "unexpected end of input"))?;
        match c {
            '(' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    if self.rest().starts_with(')') {
                        self.pos += 1;
                        return Ok(Sx::List(items, start));
                    }
                    items.push(self.read()?);
                }
            }
            ')' => Err(err(start, "unbalanced ')'")),
            '"' => {
                let (lexical, len) = read_quoted(self.rest()).ok_or_else(|| err(start, "bad string"))?;
                self.pos += len;
                if let Some(suffix) = self.rest().strip_prefix("^^<") {
                    let end = suffix.find('>').ok_or_else(|| err(self.pos, "bad datatype"))?;
                    let datatype = suffix[..end].to_owned();
                    self.pos += end + 4;
                    return Ok(Sx::Term(Term::typed_literal(lexical, &datatype), start));
                }
                Ok(Sx::Str(lexical, start))
            }
            '<' => {
                let word_end = self
                    .rest()
                    .find(char::is_whitespace)
                    .unwrap_or(self.rest().len());
                let word = &self.rest()[..word_end];
                match word.find('>') {
                    Some(close) if close > 0 => {
                        let iri = word[1..close].to_owned();
                        self.pos += close + 1;
                        Ok(Sx::Term(Term::iri(iri), start))
                    }
                    _ => self.atom(start),
                }
            }
            '?' => {
                self.pos += 1;
                let name_len = self
                    .rest()
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(self.rest().len());
                if name_len == 0 {
                    return Err(err(start, "empty variable name"));
                }
                let name = self.rest()[..name_len].to_owned();
                self.pos += name_len;
                Ok(Sx::Var(Var::new(name), start))
            }
            _ => self.atom(start),
        }
    }

    fn atom(&mut self, start: usize) -> Result<Sx, AlgebraError> {
        let len = self
            .rest()
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(self.rest().len());
        let word = self.rest()[..len].to_owned();
        self.pos += len;
        if is_numeric_lexical(&word) {
            return Ok(Sx::Term(Term::literal(word), start));
        }
        Ok(Sx::Atom(word, start))
    }
}

/// Reads a quoted string with `\" \\ \n \t` escapes; returns it and the bytes consumed.
fn read_quoted(s: &str) -> Option<(String, usize)> {
    let mut out = String::new();
    let mut chars = s.char_indices().skip(1);
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Some((out, i + 1)),
            '\\' => match chars.next()?.1 {
                '"' => out.push('"'),
                '\\' => out.push('\\'),
                'n' => out.push('\n'),
                't' => out.push('\t'),
                _ => return None,
            },
            c => out.push(c),
        }
    }
    None
}

fn read_one(text: &str) -> Result<Sx, AlgebraError> {
    let mut reader = Reader { text, pos: 0 };
    let sx = reader.read()?;
    reader.skip_ws();
    if reader.pos != text.len() {
        return Err(err(reader.pos, "trailing input"));
    }
    Ok(sx)
}

pub fn parse_algebra(text: &str) -> Result<Algebra, AlgebraError> {
    let tree = to_algebra(&read_one(text)?)?;
    tree.validate()?;
    Ok(tree)
}

pub fn parse_expression(text: &str) -> Result<Expression, AlgebraError> {
    to_expression(&read_one(text)?)
}

fn to_term(sx: &Sx) -> Result<Term, AlgebraError> {
    match sx {
        Sx::Term(t, _) => Ok(t.clone()),
        Sx::Str(s, _) => Ok(Term::Literal {
            lexical: s.as_str().into(),
            kind: LiteralKind::Plain,
        }),
        other => Err(err(other.pos(), "expected a term")),
    }
}

fn to_var(sx: &Sx) -> Result<Var, AlgebraError> {
    match sx {
        Sx::Var(v, _) => Ok(v.clone()),
        other => Err(err(other.pos(), "expected a variable")),
    }
}

fn to_pattern(sx: &Sx) -> Result<PatternTerm, AlgebraError> {
    match sx {
        Sx::Var(v, _) => Ok(PatternTerm::Var(v.clone())),
        other => to_term(other).map(PatternTerm::Const),
    }
}

fn to_expression(sx: &Sx) -> Result<Expression, AlgebraError> {
    match sx {
        Sx::Var(v, _) => Ok(Expression::Var(v.clone())),
        Sx::Atom(a, _) if a == "card" => Ok(Expression::Card),
        Sx::List(items, pos) => {
            let (first, args) = items.split_first().ok_or_else(|| err(*pos, "empty call"))?;
            let function = match first {
                Sx::Atom(a, _) => Function::from_symbol(a),
                // `<` is read as an atom, never as an IRI, when followed by whitespace.
                _ => None,
            }
            .ok_or_else(|| err(first.pos(), "unknown function"))?;
            Ok(Expression::Call(
                function,
                args.iter().map(to_expression).collect::<Result<_, _>>()?,
            ))
        }
        Sx::Atom(a, pos) => Err(err(*pos, format!("unexpected atom {a:?}"))),
        other => to_term(other).map(Expression::Term),
    }
}

fn list_of<'a>(sx: &'a Sx, what: &str) -> Result<&'a [Sx], AlgebraError> {
    match sx {
        Sx::List(items, _) => Ok(items),
        other => Err(err(other.pos(), format!("expected a list of {what}"))),
    }
}

fn to_repr(sx: &Sx) -> Result<Representation, AlgebraError> {
    match sx {
        Sx::Atom(a, pos) => Representation::parse(a).ok_or_else(|| err(*pos, "unknown representation")),
        other => Err(err(other.pos(), "expected a representation")),
    }
}

fn to_aggregation(sx: &Sx) -> Result<Aggregation, AlgebraError> {
    let Sx::List(items, pos) = sx else {
        return Err(err(sx.pos(), "expected an aggregation"));
    };
    match items.as_slice() {
        [Sx::Atom(head, _), rest @ ..] if head == "aggregate" => {
            let (target, rest) = rest.split_first().ok_or_else(|| err(*pos, "missing target"))?;
            let (function, rest) = rest.split_first().ok_or_else(|| err(*pos, "missing function"))?;
            let function = match function {
                Sx::Atom(name, _) => AggregateFunction::from_name(name),
                _ => None,
            }
            .ok_or_else(|| err(function.pos(), "unknown aggregate function"))?;
            let (params, rest) = if function == AggregateFunction::GroupConcat {
                match rest.split_first() {
                    Some((Sx::Str(sep, _), rest)) => (AggregationParams::group_concat(sep.clone()), rest),
                    _ => return Err(err(*pos, "group_concat needs a separator string")),
                }
            } else {
                (AggregationParams::new(function), rest)
            };
            let [exprs, group] = rest else {
                return Err(err(*pos, "aggregate expects (args) and a group"));
            };
            Ok(Aggregation {
                exprs: list_of(exprs, "expressions")?
                    .iter()
                    .map(to_expression)
                    .collect::<Result<_, _>>()?,
                params,
                group: Box::new(to_algebra(group)?),
                target: to_var(target)?,
            })
        }
        _ => Err(err(*pos, "expected (aggregate ...)")),
    }
}

fn to_algebra(sx: &Sx) -> Result<Algebra, AlgebraError> {
    let Sx::List(items, pos) = sx else {
        return Err(err(sx.pos(), "expected an operator"));
    };
    let pos = *pos;
    let (head, args) = match items.split_first() {
        Some((Sx::Atom(h, _), args)) => (h.as_str(), args),
        _ => return Err(err(pos, "expected an operator name")),
    };
    let arity = |n: usize| -> Result<(), AlgebraError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(pos, format!("{head} expects {n} arguments, found {}", args.len())))
        }
    };
    let exprs = |sx: &Sx| -> Result<Vec<Expression>, AlgebraError> {
        list_of(sx, "expressions")?.iter().map(to_expression).collect()
    };
    Ok(match head {
        "quad" => {
            arity(4)?;
            Algebra::quad(
                to_pattern(&args[0])?,
                to_pattern(&args[1])?,
                to_pattern(&args[2])?,
                to_pattern(&args[3])?,
            )
        }
        "join" | "union" => {
            arity(2)?;
            let (l, r) = (to_algebra(&args[0])?, to_algebra(&args[1])?);
            if head == "join" {
                Algebra::join(l, r)
            } else {
                Algebra::union(l, r)
            }
        }
        "filter" => {
            arity(2)?;
            Algebra::filter(exprs(&args[0])?, to_algebra(&args[1])?)
        }
        "diff" | "left-join" => {
            arity(3)?;
            let (l, r, c) = (
                to_algebra(&args[0])?,
                to_algebra(&args[1])?,
                to_expression(&args[2])?,
            );
            if head == "diff" {
                Algebra::diff(l, r, c)
            } else {
                Algebra::left_join(l, r, c)
            }
        }
        "project" => {
            arity(2)?;
            let vars = list_of(&args[0], "variables")?
                .iter()
                .map(to_var)
                .collect::<Result<_, _>>()?;
            Algebra::project(to_algebra(&args[1])?, vars)
        }
        "group" => {
            arity(2)?;
            Algebra::group(exprs(&args[0])?, to_algebra(&args[1])?)
        }
        "aggregate" => Algebra::Aggregation(to_aggregation(sx)?),
        "aggregate-join" => Algebra::AggregateJoin(
            args.iter().map(to_aggregation).collect::<Result<_, _>>()?,
        ),
        "vi-restrict" | "graph-restrict" | "version-restrict" => {
            arity(2)?;
            let (term, var) = (to_term(&args[0])?, to_var(&args[1])?);
            match head {
                "vi-restrict" => Algebra::ViRestrict { vi: term, var },
                "graph-restrict" => Algebra::GraphRestrict { graph: term, var },
                _ => Algebra::VersionRestrict { version: term, var },
            }
        }
        "transform" => {
            arity(4)?;
            Algebra::transform(
                to_var(&args[0])?,
                to_repr(&args[1])?,
                to_repr(&args[2])?,
                to_algebra(&args[3])?,
            )
        }
        other => return Err(err(pos, format!("unknown operator {other:?}"))),
    })
}
