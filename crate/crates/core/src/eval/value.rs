//! Expression values, expression evaluation and the effective boolean value.

use std::cmp::Ordering;

use num::{BigRational, Zero};

use crate::algebra::{Expression, Function};
use crate::model::{Catalog, LiteralKind, Term, TermId, VersionSet};

use super::{Binding, SolutionMapping};

/// Result of evaluating an expression. Function results are always terms; ids and graph
/// values only come from variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Value {
    Term(Term),
    Id(TermId),
    Graph(TermId, VersionSet),
    AnyGraph,
    Null,
    Error,
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Value::Error)
    }

    /// The term behind a value, resolving ids.
    pub fn term(&self, catalog: &Catalog) -> Option<Term> {
        match self {
            Value::Term(t) => Some(t.clone()),
            Value::Id(id) => catalog.dictionary.resolve(*id).ok().cloned(),
            _ => None,
        }
    }

    /// The binding a value becomes when assigned to a variable, if any.
    pub fn into_binding(self) -> Option<Binding> {
        match self {
            Value::Term(t) => Some(Binding::Value(t)),
            Value::Id(id) => Some(Binding::Id(id)),
            Value::Graph(g, v) => Some(Binding::Graph(g, v)),
            Value::AnyGraph => Some(Binding::AnyGraph),
            Value::Null | Value::Error => None,
        }
    }
}

impl From<&Binding> for Value {
    fn from(b: &Binding) -> Self {
        match b {
            Binding::Value(t) => Value::Term(t.clone()),
            Binding::Id(id) => Value::Id(*id),
            Binding::Graph(g, v) => Value::Graph(*g, v.clone()),
            Binding::AnyGraph => Value::AnyGraph,
        }
    }
}

/// Effective boolean value: booleans pass through, numbers are true unless zero, plain and
/// string literals are true unless empty; everything else is false.
pub fn ebv(value: &Value, catalog: &Catalog) -> bool {
    match value.term(catalog) {
        Some(t) => ebv_term(&t).unwrap_or(false),
        None => false,
    }
}

/// `None` for terms without a boolean value (IRIs).
fn ebv_term(t: &Term) -> Option<bool> {
    match t.literal_kind()? {
        LiteralKind::Boolean => t.boolean_value(),
        LiteralKind::Numeric => Some(!t.numeric_value()?.is_zero()),
        LiteralKind::Plain | LiteralKind::String => Some(!t.lexical().is_empty()),
    }
}

/// Total order used by `MIN`/`MAX`: numbers by value (ties broken lexically), then other
/// literals lexically, then IRIs lexically.
pub fn compare_terms(a: &Term, b: &Term) -> Ordering {
    fn rank(t: &Term) -> u8 {
        match t.literal_kind() {
            Some(LiteralKind::Numeric) => 0,
            Some(_) => 1,
            None => 2,
        }
    }
    rank(a).cmp(&rank(b)).then_with(|| {
        match (a.numeric_value(), b.numeric_value()) {
            (Some(x), Some(y)) => x.cmp(&y),
            _ => Ordering::Equal,
        }
        .then_with(|| a.lexical().cmp(b.lexical()))
        .then_with(|| a.cmp(b))
    })
}

/// Equality used by `=`: numbers numerically, booleans by truth value, other terms by
/// identity.
fn terms_equal(a: &Term, b: &Term) -> bool {
    if let (Some(x), Some(y)) = (a.numeric_value(), b.numeric_value()) {
        return x == y;
    }
    if let (Some(x), Some(y)) = (a.boolean_value(), b.boolean_value()) {
        return x == y;
    }
    a == b
}

fn boolean(b: bool) -> Value {
    Value::Term(Term::boolean(b))
}

pub fn eval_expression(expr: &Expression, m: &SolutionMapping, catalog: &Catalog) -> Value {
    match expr {
        Expression::Term(t) => Value::Term(t.clone()),
        Expression::Var(v) => m.get(v).map(Value::from).unwrap_or(Value::Null),
        Expression::Card => Value::Term(Term::number(&BigRational::from_integer(
            m.card(catalog).into(),
        ))),
        Expression::Call(f, args) => {
            let values: Vec<Value> = args.iter().map(|a| eval_expression(a, m, catalog)).collect();
            apply(*f, &values, catalog)
        }
    }
}

fn apply(f: Function, args: &[Value], catalog: &Catalog) -> Value {
    if !f.accepts_arity(args.len()) {
        return Value::Error;
    }
    if args.iter().any(Value::is_null) {
        return Value::Null;
    }
    match f {
        Function::And | Function::Or => {
            let a = truth(&args[0], catalog);
            let b = truth(&args[1], catalog);
            let (short, full) = if f == Function::And { (false, true) } else { (true, false) };
            if a == Some(short) || b == Some(short) {
                boolean(short)
            } else if a == Some(full) && b == Some(full) {
                boolean(full)
            } else {
                Value::Error
            }
        }
        Function::Not => match truth(&args[0], catalog) {
            Some(b) => boolean(!b),
            None => Value::Error,
        },
        _ if args.iter().any(Value::is_error) => Value::Error,
        Function::Eq | Function::Neq => {
            let equal = match (&args[0], &args[1]) {
                (Value::Id(a), Value::Id(b)) => Some(a == b),
                (a, b) => match (a.term(catalog), b.term(catalog)) {
                    (Some(x), Some(y)) => Some(terms_equal(&x, &y)),
                    _ => None,
                },
            };
            match equal {
                Some(e) => boolean(e == (f == Function::Eq)),
                None => Value::Error,
            }
        }
        Function::Lt | Function::Gt | Function::Le | Function::Ge => {
            match (numeric(&args[0], catalog), numeric(&args[1], catalog)) {
                (Some(a), Some(b)) => {
                    let ord = a.cmp(&b);
                    boolean(match f {
                        Function::Lt => ord == Ordering::Less,
                        Function::Gt => ord == Ordering::Greater,
                        Function::Le => ord != Ordering::Greater,
                        _ => ord != Ordering::Less,
                    })
                }
                _ => Value::Error,
            }
        }
        Function::Concat => {
            let mut out = String::new();
            for a in args {
                match a.term(catalog) {
                    Some(t) => out.push_str(t.lexical()),
                    None => return Value::Error,
                }
            }
            Value::Term(Term::string(out))
        }
        Function::Add | Function::Sub | Function::Mul | Function::Div => {
            let (Some(a), Some(b)) = (numeric(&args[0], catalog), numeric(&args[1], catalog)) else {
                return Value::Error;
            };
            let result = match f {
                Function::Add => a + b,
                Function::Sub => a - b,
                Function::Mul => a * b,
                _ if b.is_zero() => return Value::Error,
                _ => a / b,
            };
            Value::Term(Term::number(&result))
        }
    }
}

fn truth(v: &Value, catalog: &Catalog) -> Option<bool> {
    ebv_term(&v.term(catalog)?)
}

fn numeric(v: &Value, catalog: &Catalog) -> Option<BigRational> {
    v.term(catalog)?.numeric_value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_expression, Var};
    use crate::model::DatasetBuilder;

    fn catalog() -> Catalog {
        DatasetBuilder::new().build_flat().catalog().as_ref().clone()
    }

    fn eval(text: &str, m: &SolutionMapping) -> Value {
        eval_expression(&parse_expression(text).unwrap(), m, &catalog())
    }

    fn height(lex: &str) -> SolutionMapping {
        SolutionMapping::from_bindings([(Var::new("height"), Binding::Value(Term::literal(lex)))])
    }

    #[test]
    fn comparison_against_a_constant() {
        assert_eq!(eval("(> ?height 10)", &height("10.5")), boolean(true));
        assert_eq!(eval("(> ?height 10)", &height("9.1")), boolean(false));
        assert_eq!(eval("(> ?height 10)", &SolutionMapping::new()), Value::Null);
        assert_eq!(eval("(> ?height 10)", &height("tall")), Value::Error);
        assert!(ebv(&eval("(> ?height 10)", &height("10.5")), &catalog()));
    }

    #[test]
    fn unbound_variable_is_null() {
        assert_eq!(eval("?x", &SolutionMapping::new()), Value::Null);
    }

    #[test]
    fn ebv_table() {
        let c = catalog();
        assert!(ebv(&boolean(true), &c));
        assert!(!ebv(&boolean(false), &c));
        assert!(!ebv(&Value::Null, &c));
        assert!(!ebv(&Value::Error, &c));
        assert!(!ebv(&Value::Term(Term::literal("0")), &c));
        assert!(!ebv(&Value::Term(Term::literal("0.0")), &c));
        assert!(ebv(&Value::Term(Term::literal("2")), &c));
        assert!(!ebv(&Value::Term(Term::literal("")), &c));
        assert!(ebv(&Value::Term(Term::string("x")), &c));
        assert!(!ebv(&Value::Term(Term::iri("ex:a")), &c));
    }

    #[test]
    fn numeric_equality_and_arithmetic() {
        let m = SolutionMapping::new();
        assert_eq!(eval("(= 10.5 10.50)", &m), boolean(true));
        assert_eq!(eval(r#"(= "a" "a")"#, &m), boolean(true));
        assert_eq!(eval(r#"(!= <ex:a> <ex:b>)"#, &m), boolean(true));
        assert_eq!(eval("(+ 10.5 0.5)", &m), Value::Term(Term::literal("11")));
        assert_eq!(eval("(/ 1 3)", &m), Value::Term(Term::literal("0.333333333333333333")));
        assert_eq!(eval("(/ 1 0)", &m), Value::Error);
        assert_eq!(eval(r#"(concat "B." <ex:bldg#1>)"#, &m), Value::Term(Term::string("B.ex:bldg#1")));
    }

    #[test]
    fn three_valued_logic() {
        let m = SolutionMapping::new();
        assert_eq!(eval(r#"(&& (< "a" 1) (= 1 2))"#, &m), boolean(false));
        assert_eq!(eval(r#"(|| (< "a" 1) (= 1 1))"#, &m), boolean(true));
        assert_eq!(eval(r#"(&& (< "a" 1) (= 1 1))"#, &m), Value::Error);
        assert_eq!(eval("(! (= 1 1))", &m), boolean(false));
    }

    #[test]
    fn term_order_for_min_and_max() {
        let mut terms = vec![
            Term::iri("ex:a"),
            Term::literal("b"),
            Term::literal("10"),
            Term::literal("9.5"),
        ];
        terms.sort_by(compare_terms);
        assert_eq!(
            terms,
            vec![Term::literal("9.5"), Term::literal("10"), Term::literal("b"), Term::iri("ex:a")]
        );
    }
}
