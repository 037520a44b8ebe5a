use std::fmt;
use std::sync::Arc;

use crate::model::Term;

/// A query variable, stored without the leading `?`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        let name = name.as_ref();
        Var(name.strip_prefix('?').unwrap_or(name).into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Variables introduced by the compiler rather than written by the user.
    pub fn is_hidden(&self) -> bool {
        self.0.starts_with("__")
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Function {
    Eq,
    Neq,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
    Not,
    Concat,
    Add,
    Sub,
    Mul,
    Div,
}

impl Function {
    pub const ALL: [Function; 14] = [
        Function::Eq,
        Function::Neq,
        Function::Lt,
        Function::Gt,
        Function::Le,
        Function::Ge,
        Function::And,
        Function::Or,
        Function::Not,
        Function::Concat,
        Function::Add,
        Function::Sub,
        Function::Mul,
        Function::Div,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Function::Eq => "=",
            Function::Neq => "!=",
            Function::Lt => "<",
            Function::Gt => ">",
            Function::Le => "<=",
            Function::Ge => ">=",
            Function::And => "&&",
            Function::Or => "||",
            Function::Not => "!",
            Function::Concat => "concat",
            Function::Add => "+",
            Function::Sub => "-",
            Function::Mul => "*",
            Function::Div => "/",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.symbol() == symbol)
    }

    /// Whether `n` arguments is a legal call.
    pub fn accepts_arity(self, n: usize) -> bool {
        match self {
            Function::Not => n == 1,
            Function::Concat => n >= 1,
            _ => n == 2,
        }
    }

    pub fn is_equality(self) -> bool {
        matches!(self, Function::Eq | Function::Neq)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expression {
    Term(Term),
    Var(Var),
    Call(Function, Vec<Expression>),
    /// Number of flat mappings a condensed mapping stands for.
    Card,
}

impl Expression {
    pub fn var(name: &str) -> Self {
        Expression::Var(Var::new(name))
    }

    pub fn call(function: Function, args: Vec<Expression>) -> Self {
        Expression::Call(function, args)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Expression::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expression::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expression::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Expression::Term(_) | Expression::Card => {}
        }
    }

    pub fn contains_card(&self) -> bool {
        match self {
            Expression::Card => true,
            Expression::Call(_, args) => args.iter().any(Expression::contains_card),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum AggregateFunction {
    Count,
    Sum,
    Avg,
    Min,
    Max,
    GroupConcat,
}

impl AggregateFunction {
    pub const ALL: [AggregateFunction; 6] = [
        AggregateFunction::Count,
        AggregateFunction::Sum,
        AggregateFunction::Avg,
        AggregateFunction::Min,
        AggregateFunction::Max,
        AggregateFunction::GroupConcat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AggregateFunction::Count => "count",
            AggregateFunction::Sum => "sum",
            AggregateFunction::Avg => "avg",
            AggregateFunction::Min => "min",
            AggregateFunction::Max => "max",
            AggregateFunction::GroupConcat => "group_concat",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

/// Aggregate function together with its scalar parameters; a separator is present exactly
/// for `GROUP_CONCAT`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AggregationParams {
    function: AggregateFunction,
    separator: Option<String>,
}

impl AggregationParams {
    pub fn new(function: AggregateFunction) -> Self {
        let separator = (function == AggregateFunction::GroupConcat).then(|| " ".to_owned());
        AggregationParams {
            function,
            separator,
        }
    }

    pub fn group_concat(separator: impl Into<String>) -> Self {
        AggregationParams {
            function: AggregateFunction::GroupConcat,
            separator: Some(separator.into()),
        }
    }

    pub fn function(&self) -> AggregateFunction {
        self.function
    }

    pub fn separator(&self) -> Option<&str> {
        self.separator.as_deref()
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Term(t) => write!(f, "{}", super::sexpr::render_term(t)),
            Expression::Var(v) => write!(f, "{v}"),
            Expression::Card => write!(f, "card"),
            Expression::Call(func, args) => {
                write!(f, "({}", func.symbol())?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
