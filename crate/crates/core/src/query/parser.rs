//! Recursive-descent parser producing a query tree with prefixes resolved.

use std::collections::HashMap;

use crate::algebra::{AggregateFunction, Expression, Function, PatternTerm, Var};
use crate::model::Term;

use super::lexer::{tokenize, Spanned, Token};
use super::QueryError;

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Clone, PartialEq, Debug)]
pub struct Query {
    pub selection: Selection,
    pub pattern: GroupPattern,
    pub group_by: Vec<Expression>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Selection {
    All,
    Items(Vec<SelectItem>),
}

#[derive(Clone, PartialEq, Debug)]
pub enum SelectItem {
    Var(Var),
    Aggregate {
        call: AggregateCall,
        alias: Option<Var>,
    },
}

#[derive(Clone, PartialEq, Debug)]
pub struct AggregateCall {
    pub function: AggregateFunction,
    /// `None` for `COUNT(*)`.
    pub argument: Option<Expression>,
    pub separator: Option<String>,
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct GroupPattern {
    pub elements: Vec<PatternElement>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum PatternElement {
    Triple(TriplePattern),
    Graph(PatternTerm, GroupPattern),
    Optional(GroupPattern),
    Minus(GroupPattern),
    Union(Vec<GroupPattern>),
    Group(GroupPattern),
    Filter(Expression),
}

#[derive(Clone, PartialEq, Debug)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
    pub offset: usize,
}

pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        text,
        tokens,
        pos: 0,
        prefixes: HashMap::new(),
    };
    parser.query()
}

const UNSUPPORTED: [&str; 16] = [
    "LIMIT", "OFFSET", "ORDER", "DISTINCT", "REDUCED", "HAVING", "BIND", "VALUES", "SERVICE",
    "EXISTS", "CONSTRUCT", "ASK", "DESCRIBE", "FROM", "BASE", "SAMPLE",
];

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Spanned>,
    pos: usize,
    prefixes: HashMap<String, String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.text.len(), |s| s.offset)
    }

    fn error(&self, message: impl Into<String>) -> QueryError {
        QueryError::syntax(self.text, self.offset(), message)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.token.clone());
        self.pos += 1;
        t
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Token::Punct(q)) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), QueryError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{p}'")))
        }
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token::Word(w)) if w.eq_ignore_ascii_case(word))
    }

    fn eat_word(&mut self, word: &str) -> bool {
        let hit = self.at_word(word);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_word(&mut self, word: &str) -> Result<(), QueryError> {
        if self.eat_word(word) {
            Ok(())
        } else {
            Err(self.error(format!("expected {word}")))
        }
    }

    fn reject_unsupported(&self) -> Result<(), QueryError> {
        if let Some(Token::Word(w)) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED.contains(&upper.as_str()) {
                return Err(QueryError::UnsupportedFeature(upper));
            }
        }
        Ok(())
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        while self.eat_word("PREFIX") {
            let Some(Token::PrefixedName(prefix, local)) = self.advance() else {
                self.pos -= 1;
                return Err(self.error("expected a prefix name"));
            };
            if !local.is_empty() {
                return Err(self.error("expected a prefix name ending with ':'"));
            }
            let Some(Token::IriRef(iri)) = self.advance() else {
                self.pos -= 1;
                return Err(self.error("expected an IRI"));
            };
            self.prefixes.insert(prefix, iri);
        }
        self.reject_unsupported()?;
        self.expect_word("SELECT")?;
        self.reject_unsupported()?;
        let selection = if self.eat_punct("*") {
            Selection::All
        } else {
            let mut items = Vec::new();
            while !self.at_word("WHERE") && !self.at_punct("{") {
                items.push(self.select_item()?);
            }
            if items.is_empty() {
                return Err(self.error("empty SELECT clause"));
            }
            Selection::Items(items)
        };
        self.reject_unsupported()?;
        self.eat_word("WHERE");
        let pattern = self.group()?;
        let mut group_by = Vec::new();
        if self.eat_word("GROUP") {
            self.expect_word("BY")?;
            loop {
                match self.peek() {
                    Some(Token::Var(_)) => group_by.push(self.primary()?),
                    Some(Token::Punct("(")) => {
                        self.pos += 1;
                        group_by.push(self.expression()?);
                        if self.at_word("AS") {
                            return Err(QueryError::UnsupportedFeature("GROUP BY alias".into()));
                        }
                        self.expect_punct(")")?;
                    }
                    _ => break,
                }
            }
            if group_by.is_empty() {
                return Err(self.error("expected a grouping variable"));
            }
        }
        self.reject_unsupported()?;
        if self.pos < self.tokens.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(Query {
            selection,
            pattern,
            group_by,
        })
    }

    fn select_item(&mut self) -> Result<SelectItem, QueryError> {
        match self.peek() {
            Some(Token::Var(name)) => {
                let v = Var::new(name);
                self.pos += 1;
                Ok(SelectItem::Var(v))
            }
            Some(Token::Punct("(")) => {
                self.pos += 1;
                let Some(call) = self.aggregate_call()? else {
                    return Err(QueryError::UnsupportedFeature(
                        "non-aggregate SELECT expressions".into(),
                    ));
                };
                self.expect_word("AS")?;
                let Some(Token::Var(name)) = self.advance() else {
                    self.pos -= 1;
                    return Err(self.error("expected an alias variable"));
                };
                self.expect_punct(")")?;
                Ok(SelectItem::Aggregate {
                    call,
                    alias: Some(Var::new(name)),
                })
            }
            Some(Token::Word(_)) => match self.aggregate_call()? {
                Some(call) => Ok(SelectItem::Aggregate { call, alias: None }),
                None => {
                    self.reject_unsupported()?;
                    Err(self.error("expected a variable or an aggregate"))
                }
            },
            _ => Err(self.error("expected a variable or an aggregate")),
        }
    }

    fn aggregate_call(&mut self) -> Result<Option<AggregateCall>, QueryError> {
        let Some(Token::Word(name)) = self.peek() else {
            return Ok(None);
        };
        let Some(function) = AggregateFunction::from_name(&name.to_ascii_lowercase()) else {
            return Ok(None);
        };
        self.pos += 1;
        self.expect_punct("(")?;
        if self.at_word("DISTINCT") {
            return Err(QueryError::UnsupportedFeature("DISTINCT aggregates".into()));
        }
        let argument = if function == AggregateFunction::Count && self.eat_punct("*") {
            None
        } else {
            Some(self.expression()?)
        };
        let mut separator = None;
        if self.eat_punct(";") {
            if function != AggregateFunction::GroupConcat {
                return Err(self.error("only GROUP_CONCAT takes a separator"));
            }
            self.expect_word("separator")?;
            self.expect_punct("=")?;
            let Some(Token::Literal { lexical, .. }) = self.advance() else {
                self.pos -= 1;
                return Err(self.error("expected a separator string"));
            };
            separator = Some(lexical);
        }
        if function == AggregateFunction::GroupConcat && separator.is_none() {
            separator = Some(" ".to_owned());
        }
        self.expect_punct(")")?;
        Ok(Some(AggregateCall {
            function,
            argument,
            separator,
        }))
    }

    fn group(&mut self) -> Result<GroupPattern, QueryError> {
        self.expect_punct("{")?;
        let mut elements = Vec::new();
        loop {
            self.reject_unsupported()?;
            if self.eat_punct("}") {
                break;
            }
            if self.eat_punct(".") {
                continue;
            }
            if self.at_punct("{") {
                let first = self.group()?;
                let mut alternatives = vec![first];
                while self.eat_word("UNION") {
                    alternatives.push(self.group()?);
                }
                elements.push(if alternatives.len() == 1 {
                    PatternElement::Group(alternatives.pop().expect("one alternative"))
                } else {
                    PatternElement::Union(alternatives)
                });
            } else if self.eat_word("GRAPH") {
                let name = self.pattern_term(false)?;
                elements.push(PatternElement::Graph(name, self.group()?));
            } else if self.eat_word("OPTIONAL") {
                elements.push(PatternElement::Optional(self.group()?));
            } else if self.eat_word("MINUS") {
                elements.push(PatternElement::Minus(self.group()?));
            } else if self.eat_word("FILTER") {
                if !self.at_punct("(") {
                    self.reject_unsupported()?;
                    return Err(self.error("expected '(' after FILTER"));
                }
                elements.push(PatternElement::Filter(self.primary()?));
            } else if self.peek().is_none() {
                return Err(self.error("unterminated group pattern"));
            } else {
                self.triples(&mut elements)?;
            }
        }
        Ok(GroupPattern { elements })
    }

    /// Subject followed by a property list with `;` and `,` abbreviations.
    fn triples(&mut self, out: &mut Vec<PatternElement>) -> Result<(), QueryError> {
        let offset = self.offset();
        let s = self.pattern_term(false)?;
        loop {
            let p = if self.eat_word("a") {
                PatternTerm::Const(Term::iri(RDF_TYPE))
            } else {
                self.pattern_term(false)?
            };
            loop {
                let o = self.pattern_term(true)?;
                out.push(PatternElement::Triple(TriplePattern {
                    s: s.clone(),
                    p: p.clone(),
                    o,
                    offset,
                }));
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") || self.at_punct(".") || self.at_punct("}") {
                break;
            }
        }
        let block_follows = self.at_punct("{")
            || ["OPTIONAL", "FILTER", "GRAPH", "MINUS"].iter().any(|w| self.at_word(w));
        if !self.eat_punct(".") && !self.at_punct("}") && !block_follows {
            return Err(self.error("expected '.' or '}' after a triple pattern"));
        }
        Ok(())
    }

    fn resolve(&self, prefix: &str, local: &str) -> Term {
        match self.prefixes.get(prefix) {
            Some(base) => Term::iri(format!("{base}{local}")),
            None => Term::iri(format!("{prefix}:{local}")),
        }
    }

    fn iri_token(&self, t: &Token) -> Option<String> {
        match t {
            Token::IriRef(iri) => Some(iri.clone()),
            Token::PrefixedName(p, l) => Some(self.resolve(p, l).lexical().to_owned()),
            _ => None,
        }
    }

    fn literal_term(&self, lexical: String, datatype: Option<Box<Token>>) -> Term {
        match datatype.and_then(|d| self.iri_token(&d)) {
            Some(dt) => Term::typed_literal(lexical, &dt),
            None => Term::literal(lexical),
        }
    }

    fn pattern_term(&mut self, literals: bool) -> Result<PatternTerm, QueryError> {
        let offset_error = self.error("expected a variable or an IRI");
        let t = match self.advance() {
            Some(Token::Var(name)) => PatternTerm::Var(Var::new(name)),
            Some(Token::IriRef(iri)) => PatternTerm::Const(Term::iri(iri)),
            Some(Token::PrefixedName(p, l)) => PatternTerm::Const(self.resolve(&p, &l)),
            Some(Token::Literal { lexical, datatype }) if literals => {
                PatternTerm::Const(self.literal_term(lexical, datatype))
            }
            Some(Token::Number(n)) if literals => PatternTerm::Const(Term::literal(n)),
            Some(Token::Punct("-")) if literals => match self.advance() {
                Some(Token::Number(n)) => PatternTerm::Const(Term::literal(format!("-{n}"))),
                _ => return Err(offset_error),
            },
            Some(Token::Word(w)) if literals && (w == "true" || w == "false") => {
                PatternTerm::Const(Term::boolean(w == "true"))
            }
            _ => {
                self.pos -= 1;
                return Err(offset_error);
            }
        };
        Ok(t)
    }

    fn expression(&mut self) -> Result<Expression, QueryError> {
        let mut left = self.and_expression()?;
        while self.eat_punct("||") {
            let right = self.and_expression()?;
            left = Expression::call(Function::Or, vec![left, right]);
        }
        Ok(left)
    }

    fn and_expression(&mut self) -> Result<Expression, QueryError> {
        let mut left = self.relational()?;
        while self.eat_punct("&&") {
            let right = self.relational()?;
            left = Expression::call(Function::And, vec![left, right]);
        }
        Ok(left)
    }

    fn relational(&mut self) -> Result<Expression, QueryError> {
        let left = self.additive()?;
        for f in [
            Function::Eq,
            Function::Neq,
            Function::Le,
            Function::Ge,
            Function::Lt,
            Function::Gt,
        ] {
            if self.eat_punct(f.symbol()) {
                let right = self.additive()?;
                return Ok(Expression::call(f, vec![left, right]));
            }
        }
        Ok(left)
    }

    fn additive(&mut self) -> Result<Expression, QueryError> {
        let mut left = self.multiplicative()?;
        loop {
            let f = if self.eat_punct("+") {
                Function::Add
            } else if self.eat_punct("-") {
                Function::Sub
            } else {
                return Ok(left);
            };
            let right = self.multiplicative()?;
            left = Expression::call(f, vec![left, right]);
        }
    }

    fn multiplicative(&mut self) -> Result<Expression, QueryError> {
        let mut left = self.unary()?;
        loop {
            let f = if self.eat_punct("*") {
                Function::Mul
            } else if self.eat_punct("/") {
                Function::Div
            } else {
                return Ok(left);
            };
            let right = self.unary()?;
            left = Expression::call(f, vec![left, right]);
        }
    }

    fn unary(&mut self) -> Result<Expression, QueryError> {
        if self.eat_punct("!") {
            return Ok(Expression::call(Function::Not, vec![self.unary()?]));
        }
        if self.eat_punct("-") {
            if let Some(Token::Number(n)) = self.peek() {
                let n = n.clone();
                self.pos += 1;
                return Ok(Expression::Term(Term::literal(format!("-{n}"))));
            }
            let zero = Expression::Term(Term::literal("0"));
            return Ok(Expression::call(Function::Sub, vec![zero, self.unary()?]));
        }
        self.eat_punct("+");
        self.primary()
    }

    fn primary(&mut self) -> Result<Expression, QueryError> {
        let error = self.error("expected an expression");
        match self.advance() {
            Some(Token::Punct("(")) => {
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Some(Token::Var(name)) => Ok(Expression::Var(Var::new(name))),
            Some(Token::Number(n)) => Ok(Expression::Term(Term::literal(n))),
            Some(Token::Literal { lexical, datatype }) => {
                Ok(Expression::Term(self.literal_term(lexical, datatype)))
            }
            Some(Token::IriRef(iri)) => Ok(Expression::Term(Term::iri(iri))),
            Some(Token::PrefixedName(p, l)) => Ok(Expression::Term(self.resolve(&p, &l))),
            Some(Token::Word(w)) if w == "true" || w == "false" => {
                Ok(Expression::Term(Term::boolean(w == "true")))
            }
            Some(Token::Word(w)) if w.eq_ignore_ascii_case("CONCAT") => {
                self.expect_punct("(")?;
                let mut args = vec![self.expression()?];
                while self.eat_punct(",") {
                    args.push(self.expression()?);
                }
                self.expect_punct(")")?;
                Ok(Expression::call(Function::Concat, args))
            }
            Some(Token::Word(w)) => {
                let upper = w.to_ascii_uppercase();
                if AggregateFunction::from_name(&w.to_ascii_lowercase()).is_some() {
                    Err(QueryError::UnsupportedFeature(format!("{upper} outside SELECT")))
                } else {
                    Err(QueryError::UnsupportedFeature(format!("function {upper}")))
                }
            }
            _ => {
                self.pos -= 1;
                Err(error)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specific_version_query_parses() {
        let q = parse_query(
            "SELECT ?height WHERE {
                GRAPH ?vng { ?s <ex:height> ?height }
                ?vng v:in-version v:1 .
            }",
        )
        .unwrap();
        assert_eq!(q.selection, Selection::Items(vec![SelectItem::Var(Var::new("height"))]));
        assert_eq!(q.pattern.elements.len(), 2);
        let PatternElement::Triple(t) = &q.pattern.elements[1] else {
            panic!("expected the metadata triple");
        };
        assert_eq!(t.p, PatternTerm::iri("v:in-version"));
        assert_eq!(t.o, PatternTerm::iri("v:1"));
    }

    #[test]
    fn group_concat_separator() {
        let q = parse_query(
            r#"SELECT ?height (GROUP_CONCAT(CONCAT("B.", ?b); separator=",") AS ?c) WHERE {
                GRAPH ?vng { ?b <ex:height> ?height . }
                FILTER(?height > 10)
            } GROUP BY ?height"#,
        )
        .unwrap();
        let Selection::Items(items) = &q.selection else {
            panic!()
        };
        let SelectItem::Aggregate { call, alias } = &items[1] else {
            panic!()
        };
        assert_eq!(call.function, AggregateFunction::GroupConcat);
        assert_eq!(call.separator.as_deref(), Some(","));
        assert_eq!(alias, &Some(Var::new("c")));
        assert_eq!(q.group_by, vec![Expression::var("height")]);
    }

    #[test]
    fn prefixes_resolve() {
        let q = parse_query("PREFIX ex: <http://e/> SELECT * { ?s ex:p ?o ; a ex:C , ex:D }").unwrap();
        assert_eq!(q.pattern.elements.len(), 3);
        let PatternElement::Triple(t) = &q.pattern.elements[2] else {
            panic!()
        };
        assert_eq!(t.p, PatternTerm::iri(RDF_TYPE));
        assert_eq!(t.o, PatternTerm::iri("http://e/D"));
    }

    #[test]
    fn modifiers_are_unsupported() {
        for q in [
            "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1",
            "SELECT DISTINCT ?s WHERE { ?s ?p ?o }",
            "SELECT ?s WHERE { ?s ?p ?o } ORDER BY ?s",
            "SELECT ?s WHERE { ?s ?p ?o } OFFSET 2",
        ] {
            assert!(matches!(parse_query(q), Err(QueryError::UnsupportedFeature(_))), "{q}");
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_query("SELECT ?s WHERE {\n  ?s ?p }").unwrap_err();
        assert!(matches!(err, QueryError::Syntax { line: 2, column: 9, .. }), "{err:?}");
    }
}
