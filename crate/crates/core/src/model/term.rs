use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Zero};

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
const XSD_NUMERIC: [&str; 4] = [
    "http://www.w3.org/2001/XMLSchema#integer",
    "http://www.w3.org/2001/XMLSchema#decimal",
    "http://www.w3.org/2001/XMLSchema#double",
    "http://www.w3.org/2001/XMLSchema#float",
];

/// How a literal is compared and printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiteralKind {
    /// Untyped literal that does not look like a number.
    Plain,
    /// Literal whose lexical form is a finite decimal.
    Numeric,
    /// Explicit string, never compared numerically.
    String,
    /// `xsd:boolean` with lexical form `true`, `false`, `1` or `0`.
    Boolean,
}

/// An RDF term. Blank nodes never reach this type: they are Skolemized into IRIs at parse time.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Arc<str>),
    Literal { lexical: Arc<str>, kind: LiteralKind },
}

impl Term {
    pub fn iri(value: impl AsRef<str>) -> Self {
        Term::Iri(Arc::from(value.as_ref()))
    }

    /// Untyped literal; numeric if the lexical form is a decimal number.
    pub fn literal(lexical: impl AsRef<str>) -> Self {
        let lexical = lexical.as_ref();
        let kind = if is_numeric_lexical(lexical) {
            LiteralKind::Numeric
        } else {
            LiteralKind::Plain
        };
        Term::Literal {
            lexical: Arc::from(lexical),
            kind,
        }
    }

    pub fn string(lexical: impl AsRef<str>) -> Self {
        Term::Literal {
            lexical: Arc::from(lexical.as_ref()),
            kind: LiteralKind::String,
        }
    }

    /// Literal with an explicit datatype IRI. Numeric XSD types keep numeric comparison when
    /// the lexical form allows it; `xsd:string` pins string semantics; anything else is plain.
    pub fn typed_literal(lexical: impl AsRef<str>, datatype: &str) -> Self {
        let lexical = lexical.as_ref();
        if datatype == XSD_STRING {
            Term::string(lexical)
        } else if datatype == XSD_BOOLEAN && matches!(lexical, "true" | "false" | "1" | "0") {
            Term::Literal {
                lexical: Arc::from(lexical),
                kind: LiteralKind::Boolean,
            }
        } else if XSD_NUMERIC.contains(&datatype) && is_numeric_lexical(lexical) {
            Term::Literal {
                lexical: Arc::from(lexical),
                kind: LiteralKind::Numeric,
            }
        } else {
            Term::Literal {
                lexical: Arc::from(lexical),
                kind: LiteralKind::Plain,
            }
        }
    }

    pub fn boolean(value: bool) -> Self {
        Term::Literal {
            lexical: Arc::from(if value { "true" } else { "false" }),
            kind: LiteralKind::Boolean,
        }
    }

    /// Truth value of a boolean literal.
    pub fn boolean_value(&self) -> Option<bool> {
        match self {
            Term::Literal {
                lexical,
                kind: LiteralKind::Boolean,
            } => Some(matches!(lexical.as_ref(), "true" | "1")),
            _ => None,
        }
    }

    /// Canonical numeric literal for a computed value.
    pub fn number(value: &BigRational) -> Self {
        Term::Literal {
            lexical: Arc::from(format_rational(value).as_str()),
            kind: LiteralKind::Numeric,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(iri) => iri,
            Term::Literal { lexical, .. } => lexical,
        }
    }

    pub fn literal_kind(&self) -> Option<LiteralKind> {
        match self {
            Term::Iri(_) => None,
            Term::Literal { kind, .. } => Some(*kind),
        }
    }

    /// Exact numeric value of a numeric literal.
    pub fn numeric_value(&self) -> Option<BigRational> {
        match self {
            Term::Literal {
                lexical,
                kind: LiteralKind::Numeric,
            } => parse_decimal(lexical),
            _ => None,
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// N-Quads-style rendering; numeric literals keep their quotes so the output re-parses.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal { lexical, kind } => {
                write!(f, "\"{}\"", escape_literal(lexical))?;
                match kind {
                    LiteralKind::String => write!(f, "^^<{XSD_STRING}>")?,
                    LiteralKind::Boolean => write!(f, "^^<{XSD_BOOLEAN}>")?,
                    _ => {}
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn escape_literal(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Optional sign, digits, optional fractional part (`10`, `-3`, `10.5`, `.5`).
pub fn is_numeric_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !int.is_empty() && all_digits(int),
        Some(f) => !f.is_empty() && all_digits(int) && all_digits(f),
    }
}

pub fn parse_decimal(s: &str) -> Option<BigRational> {
    if !is_numeric_lexical(s) {
        return None;
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    let digits = if digits.is_empty() { "0" } else { &digits };
    let numer: BigInt = digits.parse().ok()?;
    let denom = num::pow(BigInt::from(10u32), frac.len());
    let value = BigRational::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Renders an exact rational. Terminating decimals print exactly; others print with 18
/// fractional digits, truncated toward zero.
pub fn format_rational(value: &BigRational) -> String {
    let value = value.reduced();
    if value.is_integer() {
        return value.to_integer().to_string();
    }
    let negative = value < BigRational::zero();
    let abs = if negative { -value.clone() } else { value.clone() };
    let mut denom = abs.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut terminating_digits = 0usize;
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    let terminates = denom == BigInt::from(1u32);
    if terminates {
        terminating_digits = twos.max(fives);
    }
    let digits = if terminates { terminating_digits } else { 18 };
    let scaled = (abs.numer() * num::pow(BigInt::from(10u32), digits)) / abs.denom();
    let mut text = scaled.to_string();
    if text.len() <= digits {
        text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
    }
    let (int, frac) = text.split_at(text.len() - digits);
    let frac = frac.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_detection() {
        for ok in ["10", "10.5", "-3", "+4.25", ".5", "0"] {
            assert!(is_numeric_lexical(ok), "{ok}");
        }
        for bad in ["", "-", "1.", "1e3", "abc", "1.2.3", "ex:bldg#1"] {
            assert!(!is_numeric_lexical(bad), "{bad}");
        }
    }

    #[test]
    fn iri_and_literal_are_disjoint() {
        assert_ne!(Term::iri("10.5"), Term::literal("10.5"));
        assert_eq!(Term::literal("10.5").literal_kind(), Some(LiteralKind::Numeric));
        assert_eq!(Term::literal("abc").literal_kind(), Some(LiteralKind::Plain));
    }

    #[test]
    fn decimal_round_trip() {
        for s in ["10.5", "9.1", "15", "-0.25", "0.125"] {
            assert_eq!(format_rational(&parse_decimal(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_decimal("10.50").unwrap()), "10.5");
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(format_rational(&third), "0.333333333333333333");
        let neg = BigRational::new(BigInt::from(-7), BigInt::from(2));
        assert_eq!(format_rational(&neg), "-3.5");
    }
}
