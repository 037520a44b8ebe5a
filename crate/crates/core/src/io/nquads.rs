//! Line-oriented N-Quads reader.
//!
//! Blank nodes are Skolemized to `skolem:<file-id>/<label>`; statements without a graph
//! label go to the reserved `default` graph.

use crate::model::{vocab, Term};

use super::IngestError;

/// A parsed statement, before dictionary encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermQuad {
    pub s: Term,
    pub p: Term,
    pub o: Term,
    pub g: Term,
}

pub fn parse_nquads(input: &[u8], file_id: &str) -> Result<Vec<TermQuad>, IngestError> {
    let text = std::str::from_utf8(input).map_err(|e| IngestError::Parse {
        file: file_id.to_owned(),
        line: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut quads = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let mut cursor = Cursor {
            rest: line.trim(),
            file_id,
            last_was_blank: false,
        };
        if cursor.rest.is_empty() || cursor.rest.starts_with('#') {
            continue;
        }
        let quad = cursor.statement().map_err(|message| IngestError::Parse {
            file: file_id.to_owned(),
            line: index + 1,
            message,
        })?;
        quads.push(quad);
    }
    Ok(quads)
}

struct Cursor<'a> {
    rest: &'a str,
    file_id: &'a str,
    last_was_blank: bool,
}

impl Cursor<'_> {
    fn statement(&mut self) -> Result<TermQuad, String> {
        let s = match self.term()? {
            t @ Term::Iri(_) => t,
            t => return Err(format!("subject must be an IRI or blank node, found {t}")),
        };
        let p = match self.term()? {
            t @ Term::Iri(_) if !self.last_was_blank => t,
            t => return Err(format!("predicate must be an IRI, found {t}")),
        };
        let o = self.term()?;
        self.skip_ws();
        let g = if self.rest.starts_with('.') {
            Term::iri(vocab::DEFAULT_GRAPH)
        } else {
            match self.term()? {
                t @ Term::Iri(_) => t,
                t => return Err(format!("graph label must be an IRI, found {t}")),
            }
        };
        self.skip_ws();
        self.rest = self
            .rest
            .strip_prefix('.')
            .ok_or_else(|| "expected '.' at end of statement".to_owned())?;
        self.skip_ws();
        if !(self.rest.is_empty() || self.rest.starts_with('#')) {
            return Err(format!("unexpected trailing input {:?}", self.rest));
        }
        Ok(TermQuad { s, p, o, g })
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn term(&mut self) -> Result<Term, String> {
        self.skip_ws();
        self.last_was_blank = false;
        match self.rest.chars().next() {
            Some('<') => self.iri().map(Term::iri),
            Some('_') => {
                let label = self.blank_label()?;
                self.last_was_blank = true;
                Ok(Term::iri(format!("skolem:{}/{label}", self.file_id)))
            }
            Some('"') => self.literal(),
            Some(c) => Err(format!("unexpected character {c:?}")),
            None => Err("unexpected end of line".to_owned()),
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        let body = &self.rest[1..];
        let end = body.find('>').ok_or("unterminated IRI")?;
        let iri = &body[..end];
        if iri.chars().any(|c| c.is_whitespace() || c == '<' || c == '"') {
            return Err(format!("invalid character in IRI <{iri}>"));
        }
        self.rest = &body[end + 1..];
        Ok(iri.to_owned())
    }

    fn blank_label(&mut self) -> Result<String, String> {
        let body = self.rest.strip_prefix("_:").ok_or("malformed blank node")?;
        let end = body.find(char::is_whitespace).unwrap_or(body.len());
        let mut label = &body[..end];
        // A label may not end with '.', which belongs to the statement terminator.
        while let Some(stripped) = label.strip_suffix('.') {
            label = stripped;
        }
        if label.is_empty()
            || !label
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(format!("malformed blank node label {label:?}"));
        }
        self.rest = &body[label.len()..];
        Ok(label.to_owned())
    }

    fn literal(&mut self) -> Result<Term, String> {
        let mut lexical = String::new();
        let mut chars = self.rest[1..].char_indices();
        let end = loop {
            match chars.next() {
                None => return Err("unterminated literal".to_owned()),
                Some((i, '"')) => break i + 2,
                Some((_, '\\')) => match chars.next() {
                    Some((_, '"')) => lexical.push('"'),
                    Some((_, '\\')) => lexical.push('\\'),
                    Some((_, 'n')) => lexical.push('\n'),
                    Some((_, 't')) => lexical.push('\t'),
                    Some((_, c)) => return Err(format!("unsupported escape \\{c}")),
                    None => return Err("unterminated literal".to_owned()),
                },
                Some((_, c)) => lexical.push(c),
            }
        };
        self.rest = &self.rest[end..];
        if let Some(rest) = self.rest.strip_prefix("^^") {
            self.rest = rest;
            if !self.rest.starts_with('<') {
                return Err("datatype must be an IRI".to_owned());
            }
            let datatype = self.iri()?;
            return Ok(Term::typed_literal(lexical, &datatype));
        }
        if let Some(rest) = self.rest.strip_prefix('@') {
            let end = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(rest.len());
            if end == 0 {
                return Err("empty language tag".to_owned());
            }
            self.rest = &rest[end..];
            return Ok(Term::Literal {
                lexical: lexical.into(),
                kind: crate::model::LiteralKind::Plain,
            });
        }
        Ok(Term::literal(lexical))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_quad_with_numeric_literal() {
        let quads = parse_nquads(
            br#"<ex:bldg#1> <ex:height> "10.5" <ng:Gr-Lyon> ."#,
            "f",
        )
        .unwrap();
        assert_eq!(
            quads,
            vec![TermQuad {
                s: Term::iri("ex:bldg#1"),
                p: Term::iri("ex:height"),
                o: Term::literal("10.5"),
                g: Term::iri("ng:Gr-Lyon"),
            }]
        );
        assert!(quads[0].o.numeric_value().is_some());
    }

    #[test]
    fn empty_input_and_comments() {
        assert!(parse_nquads(b"", "f").unwrap().is_empty());
        assert!(parse_nquads(b"# nothing\n\n   \n", "f").unwrap().is_empty());
    }

    #[test]
    fn triples_land_in_default_graph() {
        let quads = parse_nquads(b"<a> <b> <c> .", "f").unwrap();
        assert_eq!(quads[0].g, Term::iri("default"));
    }

    #[test]
    fn blank_nodes_are_skolemized_consistently() {
        let quads = parse_nquads(b"_:b1 <p> _:b1 .\n_:b1 <p> _:b2.", "file-7").unwrap();
        assert_eq!(quads[0].s, Term::iri("skolem:file-7/b1"));
        assert_eq!(quads[0].s, quads[0].o);
        assert_eq!(quads[1].o, Term::iri("skolem:file-7/b2"));
        let again = parse_nquads(b"_:b1 <p> _:b1 .\n_:b1 <p> _:b2.", "file-7").unwrap();
        assert_eq!(quads, again);
    }

    #[test]
    fn escapes_and_tags() {
        let quads = parse_nquads(
            br#"<s> <p> "a\"b\\c\nd\te" <g> .
<s> <p> "chat"@fr .
<s> <p> "10"^^<http://www.w3.org/2001/XMLSchema#string> .
<s> <p> "7"^^<http://www.w3.org/2001/XMLSchema#integer> ."#,
            "f",
        )
        .unwrap();
        assert_eq!(quads[0].o.lexical(), "a\"b\\c\nd\te");
        assert_eq!(quads[1].o, Term::literal("chat"));
        assert_eq!(quads[2].o, Term::string("10"));
        assert!(quads[3].o.numeric_value().is_some());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_nquads(b"<a> <b> <c> .\n<a> \"p\" <c> .", "f").unwrap_err();
        match err {
            IngestError::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("predicate"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_nquads(b"<a> _:p <c> .", "f").is_err());
        assert!(parse_nquads(br#"<a> <b> "x\u0041" ."#, "f").is_err());
        assert!(parse_nquads(b"<a> <b> <c>", "f").is_err());
        assert!(parse_nquads(b"<a> <b> <c> <d> <e> .", "f").is_err());
    }
}
