//! Tokenizer for the supported query subset.

use super::QueryError;

#[derive(Clone, PartialEq, Debug)]
pub enum Token {
    /// Bare word: keyword, `a`, `true`/`false` or a function name.
    Word(String),
    Var(String),
    /// `<...>` with the brackets removed.
    IriRef(String),
    /// `prefix:local`, unresolved.
    PrefixedName(String, String),
    /// String literal with an optional datatype (`^^<iri>` or `^^prefix:local`).
    Literal {
        lexical: String,
        datatype: Option<Box<Token>>,
    },
    Number(String),
    Punct(&'static str),
}

#[derive(Clone, PartialEq, Debug)]
pub struct Spanned {
    pub token: Token,
    pub offset: usize,
}

const PUNCTS: [&str; 19] = [
    "&&", "||", "!=", "<=", ">=", "^^", "{", "}", "(", ")", ".", ";", ",", "*", "=", "<", ">", "!",
    "+",
];

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, QueryError> {
    let mut lexer = Lexer { text, pos: 0 };
    let mut out = Vec::new();
    while let Some(t) = lexer.next_token()? {
        out.push(t);
    }
    Ok(out)
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '#' | '%' | ':' | '/')
}

impl Lexer<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> QueryError {
        QueryError::syntax(self.text, offset, message)
    }

    fn skip_space(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            let skipped = rest.len() - trimmed.len();
            let comment = trimmed
                .starts_with('#')
                .then(|| trimmed.find('\n').unwrap_or(trimmed.len()));
            self.pos += skipped;
            if let Some(len) = comment {
                self.pos += len;
            } else {
                return;
            }
        }
    }

    /// Consumes a run of name characters, leaving a trailing `.` for the triple terminator.
    fn take_name(&mut self) -> &str {
        let rest = self.rest();
        let mut end = rest.find(|c: char| !is_name_char(c)).unwrap_or(rest.len());
        while end > 0 && rest[..end].ends_with('.') {
            end -= 1;
        }
        let start = self.pos;
        self.pos += end;
        &self.text[start..self.pos]
    }

    fn next_token(&mut self) -> Result<Option<Spanned>, QueryError> {
        self.skip_space();
        let offset = self.pos;
        let Some(c) = self.rest().chars().next() else {
            return Ok(None);
        };
        let token = match c {
            '?' | '$' => {
                self.pos += 1;
                let name_len = self
                    .rest()
                    .find(|c: char| !(c.is_alphanumeric() || c == '_'))
                    .unwrap_or(self.rest().len());
                if name_len == 0 {
                    return Err(self.error(offset, "empty variable name"));
                }
                let name = self.rest()[..name_len].to_owned();
                self.pos += name_len;
                Token::Var(name)
            }
            '<' if self.iri_ahead() => {
                let end = self.rest().find('>').expect("checked by iri_ahead");
                let iri = self.rest()[1..end].to_owned();
                self.pos += end + 1;
                Token::IriRef(iri)
            }
            '"' | '\'' => self.literal(c)?,
            c if c.is_ascii_digit() => Token::Number(self.number()),
            '.' if self.rest()[1..].starts_with(|c: char| c.is_ascii_digit()) => {
                Token::Number(self.number())
            }
            c if c.is_alphabetic() || c == '_' => {
                let name = self.take_name().to_owned();
                match name.split_once(':') {
                    Some((prefix, local)) => Token::PrefixedName(prefix.to_owned(), local.to_owned()),
                    None => {
                        // A bare word cannot contain name punctuation; re-scan as identifier.
                        let word_len = name
                            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
                            .unwrap_or(name.len());
                        self.pos = offset + word_len;
                        Token::Word(name[..word_len].to_owned())
                    }
                }
            }
            ':' => {
                self.pos += 1;
                let local = self.take_name().to_owned();
                Token::PrefixedName(String::new(), local)
            }
            '-' => {
                self.pos += 1;
                Token::Punct("-")
            }
            '/' => {
                self.pos += 1;
                Token::Punct("/")
            }
            _ => match PUNCTS.iter().find(|p| self.rest().starts_with(**p)) {
                Some(p) => {
                    self.pos += p.len();
                    Token::Punct(p)
                }
                None => return Err(self.error(offset, format!("unexpected character {c:?}"))),
            },
        };
        Ok(Some(Spanned { token, offset }))
    }

    /// `<` opens an IRI when a `>` follows before any whitespace.
    fn iri_ahead(&self) -> bool {
        let rest = &self.rest()[1..];
        match rest.find(|c: char| c == '>' || c.is_whitespace() || c == '<') {
            Some(i) => rest[i..].starts_with('>') && i > 0,
            None => false,
        }
    }

    fn number(&mut self) -> String {
        let rest = self.rest();
        let mut end = rest.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(rest.len());
        while end > 0 && rest[..end].ends_with('.') {
            end -= 1;
        }
        let out = rest[..end].to_owned();
        self.pos += end;
        out
    }

    fn literal(&mut self, quote: char) -> Result<Token, QueryError> {
        let start = self.pos;
        self.pos += 1;
        let mut lexical = String::new();
        loop {
            let Some(c) = self.rest().chars().next() else {
                return Err(self.error(start, "unterminated string literal"));
            };
            self.pos += c.len_utf8();
            match c {
                c if c == quote => break,
                '\\' => {
                    let Some(e) = self.rest().chars().next() else {
                        return Err(self.error(start, "unterminated string literal"));
                    };
                    self.pos += e.len_utf8();
                    lexical.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        'r' => '\r',
                        '"' => '"',
                        '\'' => '\'',
                        '\\' => '\\',
                        other => {
                            return Err(self.error(self.pos - 2, format!("unknown escape \\{other}")))
                        }
                    });
                }
                '\n' => return Err(self.error(start, "newline in string literal")),
                c => lexical.push(c),
            }
        }
        let mut datatype = None;
        if self.rest().starts_with("^^") {
            self.pos += 2;
            match self.next_token()? {
                Some(Spanned {
                    token: t @ (Token::IriRef(_) | Token::PrefixedName(..)),
                    ..
                }) => datatype = Some(Box::new(t)),
                _ => return Err(self.error(self.pos, "expected a datatype IRI after ^^")),
            }
        } else if self.rest().starts_with('@') {
            self.pos += 1;
            let len = self
                .rest()
                .find(|c: char| !(c.is_alphanumeric() || c == '-'))
                .unwrap_or(self.rest().len());
            self.pos += len;
        }
        Ok(Token::Literal { lexical, datatype })
    }
}
