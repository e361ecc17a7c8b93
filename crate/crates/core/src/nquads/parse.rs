use super::term::{Annotation, Literal, Quad, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed statement at byte {offset}: {kind}")]
pub struct ParseError {
    /// Byte offset of the first token that could not be parsed.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unterminated {0}")]
    Unterminated(&'static str),
    #[error("invalid escape sequence")]
    BadEscape,
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("unexpected content after statement terminator")]
    TrailingContent,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn err(&self, at: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset: at, kind }
    }

    fn iri(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        debug_assert_eq!(self.peek(), Some('<'));
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(start, ParseErrorKind::Unterminated("IRI"))),
                Some('>') => break,
                Some('\\') => {
                    let at = self.pos - 1;
                    match self.bump() {
                        Some('u') => out.push(self.hex_escape(4, at)?),
                        Some('U') => out.push(self.hex_escape(8, at)?),
                        _ => return Err(self.err(at, ParseErrorKind::BadEscape)),
                    }
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return Err(self.err(start, ParseErrorKind::Empty("IRI")));
        }
        Ok(out)
    }

    fn hex_escape(&mut self, digits: usize, at: usize) -> Result<char, ParseError> {
        let rest = self.rest();
        let hex = rest
            .get(..digits)
            .filter(|h| h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| self.err(at, ParseErrorKind::BadEscape))?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.err(at, ParseErrorKind::BadEscape))?;
        let c = char::from_u32(code).ok_or_else(|| self.err(at, ParseErrorKind::BadEscape))?;
        self.pos += digits;
        Ok(c)
    }

    fn blank(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        self.pos += 2;
        let label_start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
        // `_:b0.` at end of line: the dot terminates the statement.
        let mut label = &self.src[label_start..self.pos];
        if label.ends_with('.') && self.rest().trim().is_empty() {
            label = &label[..label.len() - 1];
            self.pos -= 1;
        }
        if label.is_empty() {
            return Err(self.err(start, ParseErrorKind::Empty("blank node label")));
        }
        Ok(label.to_string())
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(start, ParseErrorKind::Unterminated("literal"))),
                Some('"') => break,
                Some('\\') => {
                    let at = self.pos - 1;
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4, at)?,
                        Some('U') => self.hex_escape(8, at)?,
                        _ => return Err(self.err(at, ParseErrorKind::BadEscape)),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        let annotation = match self.peek() {
            Some('@') => {
                let at = self.pos;
                self.pos += 1;
                let tag_start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_whitespace() {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                let tag = &self.src[tag_start..self.pos];
                if tag.is_empty() {
                    return Err(self.err(at, ParseErrorKind::Empty("language tag")));
                }
                Annotation::Language(tag.to_string())
            }
            Some('^') => {
                let at = self.pos;
                if !self.rest().starts_with("^^<") {
                    return Err(self.err(at, ParseErrorKind::Expected("datatype IRI after ^^")));
                }
                self.pos += 2;
                Annotation::Datatype(self.iri()?)
            }
            _ => Annotation::Plain,
        };
        Ok(Literal { lexical, annotation })
    }

    fn resource(&mut self, what: &'static str) -> Result<Term, ParseError> {
        match self.peek() {
            Some('<') => Ok(Term::iri(self.iri()?)),
            Some('_') if self.rest().starts_with("_:") => Ok(Term::blank(self.blank()?)),
            _ => Err(self.err(self.pos, ParseErrorKind::Expected(what))),
        }
    }
}

/// Parses one physical N-Quads line (without its newline).
///
/// Bare triples are accepted; their graph is `None`. The returned quad has
/// ordinal 0.
pub fn parse_quad(line: &str) -> Result<Quad, ParseError> {
    let mut cur = Cursor { src: line, pos: 0 };
    cur.skip_ws();
    let subject = cur.resource("subject IRI or blank node")?;
    cur.skip_ws();
    let predicate = match cur.peek() {
        Some('<') => cur.iri()?,
        _ => return Err(cur.err(cur.pos, ParseErrorKind::Expected("predicate IRI"))),
    };
    cur.skip_ws();
    let object = match cur.peek() {
        Some('"') => Term::Literal(cur.literal()?),
        Some('<') | Some('_') => cur.resource("object")?,
        _ => return Err(cur.err(cur.pos, ParseErrorKind::Expected("object"))),
    };
    cur.skip_ws();
    let graph = match cur.peek() {
        Some('.') => None,
        Some(_) => Some(cur.resource("graph label or '.'")?),
        None => return Err(cur.err(cur.pos, ParseErrorKind::Expected("'.'"))),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(cur.err(cur.pos, ParseErrorKind::Expected("'.'")));
    }
    cur.pos += 1;
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') | Some('\r') => {}
        Some(_) => return Err(cur.err(cur.pos, ParseErrorKind::TrailingContent)),
    }
    Ok(Quad {
        subject,
        predicate,
        object,
        graph,
        ordinal: 0,
    })
}
