//! S-expression reader with source spans.

use super::{ErrorKind, ParseError, SourceSpan};

/// Nesting beyond this is rejected rather than risking deep recursion later.
pub const MAX_DEPTH: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExprKind {
    /// A symbol, numeral, keyword or string; `quoted` is set for `|...|` and `"..."`.
    Atom { text: String, quoted: bool },
    List(Vec<SExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SExpr {
    pub kind: SExprKind,
    pub span: SourceSpan,
}

impl SExpr {
    /// The text of an unquoted atom.
    pub fn keyword(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Atom { text, quoted: false } => Some(text),
            _ => None,
        }
    }

    /// The text of any symbol-like atom.
    pub fn symbol(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Atom { text, .. } => Some(text),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match &self.kind {
            SExprKind::List(items) => Some(items),
            _ => None,
        }
    }

    /// The head keyword of a list, e.g. `assert` in `(assert ...)`.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.keyword()
    }
}

/// Reads top-level expressions one at a time, so that trailing text after a
/// terminating command is never looked at.
pub struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

#[derive(Debug, Clone, Copy)]
struct Mark {
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Reader<'a> {
    pub fn new(src: &'a str) -> Self {
        Reader {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn mark(&self) -> Mark {
        Mark {
            pos: self.pos,
            line: self.line,
            col: self.col,
        }
    }

    fn span_from(&self, m: Mark) -> SourceSpan {
        SourceSpan {
            start: m.pos,
            end: self.pos,
            line: m.line,
            column: m.col,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn error(&self, m: Mark, message: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            kind: ErrorKind::Syntax,
            message: message.into(),
            span: self.span_from(m),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// The next top-level expression, or `None` at end of input.
    pub fn next_expr(&mut self) -> Result<Option<SExpr>, ParseError> {
        self.skip_trivia();
        if self.peek().is_none() {
            return Ok(None);
        }
        // explicit stack: (start mark, items so far)
        let mut stack: Vec<(Mark, Vec<SExpr>)> = Vec::new();
        loop {
            self.skip_trivia();
            let m = self.mark();
            let expr = match self.peek() {
                None => {
                    let open = stack.last().map(|(m, _)| *m).unwrap_or(m);
                    return Err(self.error(open, "unclosed `(`", &[")"]));
                }
                Some('(') => {
                    self.bump();
                    if stack.len() >= MAX_DEPTH {
                        return Err(self.error(m, "expression nested too deeply", &[]));
                    }
                    stack.push((m, Vec::new()));
                    continue;
                }
                Some(')') => {
                    self.bump();
                    match stack.pop() {
                        None => return Err(self.error(m, "unexpected `)`", &["(", "symbol"])),
                        Some((start, items)) => SExpr {
                            kind: SExprKind::List(items),
                            span: self.span_from(start),
                        },
                    }
                }
                Some('|') => self.quoted_symbol(m)?,
                Some('"') => self.string(m)?,
                Some(_) => self.simple_atom(m)?,
            };
            match stack.last_mut() {
                Some((_, items)) => items.push(expr),
                None => return Ok(Some(expr)),
            }
        }
    }

    fn quoted_symbol(&mut self, m: Mark) -> Result<SExpr, ParseError> {
        self.bump();
        let start = self.pos;
        loop {
            match self.bump() {
                None => return Err(self.error(m, "unterminated quoted symbol", &["|"])),
                Some('|') => break,
                Some('\\') => return Err(self.error(m, "`\\` is not allowed in a quoted symbol", &[])),
                Some(_) => {}
            }
        }
        let text = self.src[start..self.pos - 1].to_string();
        Ok(SExpr {
            kind: SExprKind::Atom { text, quoted: true },
            span: self.span_from(m),
        })
    }

    fn string(&mut self, m: Mark) -> Result<SExpr, ParseError> {
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(m, "unterminated string literal", &["\""])),
                Some('"') => {
                    if self.peek() == Some('"') {
                        self.bump();
                        text.push('"');
                    } else {
                        break;
                    }
                }
                Some(c) => text.push(c),
            }
        }
        Ok(SExpr {
            kind: SExprKind::Atom { text, quoted: true },
            span: self.span_from(m),
        })
    }

    fn simple_atom(&mut self, m: Mark) -> Result<SExpr, ParseError> {
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | '|' | '"' | ';') {
                break;
            }
            if !is_symbol_char(c) && c != ':' {
                let bad = self.mark();
                self.bump();
                return Err(self.error(bad, format!("unexpected character `{c}`"), &["symbol"]));
            }
            self.bump();
        }
        let text = self.src[m.pos..self.pos].to_string();
        Ok(SExpr {
            kind: SExprKind::Atom {
                text,
                quoted: false,
            },
            span: self.span_from(m),
        })
    }
}

pub fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/'".contains(c)
}

/// Whether `name` can be written without `|...|` quoting.
pub fn is_simple_symbol(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        None => false,
        Some(c) if c.is_ascii_digit() || !is_symbol_char(c) => false,
        Some(_) => chars.all(is_symbol_char),
    }
}
