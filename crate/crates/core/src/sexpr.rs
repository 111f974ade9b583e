//! Minimal s-expression reader shared by the lexicon and grammar loaders.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    /// Double-quoted string; used for phrase keys containing spaces.
    Str(String),
    List(Vec<Sexpr>),
}

/// Line/column (1-based) of the first character of a top-level form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct SexprError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl Sexpr {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items) => Some(items),
            _ => None,
        }
    }

    /// Atom or string contents.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) | Sexpr::Str(a) => Some(a),
            Sexpr::List(_) => None,
        }
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    if c == '"' || c == '\\' {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("\"")
            }
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> SexprError {
        SexprError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
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

    fn read(&mut self) -> Result<Sexpr, SexprError> {
        self.skip_trivia();
        match self.chars.peek().copied() {
            None => Err(self.err("unexpected end of input")),
            Some(')') => Err(self.err("unbalanced ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(self.err("unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexpr::List(items));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err("unterminated string")),
                        Some('"') => return Ok(Sexpr::Str(s)),
                        Some('\\') => match self.bump() {
                            Some(c) => s.push(c),
                            None => return Err(self.err("unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexpr::Atom(s))
            }
        }
    }
}

/// Reads every top-level form in `text`, with its starting position.
pub fn parse_all(text: &str) -> Result<Vec<(Sexpr, Pos)>, SexprError> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        let pos = Pos {
            line: r.line,
            col: r.col,
        };
        out.push((r.read()?, pos));
    }
}

/// Reads exactly one form.
pub fn parse_one(text: &str) -> Result<Sexpr, SexprError> {
    let mut forms = parse_all(text)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap().0),
        0 => Err(SexprError {
            line: 1,
            col: 1,
            msg: "empty input".into(),
        }),
        _ => {
            let pos = forms[1].1;
            Err(SexprError {
                line: pos.line,
                col: pos.col,
                msg: "trailing input after first form".into(),
            })
        }
    }
}
