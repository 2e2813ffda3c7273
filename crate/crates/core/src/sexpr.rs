//! A small s-expression reader with source positions, shared by every text format.
//!
//! Atoms are maximal runs of characters other than whitespace, parentheses and
//! `;`, which starts a comment running to the end of the line.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a, _) => Some(a),
            Sexpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Atom(..) => None,
        }
    }

    /// The head atom of a list, e.g. `seq` in `(seq ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

/// Builds a parse error located at `pos`.
pub fn error_at(pos: Pos, msg: impl Into<String>, expected: &[&str]) -> Error {
    Error::Parse {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
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

    fn read(&mut self) -> Result<Option<Sexpr>> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Ok(None),
            Some(')') => Err(error_at(start, "unexpected ')'", &["(", "atom"])),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(error_at(self.pos, "unbalanced parenthesis", &[")"]));
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexpr::List(items, start)));
                        }
                        Some(_) => items.push(self.read()?.expect("input is not exhausted")),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Some(Sexpr::Atom(s, start)))
            }
        }
    }
}

/// Reads every top-level expression in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexpr>> {
    let mut r = Reader {
        chars: src.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    while let Some(e) = r.read()? {
        out.push(e);
    }
    Ok(out)
}

/// Reads exactly one top-level expression.
pub fn parse_one(src: &str) -> Result<Sexpr> {
    let mut all = parse_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(error_at(Pos { line: 1, col: 1 }, "empty input", &["("])),
        _ => Err(error_at(all[1].pos(), "trailing input", &["end of input"])),
    }
}

/// Parses an integer atom.
pub fn int_atom(e: &Sexpr) -> Result<i64> {
    e.as_atom()
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| error_at(e.pos(), "expected an integer", &["INT"]))
}

/// Parses a name atom.
pub fn name_atom(e: &Sexpr) -> Result<String> {
    e.as_atom()
        .map(str::to_string)
        .ok_or_else(|| error_at(e.pos(), "expected a name", &["NAME"]))
}

/// Requires `e` to be a list whose head is `head`, returning the remaining items.
pub fn expect_form<'a>(e: &'a Sexpr, head: &str) -> Result<&'a [Sexpr]> {
    match e.as_list() {
        Some(items) if items.first().and_then(Sexpr::as_atom) == Some(head) => Ok(&items[1..]),
        _ => Err(error_at(e.pos(), format!("expected ({head} ...)"), &[head])),
    }
}
