//! Recursive-descent parser for the concrete grammar.
//!
//! Precedence from tightest: unary operators and binders, `&`, `|`, `->`
//! (right associative), `<->`. `&`, `|` and `<->` associate to the left. A
//! binder body extends as far right as possible.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::surface::SurfaceFormula as S;
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    /// Byte offset into the input.
    pub offset: usize,
    pub expected: BTreeSet<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expected: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        write!(
            f,
            "syntax error at byte {}: found {}, expected one of: {}",
            self.offset,
            self.found,
            expected.join(" ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Tilde,
    Dia,
    Box,
    StarDia,
    StarBox,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Top,
    Bot,
    Nu,
    Mu,
    TangleD,
    TangleC,
    Atom(String),
    Var(String),
    Invalid(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(s) | Tok::Var(s) => format!("'{s}'"),
            Tok::Invalid(c) => format!("invalid character {c:?}"),
            Tok::Eof => "end of input".to_owned(),
            other => format!("'{}'", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::Tilde => "~",
            Tok::Dia => "<>",
            Tok::Box => "[]",
            Tok::StarDia => "<*>",
            Tok::StarBox => "[*]",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::DoubleArrow => "<->",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Top => "T",
            Tok::Bot => "F",
            Tok::Nu => "nu",
            Tok::Mu => "mu",
            Tok::TangleD => "tangle_d",
            Tok::TangleC => "tangle_c",
            Tok::Atom(_) => "atom",
            Tok::Var(_) => "variable",
            Tok::Invalid(_) => "invalid",
            Tok::Eof => "end of input",
        }
    }
}

fn lex(input: &str) -> Vec<(usize, Tok)> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let rest = |i: usize, s: &str| input[i..].starts_with(s);
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let symbols: [(&str, Tok); 15] = [
            ("<->", Tok::DoubleArrow),
            ("<*>", Tok::StarDia),
            ("[*]", Tok::StarBox),
            ("<>", Tok::Dia),
            ("[]", Tok::Box),
            ("->", Tok::Arrow),
            ("~", Tok::Tilde),
            ("&", Tok::Amp),
            ("|", Tok::Bar),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("{", Tok::LBrace),
            ("}", Tok::RBrace),
            (",", Tok::Comma),
            (".", Tok::Dot),
        ];
        if let Some((s, tok)) = symbols.iter().find(|(s, _)| rest(i, s)) {
            out.push((start, tok.clone()));
            i += s.len();
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            let word = &input[i..j];
            let tok = match word {
                "T" => Tok::Top,
                "F" => Tok::Bot,
                "nu" => Tok::Nu,
                "mu" => Tok::Mu,
                "tangle_d" => Tok::TangleD,
                "tangle_c" => Tok::TangleC,
                _ if c.is_ascii_lowercase() => Tok::Atom(word.to_owned()),
                _ => Tok::Var(word.to_owned()),
            };
            out.push((start, tok));
            i = j;
            continue;
        }
        let ch = input[i..].chars().next().unwrap();
        out.push((start, Tok::Invalid(ch)));
        i += ch.len_utf8();
    }
    out.push((input.len(), Tok::Eof));
    out
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const BINARY: [&str; 4] = ["&", "|", "->", "<->"];
const PRIMARY: [&str; 14] = [
    "~", "<>", "[]", "<*>", "[*]", "nu", "mu", "tangle_d", "tangle_c", "(", "T", "F", "atom", "variable",
];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let (offset, tok) = &self.toks[self.pos];
        SyntaxError {
            offset: *offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &[&str]) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn iff(&mut self) -> Result<S, SyntaxError> {
        let mut left = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let right = self.implication()?;
            left = S::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<S, SyntaxError> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.implication()?;
            return Ok(S::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<S, SyntaxError> {
        let mut left = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.conjunction()?;
            left = S::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<S, SyntaxError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = S::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<S, SyntaxError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(S::neg(self.unary()?))
            }
            Tok::Dia => {
                self.bump();
                Ok(S::dia(self.unary()?))
            }
            Tok::Box => {
                self.bump();
                Ok(S::boxed(self.unary()?))
            }
            Tok::StarDia => {
                self.bump();
                Ok(S::star_dia(self.unary()?))
            }
            Tok::StarBox => {
                self.bump();
                Ok(S::star_box(self.unary()?))
            }
            Tok::Nu | Tok::Mu => {
                let least = self.bump() == Tok::Mu;
                let Tok::Var(name) = self.peek().clone() else {
                    return Err(self.error(&["variable"]));
                };
                self.bump();
                self.expect(Tok::Dot, &["."])?;
                let body = Box::new(self.iff()?);
                let x = Symbol::new(&name);
                Ok(if least { S::Mu(x, body) } else { S::Nu(x, body) })
            }
            Tok::TangleD | Tok::TangleC => {
                let closure = self.bump() == Tok::TangleC;
                self.expect(Tok::LBrace, &["{"])?;
                let mut items = Vec::new();
                if *self.peek() == Tok::RBrace {
                    self.bump();
                } else {
                    loop {
                        items.push(self.iff()?);
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                            }
                            Tok::RBrace => {
                                self.bump();
                                break;
                            }
                            _ => return Err(self.error(&[",", "}", "&", "|", "->", "<->"])),
                        }
                    }
                }
                Ok(if closure {
                    S::TangleC(items)
                } else {
                    S::TangleD(items)
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                self.expect(Tok::RParen, &[")", "&", "|", "->", "<->"])?;
                Ok(inner)
            }
            Tok::Top => {
                self.bump();
                Ok(S::Top)
            }
            Tok::Bot => {
                self.bump();
                Ok(S::Bot)
            }
            Tok::Atom(name) | Tok::Var(name) => {
                self.bump();
                Ok(S::Var(Symbol::new(&name)))
            }
            _ => Err(self.error(&PRIMARY)),
        }
    }
}

/// Parses UTF-8 text into a surface formula.
pub fn parse(input: &str) -> Result<S, SyntaxError> {
    let mut p = Parser {
        toks: lex(input),
        pos: 0,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        let mut expected: Vec<&str> = BINARY.to_vec();
        expected.push("end of input");
        return Err(p.error(&expected));
    }
    Ok(f)
}
