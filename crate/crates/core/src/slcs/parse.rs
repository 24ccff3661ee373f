//! Text syntax for formulas.
//!
//! ```text
//! formula  := or ( 'S' formula | 'T' formula | 'R' '(' formula ')' formula )?
//! or       := and ( '|' and )*
//! and      := unary ( '&' unary )*
//! unary    := '!' unary | 'C' unary | 'N'<digits> unary | atom
//! atom     := 'true' | ident | '(' formula ')'
//! ```
//!
//! `!`, `C` and `N` bind tightest, then `&`, then `|`; the spatial operators
//! `S`, `T` and `R(...)` bind loosest and associate to the right. `N` without
//! digits means `N1`. Identifiers are `[A-Za-z_][A-Za-z0-9_]*`; the words
//! `true`, `C`, `S`, `T`, `R` and `N<digits>` are reserved and cannot name
//! propositions.

use std::fmt;

use super::ast::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input where the offending token starts.
    pub position: usize,
    pub found: String,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at offset {}: expected {}, found {}",
            self.position, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    Near(u32),
    OpC,
    OpS,
    OpT,
    OpR,
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::True => "`true`".into(),
            Tok::Near(n) => format!("`N{n}`"),
            Tok::OpC => "`C`".into(),
            Tok::OpS => "`S`".into(),
            Tok::OpT => "`T`".into(),
            Tok::OpR => "`R`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '!' => {
                toks.push((i, Tok::Bang));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::Amp));
                i += 1;
            }
            '|' => {
                toks.push((i, Tok::Pipe));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "C" => Tok::OpC,
                    "S" => Tok::OpS,
                    "T" => Tok::OpT,
                    "R" => Tok::OpR,
                    "N" => Tok::Near(1),
                    w if w.starts_with('N') && w[1..].chars().all(|c| c.is_ascii_digit()) => {
                        let n: u32 = w[1..].parse().map_err(|_| ParseError {
                            position: start,
                            found: format!("`{w}`"),
                            expected: "a nearness level that fits in 32 bits".into(),
                        })?;
                        if n == 0 {
                            return Err(ParseError {
                                position: start,
                                found: "`N0`".into(),
                                expected: "a nearness level of at least 1".into(),
                            });
                        }
                        Tok::Near(n)
                    }
                    w => Tok::Ident(w.to_string()),
                };
                toks.push((start, tok));
            }
            other => {
                return Err(ParseError {
                    position: i,
                    found: format!("`{other}`"),
                    expected: "an operator, identifier or parenthesis".into(),
                })
            }
        }
    }
    toks.push((text.len(), Tok::Eof));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> ParseError {
        let (position, tok) = &self.toks[self.pos];
        ParseError {
            position: *position,
            found: tok.describe(),
            expected: expected.into(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        match self.peek() {
            Tok::OpS => {
                self.bump();
                Ok(Formula::surround(lhs, self.formula()?))
            }
            Tok::OpT => {
                self.bump();
                Ok(Formula::reach(lhs, self.formula()?))
            }
            Tok::OpR => {
                self.bump();
                self.expect(Tok::LParen, "`(` after `R`")?;
                let via = self.formula()?;
                self.expect(Tok::RParen, "`)` closing the `R(...)` argument")?;
                Ok(Formula::reach_through(lhs, via, self.formula()?))
            }
            _ => Ok(lhs),
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == &Tok::Pipe {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::OpC => {
                self.bump();
                Ok(Formula::close(self.unary()?))
            }
            Tok::Near(_) => {
                let (_, Tok::Near(n)) = self.bump() else { unreachable!() };
                Ok(Formula::near(n, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Prop(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.err("a proposition, `true`, `!`, `C`, `N` or `(`")),
        }
    }
}

/// Parses formula text into an AST. [`Formula`]'s `Display` renders a text
/// form that reparses to a structurally equal tree.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let formula = parser.formula()?;
    if parser.peek() != &Tok::Eof {
        return Err(parser.err("end of input"));
    }
    Ok(formula)
}
