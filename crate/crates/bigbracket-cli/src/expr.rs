//! The expression grammar for superfunctions:
//!
//! ```text
//! expr      := ('+'|'-')? term (('+'|'-') term)*
//! term      := rational? ('*'? factor)*
//! factor    := generator ('^' posint)? | name
//! generator := 'x'INT | 'p'INT | 'xi'INT | 'th'INT
//! rational  := INT | INT '/' INT
//! ```
//!
//! Whitespace is insignificant; '^' is legal only on even generators. Bare
//! names resolve against an optional environment of previously bound
//! superfunctions (the problem-spec layer); the plain parser rejects them.

use std::collections::BTreeMap;
use std::fmt;

use bigbracket::superalgebra::{rat_int, Dims, GenKind, GeneratorId, Rational, Superfunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Int(String),
    Name(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, message: message.into() })
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '+' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Plus, line: tline, col: tcol });
            }
            '-' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Minus, line: tline, col: tcol });
            }
            '*' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Star, line: tline, col: tcol });
            }
            '^' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Caret, line: tline, col: tcol });
            }
            '/' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Slash, line: tline, col: tcol });
            }
            '0'..='9' => {
                let mut text = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Int(text), line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Name(text), line: tline, col: tcol });
            }
            other => return err(tline, tcol, format!("unexpected character '{}'", other)),
        }
    }
    Ok(out)
}

/// Splits a lexed name into a generator, if it matches the generator syntax.
fn classify_generator(text: &str) -> Option<(GenKind, &str)> {
    for (prefix, kind) in [("xi", GenKind::Xi), ("th", GenKind::Theta), ("x", GenKind::X), ("p", GenKind::P)] {
        if let Some(rest) = text.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return Some((kind, rest));
            }
        }
    }
    None
}

/// True when the identifier would collide with generator syntax.
pub fn is_generator_name(text: &str) -> bool {
    classify_generator(text).is_some()
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    dims: Dims,
    env: Option<&'a BTreeMap<String, Superfunction>>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_pos(&self) -> (usize, usize) {
        self.toks
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1))
    }

    fn parse_int(&mut self, what: &str) -> Result<(i64, usize, usize), ParseError> {
        match self.next() {
            Some(Spanned { tok: Tok::Int(text), line, col }) => match text.parse::<i64>() {
                Ok(v) => Ok((v, line, col)),
                Err(_) => err(line, col, format!("malformed {}: '{}'", what, text)),
            },
            Some(Spanned { tok, line, col }) => {
                err(line, col, format!("expected {}, found {:?}", what, tok))
            }
            None => {
                let (l, c) = self.end_pos();
                err(l, c, format!("expected {}, found end of input", what))
            }
        }
    }

    /// rational := INT ('/' INT)?
    fn parse_rational(&mut self) -> Result<Rational, ParseError> {
        let (numer, line, col) = self.parse_int("integer")?;
        if matches!(self.peek(), Some(Spanned { tok: Tok::Slash, .. })) {
            self.next();
            let (denom, dline, dcol) = self.parse_int("denominator")?;
            if denom == 0 {
                return err(dline, dcol, "malformed rational: zero denominator");
            }
            let _ = (line, col);
            Ok(Rational::new(numer.into(), denom.into()))
        } else {
            Ok(rat_int(numer))
        }
    }

    /// factor := generator ('^' posint)? | name
    fn parse_factor(&mut self) -> Result<Superfunction, ParseError> {
        let Some(Spanned { tok, line, col }) = self.next() else {
            let (l, c) = self.end_pos();
            return err(l, c, "expected a factor, found end of input");
        };
        let Tok::Name(text) = tok else {
            return err(line, col, format!("expected a generator or name, found {:?}", tok));
        };
        if let Some((kind, digits)) = classify_generator(&text) {
            let index: u32 = digits
                .parse()
                .map_err(|_| ParseError { line, col, message: format!("malformed index in '{}'", text) })?;
            let g = GeneratorId { kind, index };
            if g.check_in(self.dims).is_err() {
                return err(
                    line,
                    col,
                    format!("generator {} out of range for n={}, d={}", text, self.dims.n, self.dims.d),
                );
            }
            let base = Superfunction::generator(self.dims, g).expect("checked");
            if matches!(self.peek(), Some(Spanned { tok: Tok::Caret, .. })) {
                let caret = self.next().unwrap();
                if g.is_odd() {
                    return err(caret.line, caret.col, format!("'^' is not legal on odd generator {}", text));
                }
                let (exp, eline, ecol) = self.parse_int("exponent")?;
                if exp <= 0 {
                    return err(eline, ecol, "exponent must be a positive integer");
                }
                let mut acc = Superfunction::one(self.dims);
                for _ in 0..exp {
                    acc = acc.try_mul(&base).expect("same dims");
                }
                return Ok(acc);
            }
            return Ok(base);
        }
        if let Some(env) = self.env {
            if let Some(bound) = env.get(&text) {
                return Ok(bound.clone());
            }
            return err(line, col, format!("unknown generator or binding '{}'", text));
        }
        err(line, col, format!("unknown generator '{}'", text))
    }

    /// term := rational? ('*'? factor)*, with at least one component.
    fn parse_term(&mut self) -> Result<Superfunction, ParseError> {
        let mut saw_rational = false;
        let mut acc = if matches!(self.peek(), Some(Spanned { tok: Tok::Int(_), .. })) {
            saw_rational = true;
            Superfunction::scalar(self.dims, self.parse_rational()?)
        } else {
            Superfunction::one(self.dims)
        };
        let mut saw_factor = false;
        loop {
            match self.peek() {
                Some(Spanned { tok: Tok::Star, .. }) => {
                    self.next();
                    let f = self.parse_factor()?;
                    acc = acc.try_mul(&f).expect("same dims");
                    saw_factor = true;
                }
                Some(Spanned { tok: Tok::Name(_), .. }) => {
                    let f = self.parse_factor()?;
                    acc = acc.try_mul(&f).expect("same dims");
                    saw_factor = true;
                }
                Some(Spanned { tok: Tok::Int(text), line, col }) if saw_factor => {
                    return err(*line, *col, format!("unexpected integer '{}' after factors", text));
                }
                _ => break,
            }
        }
        if !saw_rational && !saw_factor {
            let (line, col) = self
                .peek()
                .map(|t| (t.line, t.col))
                .unwrap_or_else(|| self.end_pos());
            return err(line, col, "expected a term");
        }
        Ok(acc)
    }

    /// expr := sign? term (sign term)*
    fn parse_expr(&mut self) -> Result<Superfunction, ParseError> {
        let mut negate = false;
        if let Some(Spanned { tok, .. }) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.next();
                }
                Tok::Minus => {
                    self.next();
                    negate = true;
                }
                _ => {}
            }
        }
        let mut acc = self.parse_term()?;
        if negate {
            acc = acc.scale(&rat_int(-1));
        }
        loop {
            match self.peek() {
                Some(Spanned { tok: Tok::Plus, .. }) => {
                    self.next();
                    let t = self.parse_term()?;
                    acc = acc.try_add(&t).expect("same dims");
                }
                Some(Spanned { tok: Tok::Minus, .. }) => {
                    self.next();
                    let t = self.parse_term()?;
                    acc = acc.try_sub(&t).expect("same dims");
                }
                Some(Spanned { tok, line, col }) => {
                    return err(*line, *col, format!("expected '+' or '-', found {:?}", tok));
                }
                None => break,
            }
        }
        Ok(acc)
    }
}

/// Parses an expression over the given dimensions (generators only).
pub fn parse_expression(src: &str, n: u32, d: u32) -> Result<Superfunction, ParseError> {
    parse_with_env(src, Dims::new(n, d), None)
}

/// Parses an expression that may also reference previously bound names.
pub fn parse_with_env(
    src: &str,
    dims: Dims,
    env: Option<&BTreeMap<String, Superfunction>>,
) -> Result<Superfunction, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return err(1, 1, "empty expression");
    }
    let mut parser = Parser { toks, pos: 0, dims, env };
    parser.parse_expr()
}

/// Parses a standalone rational literal such as `-3/2`.
pub fn parse_rational_literal(src: &str) -> Result<Rational, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser { toks, pos: 0, dims: Dims::new(0, 1), env: None };
    let mut negate = false;
    if matches!(parser.peek(), Some(Spanned { tok: Tok::Minus, .. })) {
        parser.next();
        negate = true;
    }
    let r = parser.parse_rational()?;
    if parser.peek().is_some() {
        let t = parser.peek().unwrap();
        return err(t.line, t.col, "trailing input after rational");
    }
    Ok(if negate { -r } else { r })
}
