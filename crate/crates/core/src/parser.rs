//! Term parser.
//!
//! Grammar, loosest binding last: prefix dot, then `+`, then `|`. A
//! `nu NAME.` body extends as far right as the enclosing parentheses allow,
//! so `a.0 | nu x. b.0 | c.0` restricts `x` over `b.0 | c.0`. Operands of
//! `+` must denote prefixed processes. Internal `#`-names are accepted
//! wherever a name may appear, so canonical renderings parse back.

use std::iter::Peekable;

use crate::name::{is_valid_user_name, Name};
use crate::term::{Calculus, Node, Prefix, Term, TermError};

/// Parses `text` as a term of the given calculus.
pub fn parse_term(text: &str, calculus: Calculus) -> Result<Term, TermError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens: tokens.into_iter().peekable(), calculus, end: text.len() };
    let term = parser.proc()?;
    match parser.tokens.next() {
        None => Ok(term),
        Some((pos, token)) => Err(err(pos, format!("unexpected {}", token.describe()))),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Zero,
    Dot,
    Plus,
    Pipe,
    Tilde,
    LParen,
    RParen,
    Lt,
    Gt,
    KwNu,
    KwTau,
    Ident(String),
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Zero => "'0'".to_string(),
            Token::Dot => "'.'".to_string(),
            Token::Plus => "'+'".to_string(),
            Token::Pipe => "'|'".to_string(),
            Token::Tilde => "'~'".to_string(),
            Token::LParen => "'('".to_string(),
            Token::RParen => "')'".to_string(),
            Token::Lt => "'<'".to_string(),
            Token::Gt => "'>'".to_string(),
            Token::KwNu => "'nu'".to_string(),
            Token::KwTau => "'tau'".to_string(),
            Token::Ident(name) => format!("name {name:?}"),
        }
    }
}

fn err(pos: usize, msg: impl Into<String>) -> TermError {
    TermError::Parse { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, TermError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '.' | '+' | '|' | '~' | '(' | ')' | '<' | '>' => {
                let token = match c {
                    '.' => Token::Dot,
                    '+' => Token::Plus,
                    '|' => Token::Pipe,
                    '~' => Token::Tilde,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    '<' => Token::Lt,
                    _ => Token::Gt,
                };
                tokens.push((i, token));
                i += 1;
            }
            '0' => {
                if bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric()) {
                    return Err(err(i, "names may not start with a digit"));
                }
                tokens.push((i, Token::Zero));
                i += 1;
            }
            '#' => {
                let start = i;
                i += 1;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                if i == start + 1 {
                    return Err(err(start, "'#' must be followed by a name"));
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let token = match word {
                    "nu" => Token::KwNu,
                    "tau" => Token::KwTau,
                    _ => {
                        debug_assert!(is_valid_user_name(word));
                        Token::Ident(word.to_string())
                    }
                };
                tokens.push((start, token));
            }
            _ => return Err(err(i, format!("unexpected character {c:?}"))),
        }
    }
    Ok(tokens)
}

struct Parser<I: Iterator<Item = (usize, Token)>> {
    tokens: Peekable<I>,
    calculus: Calculus,
    end: usize,
}

impl<I: Iterator<Item = (usize, Token)>> Parser<I> {
    fn peek(&mut self) -> Option<&Token> {
        self.tokens.peek().map(|(_, t)| t)
    }

    fn pos(&mut self) -> usize {
        let end = self.end;
        self.tokens.peek().map_or(end, |(p, _)| *p)
    }

    fn expect(&mut self, want: Token) -> Result<usize, TermError> {
        let pos = self.pos();
        match self.tokens.next() {
            Some((p, t)) if t == want => Ok(p),
            Some((p, t)) => {
                Err(err(p, format!("expected {}, found {}", want.describe(), t.describe())))
            }
            None => Err(err(pos, format!("expected {}, found end of input", want.describe()))),
        }
    }

    fn name(&mut self) -> Result<Name, TermError> {
        let pos = self.pos();
        match self.tokens.next() {
            Some((_, Token::Ident(text))) => Ok(Name::from_token(&text)),
            Some((p, t)) => Err(err(p, format!("expected a name, found {}", t.describe()))),
            None => Err(err(pos, "expected a name, found end of input")),
        }
    }

    /// Lowest level: `|`-separated components.
    fn proc(&mut self) -> Result<Term, TermError> {
        let mut components = vec![self.sum()?];
        while self.peek() == Some(&Token::Pipe) {
            self.tokens.next();
            components.push(self.sum()?);
        }
        Ok(if components.len() == 1 {
            components.pop().expect("single component")
        } else {
            Term::par(self.calculus, components)
        })
    }

    /// `+`-separated guarded operands.
    fn sum(&mut self) -> Result<Term, TermError> {
        let first_pos = self.pos();
        let mut operands = vec![(first_pos, self.item()?)];
        while self.peek() == Some(&Token::Plus) {
            self.tokens.next();
            let pos = self.pos();
            operands.push((pos, self.item()?));
        }
        if operands.len() == 1 {
            return Ok(operands.pop().expect("single operand").1);
        }
        let mut summands = Vec::new();
        for (pos, operand) in operands {
            match operand.node() {
                Node::Sum(parts) if !parts.is_empty() => summands.extend(parts.iter().cloned()),
                _ => return Err(TermError::UnguardedSum { pos }),
            }
        }
        Ok(Term::sum(self.calculus, summands))
    }

    /// Atoms: `0`, parentheses, a prefixed item, or a `nu` binder whose body
    /// runs to the nearest unmatched `)` or the end of input.
    fn item(&mut self) -> Result<Term, TermError> {
        let pos = self.pos();
        match self.tokens.next() {
            Some((_, Token::Zero)) => Ok(Term::empty(self.calculus)),
            Some((_, Token::LParen)) => {
                let inner = self.proc()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some((_, Token::KwNu)) => {
                let binder = self.name()?;
                self.expect(Token::Dot)?;
                let body = self.proc()?;
                Ok(Term::nu(binder, body))
            }
            Some((_, Token::KwTau)) => {
                self.expect(Token::Dot)?;
                Ok(Term::prefixed(Prefix::Tau, self.item()?))
            }
            Some((p, Token::Tilde)) => {
                if self.calculus == Calculus::Pi {
                    return Err(TermError::WrongCalculus {
                        pos: p,
                        expected: Calculus::Pi,
                        found: Calculus::Ccs,
                    });
                }
                let chan = self.name()?;
                self.expect(Token::Dot)?;
                Ok(Term::prefixed(Prefix::CcsOut(chan), self.item()?))
            }
            Some((p, Token::Ident(text))) => self.prefixed_item(p, Name::from_token(&text)),
            Some((p, t)) => Err(err(p, format!("expected a process, found {}", t.describe()))),
            None => Err(err(pos, "expected a process, found end of input")),
        }
    }

    fn prefixed_item(&mut self, pos: usize, chan: Name) -> Result<Term, TermError> {
        match (self.calculus, self.peek()) {
            (Calculus::Ccs, Some(Token::Dot)) => {
                self.tokens.next();
                Ok(Term::prefixed(Prefix::CcsIn(chan), self.item()?))
            }
            (Calculus::Ccs, Some(Token::LParen | Token::Lt)) => Err(TermError::WrongCalculus {
                pos,
                expected: Calculus::Ccs,
                found: Calculus::Pi,
            }),
            (Calculus::Pi, Some(Token::LParen)) => {
                self.tokens.next();
                let binder = self.name()?;
                self.expect(Token::RParen)?;
                self.expect(Token::Dot)?;
                Ok(Term::prefixed(Prefix::PiIn { chan, binder }, self.item()?))
            }
            (Calculus::Pi, Some(Token::Lt)) => {
                self.tokens.next();
                let datum = self.name()?;
                self.expect(Token::Gt)?;
                self.expect(Token::Dot)?;
                Ok(Term::prefixed(Prefix::PiOut { chan, datum }, self.item()?))
            }
            (Calculus::Pi, Some(Token::Dot)) => Err(TermError::WrongCalculus {
                pos,
                expected: Calculus::Pi,
                found: Calculus::Ccs,
            }),
            (_, Some(t)) => {
                let t = t.clone();
                Err(err(self.pos(), format!("expected a prefix, found {}", t.describe())))
            }
            (_, None) => Err(err(self.end, "expected a prefix, found end of input")),
        }
    }
}
