//! Tiny guard predicate language for mapping rules.
//!
//! Grammar, deliberately closed so evaluation is total and side-effect
//! free:
//!
//! ```text
//! expr    := term ('&' term)*
//! term    := '!' term | atom
//! atom    := 'true' | ident '=' ident | '(' expr ')'
//! ident   := [A-Za-z0-9_-]+
//! ```
//!
//! Attributes resolve against a flat string map of the source instance;
//! a missing attribute simply compares unequal to everything.

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    True,
    Eq { attr: String, value: String },
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn eq(attr: impl Into<String>, value: impl Into<String>) -> Guard {
        Guard::Eq {
            attr: attr.into(),
            value: value.into(),
        }
    }

    pub fn and(self, other: Guard) -> Guard {
        Guard::And(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> Guard {
        Guard::Not(Box::new(self))
    }

    pub fn eval(&self, attrs: &BTreeMap<String, String>) -> bool {
        match self {
            Guard::True => true,
            Guard::Eq { attr, value } => attrs.get(attr) == Some(value),
            Guard::Not(g) => !g.eval(attrs),
            Guard::And(a, b) => a.eval(attrs) && b.eval(attrs),
        }
    }

    /// Attribute names the guard inspects, for definition checking.
    pub fn attributes(&self) -> Vec<&str> {
        match self {
            Guard::True => Vec::new(),
            Guard::Eq { attr, .. } => vec![attr.as_str()],
            Guard::Not(g) => g.attributes(),
            Guard::And(a, b) => {
                let mut v = a.attributes();
                v.extend(b.attributes());
                v
            }
        }
    }

    pub fn parse(text: &str) -> Result<Guard, GuardParseError> {
        let mut p = Parser { src: text, pos: 0 };
        p.skip_ws();
        let g = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(GuardParseError::Trailing {
                at: p.pos,
                text: text.to_string(),
            });
        }
        Ok(g)
    }
}

impl std::fmt::Display for Guard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Guard::True => write!(f, "true"),
            Guard::Eq { attr, value } => write!(f, "{attr}={value}"),
            Guard::Not(g) => match g.as_ref() {
                Guard::Eq { .. } | Guard::True => write!(f, "!{g}"),
                _ => write!(f, "!({g})"),
            },
            Guard::And(a, b) => {
                match a.as_ref() {
                    Guard::And(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " & ")?;
                match b.as_ref() {
                    Guard::And(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardParseError {
    #[error("unexpected end of guard expression {text:?}")]
    Eof { text: String },
    #[error("unexpected character at offset {at} in guard expression {text:?}")]
    Unexpected { at: usize, text: String },
    #[error("trailing input at offset {at} in guard expression {text:?}")]
    Trailing { at: usize, text: String },
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<Guard, GuardParseError> {
        let mut g = self.term()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('&') {
                self.pos += 1;
                self.skip_ws();
                g = g.and(self.term()?);
            } else {
                return Ok(g);
            }
        }
    }

    fn term(&mut self) -> Result<Guard, GuardParseError> {
        self.skip_ws();
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(self.term()?.negate())
            }
            Some('(') => {
                self.pos += 1;
                let g = self.expr()?;
                self.skip_ws();
                if self.peek() == Some(')') {
                    self.pos += 1;
                    Ok(g)
                } else {
                    Err(self.unexpected())
                }
            }
            Some(c) if ident_char(c) => {
                let name = self.ident();
                if name == "true" {
                    return Ok(Guard::True);
                }
                self.skip_ws();
                if self.peek() != Some('=') {
                    return Err(self.unexpected());
                }
                self.pos += 1;
                self.skip_ws();
                match self.peek() {
                    Some(c) if ident_char(c) => Ok(Guard::eq(name, self.ident())),
                    _ => Err(self.unexpected()),
                }
            }
            Some(_) => Err(self.unexpected()),
            None => Err(GuardParseError::Eof {
                text: self.src.to_string(),
            }),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(ident_char) {
            self.pos += self.peek().unwrap().len_utf8();
        }
        self.src[start..self.pos].to_string()
    }

    fn unexpected(&self) -> GuardParseError {
        if self.pos >= self.src.len() {
            GuardParseError::Eof {
                text: self.src.to_string(),
            }
        } else {
            GuardParseError::Unexpected {
                at: self.pos,
                text: self.src.to_string(),
            }
        }
    }
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn parses_equality() {
        let g = Guard::parse("triggering=OR").unwrap();
        assert_eq!(g, Guard::eq("triggering", "OR"));
        assert!(g.eval(&attrs(&[("triggering", "OR")])));
        assert!(!g.eval(&attrs(&[("triggering", "AND")])));
        assert!(!g.eval(&attrs(&[])));
    }

    #[test]
    fn parses_conjunction_and_negation() {
        let g = Guard::parse("triggering=OR & !branching=AND").unwrap();
        assert!(g.eval(&attrs(&[("triggering", "OR"), ("branching", "NONE")])));
        assert!(!g.eval(&attrs(&[("triggering", "OR"), ("branching", "AND")])));
    }

    #[test]
    fn parses_parens_and_true() {
        let g = Guard::parse("!(a=1 & b=2)").unwrap();
        assert!(g.eval(&attrs(&[("a", "1")])));
        assert_eq!(Guard::parse("true").unwrap(), Guard::True);
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "true",
            "triggering=OR",
            "a=1 & b=2",
            "!(a=1 & b=2)",
            "!a=1 & b=2",
        ] {
            let g = Guard::parse(text).unwrap();
            let printed = g.to_string();
            assert_eq!(
                Guard::parse(&printed).unwrap(),
                g,
                "text {text:?} printed {printed:?}"
            );
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(Guard::parse("=x").is_err());
        assert!(Guard::parse("a=").is_err());
        assert!(Guard::parse("a=1 extra").is_err());
        assert!(Guard::parse("(a=1").is_err());
    }
}
