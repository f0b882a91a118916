//! Parser for the term and ordinal literal grammar.
//!
//! ```text
//! term := "0" | "pt" | "J(" ord ")" | "i(" nat ")" | "isum"
//!       | "cone(" term ")" | item ("+" item)*
//! item := mult "*" term | term
//! mult := nat | "w" | "w1"
//! ord  := sum of "w1^e*c" / "w^e*c" style terms and naturals
//! ```
//!
//! Whitespace is insignificant; `ω` and `ω₁` are accepted as aliases for
//! `w` and `w1`. Parsing validates term invariants and reports positions.

use crate::mult::{Fin, Mult, Omega, Omega1};
use crate::ordinal::{Countable, Ordinal};
use crate::term::{build_i, build_j, SpaceTerm, TermError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Word(String),
    Sym(char),
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

fn lex(s: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                n = n
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(chars[i].1 as u64 - '0' as u64))
                    .ok_or_else(|| ParseError {
                        pos,
                        msg: "number too large".into(),
                    })?;
                i += 1;
            }
            toks.push((pos, Tok::Num(n)));
            continue;
        }
        if c.is_alphabetic() || c == 'ω' {
            let mut w = String::new();
            while i < chars.len() {
                let ch = chars[i].1;
                if ch.is_alphanumeric() || ch == 'ω' || ch == '₁' {
                    w.push(ch);
                    i += 1;
                } else {
                    break;
                }
            }
            let w = match w.as_str() {
                "ω" => "w".to_string(),
                "ω₁" | "ω1" => "w1".to_string(),
                _ => w,
            };
            toks.push((pos, Tok::Word(w)));
            continue;
        }
        match c {
            '+' | '*' | '^' | '(' | ')' | ',' => {
                toks.push((pos, Tok::Sym(c)));
                i += 1;
            }
            _ => {
                return Err(ParseError {
                    pos,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(Lexer {
        toks,
        at: 0,
        end: s.len(),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }
    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|(_, t)| t)
    }
    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }
    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            _ => Err(ParseError {
                pos,
                msg: format!("expected {c:?}"),
            }),
        }
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }
}

/// Parses a space term and validates its invariants.
pub fn parse_term(s: &str) -> Result<SpaceTerm, ParseError> {
    let mut lx = lex(s)?;
    let t = term_expr(&mut lx, 0)?;
    if lx.peek().is_some() {
        return lx.err("trailing input");
    }
    Ok(t)
}

/// Parses an ordinal literal below ω₂.
pub fn parse_ordinal(s: &str) -> Result<Ordinal, ParseError> {
    let mut lx = lex(s)?;
    let o = ord_expr(&mut lx)?;
    if lx.peek().is_some() {
        return lx.err("trailing input");
    }
    Ok(o)
}

/// Parses a multiplicity token: a natural, `w`, or `w1`.
pub fn parse_mult(s: &str) -> Result<Mult, ParseError> {
    let mut lx = lex(s)?;
    let m = mult_tok(&mut lx)?;
    if lx.peek().is_some() {
        return lx.err("trailing input");
    }
    Ok(m)
}

fn mult_tok(lx: &mut Lexer) -> Result<Mult, ParseError> {
    let pos = lx.pos();
    match lx.next() {
        Some(Tok::Num(n)) => Ok(Fin(n)),
        Some(Tok::Word(w)) if w == "w" => Ok(Omega),
        Some(Tok::Word(w)) if w == "w1" => Ok(Omega1),
        _ => Err(ParseError {
            pos,
            msg: "expected multiplicity (nat, w, or w1)".into(),
        }),
    }
}

fn term_expr(lx: &mut Lexer, depth: usize) -> Result<SpaceTerm, ParseError> {
    if depth > MAX_DEPTH {
        return lx.err(TermError::TooDeep.to_string());
    }
    let mut entries = vec![(Fin(1), item(lx, depth)?)];
    while lx.peek() == Some(&Tok::Sym('+')) {
        lx.next();
        entries.push((Fin(1), item(lx, depth)?));
    }
    Ok(SpaceTerm::sum(entries))
}

fn item(lx: &mut Lexer, depth: usize) -> Result<SpaceTerm, ParseError> {
    let starts_mult = match lx.peek() {
        Some(Tok::Num(_)) => true,
        Some(Tok::Word(w)) => w == "w" || w == "w1",
        _ => false,
    };
    if starts_mult && lx.peek2() == Some(&Tok::Sym('*')) {
        let m = mult_tok(lx)?;
        lx.expect_sym('*')?;
        let t = atom(lx, depth + 1)?;
        return Ok(SpaceTerm::times(m, t));
    }
    atom(lx, depth + 1)
}

fn atom(lx: &mut Lexer, depth: usize) -> Result<SpaceTerm, ParseError> {
    if depth > MAX_DEPTH {
        return lx.err(TermError::TooDeep.to_string());
    }
    let pos = lx.pos();
    match lx.next() {
        Some(Tok::Num(0)) => Ok(SpaceTerm::Empty),
        Some(Tok::Word(w)) => match w.as_str() {
            "pt" => Ok(SpaceTerm::Pt),
            "isum" => Ok(SpaceTerm::ISumOmega),
            "cone" => {
                lx.expect_sym('(')?;
                let s = term_expr(lx, depth + 1)?;
                lx.expect_sym(')')?;
                SpaceTerm::cone(s).map_err(|e| ParseError {
                    pos,
                    msg: e.to_string(),
                })
            }
            "J" => {
                lx.expect_sym('(')?;
                let o = ord_expr(lx)?;
                lx.expect_sym(')')?;
                build_j(&o).map_err(|e| ParseError {
                    pos,
                    msg: e.to_string(),
                })
            }
            "i" => {
                lx.expect_sym('(')?;
                let n = match lx.next() {
                    Some(Tok::Num(n)) => n,
                    _ => return lx.err("expected natural number in i(..)"),
                };
                lx.expect_sym(')')?;
                Ok(build_i(n))
            }
            other => Err(ParseError {
                pos,
                msg: format!("unknown term head {other:?}"),
            }),
        },
        _ => Err(ParseError {
            pos,
            msg: "expected a term".into(),
        }),
    }
}

// --- ordinal literals ------------------------------------------------------

fn ord_expr(lx: &mut Lexer) -> Result<Ordinal, ParseError> {
    let mut acc = ord_term(lx)?;
    while lx.peek() == Some(&Tok::Sym('+')) {
        lx.next();
        let t = ord_term(lx)?;
        acc = acc.add(&t);
    }
    Ok(acc)
}

fn ord_term(lx: &mut Lexer) -> Result<Ordinal, ParseError> {
    let pos = lx.pos();
    match lx.next() {
        Some(Tok::Num(n)) => Ok(Ordinal::from_u64(n)),
        Some(Tok::Word(w)) if w == "w1" => {
            let exp = if lx.peek() == Some(&Tok::Sym('^')) {
                lx.next();
                ord_factor(lx)?
            } else {
                Countable::one()
            };
            let coeff = if lx.peek() == Some(&Tok::Sym('*')) {
                lx.next();
                ord_factor(lx)?
            } else {
                Countable::one()
            };
            Ok(Ordinal::from_parts(vec![(exp, coeff)], Countable::zero()))
        }
        Some(Tok::Word(w)) if w == "w" => {
            let c = countable_w_rest(lx)?;
            Ok(Ordinal::from_countable(c))
        }
        _ => Err(ParseError {
            pos,
            msg: "expected ordinal term".into(),
        }),
    }
}

/// A countable factor: `( ord )`, `w[^f][*n]`, or a natural.
fn ord_factor(lx: &mut Lexer) -> Result<Countable, ParseError> {
    let pos = lx.pos();
    match lx.peek() {
        Some(Tok::Sym('(')) => {
            lx.next();
            let o = ord_expr(lx)?;
            lx.expect_sym(')')?;
            match o.as_countable() {
                Some(c) => Ok(c.clone()),
                None => Err(ParseError {
                    pos,
                    msg: "exponent/coefficient must be countable".into(),
                }),
            }
        }
        Some(Tok::Num(_)) => {
            if let Some(Tok::Num(n)) = lx.next() {
                Ok(Countable::from_u64(n))
            } else {
                unreachable!()
            }
        }
        Some(Tok::Word(w)) if w == "w" => {
            lx.next();
            countable_w_rest(lx)
        }
        _ => Err(ParseError {
            pos,
            msg: "expected countable ordinal factor".into(),
        }),
    }
}

/// Continues after a `w` head: optional `^factor` and `*nat`.
fn countable_w_rest(lx: &mut Lexer) -> Result<Countable, ParseError> {
    let exp = if lx.peek() == Some(&Tok::Sym('^')) {
        lx.next();
        ord_factor(lx)?
    } else {
        Countable::one()
    };
    let coeff = if lx.peek() == Some(&Tok::Sym('*')) {
        lx.next();
        let pos = lx.pos();
        match lx.next() {
            Some(Tok::Num(n)) => n,
            _ => {
                return Err(ParseError {
                    pos,
                    msg: "expected natural coefficient".into(),
                })
            }
        }
    } else {
        1
    };
    Ok(Countable::from_terms(vec![(exp, coeff)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::build_j;

    #[test]
    fn term_examples() {
        assert_eq!(parse_term("pt").unwrap(), SpaceTerm::Pt);
        assert_eq!(
            parse_term("w1*pt").unwrap(),
            SpaceTerm::times(Omega1, SpaceTerm::Pt)
        );
        assert_eq!(parse_term("cone(w*pt)").unwrap(), build_i(2));
        assert_eq!(parse_term("i(2)").unwrap(), build_i(2));
        assert_eq!(
            parse_term("J(2)").unwrap(),
            build_j(&Ordinal::from_u64(2)).unwrap()
        );
        assert_eq!(parse_term("0").unwrap(), SpaceTerm::Empty);
        assert_eq!(parse_term("isum").unwrap(), SpaceTerm::ISumOmega);
        // Sums parse and canonicalize.
        let t = parse_term("pt + w*pt + pt").unwrap();
        assert_eq!(t, SpaceTerm::times(Omega, SpaceTerm::Pt));
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(parse_term("ω₁*pt").unwrap(), parse_term("w1*pt").unwrap());
        assert_eq!(parse_term("ω*pt").unwrap(), parse_term("w*pt").unwrap());
        assert_eq!(
            parse_ordinal("ω₁^2").unwrap(),
            parse_ordinal("w1^2").unwrap()
        );
    }

    #[test]
    fn ordinal_examples() {
        let x = parse_ordinal("w1^2*3 + w1*5 + w^2 + 4").unwrap();
        assert_eq!(format!("{x}"), "w1^2*3 + w1*5 + w^2 + 4");
        assert_eq!(parse_ordinal("w").unwrap(), Ordinal::omega());
        assert_eq!(parse_ordinal("w1").unwrap(), Ordinal::omega1());
        assert_eq!(parse_ordinal("0").unwrap(), Ordinal::zero());
        // Values canonicalize: countable absorbed before omega-1.
        assert_eq!(parse_ordinal("w + w1").unwrap(), Ordinal::omega1());
        // Nested exponents and composite coefficients.
        let y = parse_ordinal("w1^(w+1)*(w*2) + w^(w)").unwrap();
        assert_eq!(format!("{y}"), "w1^(w + 1)*(w*2) + w^(w)");
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_term("cone()").unwrap_err();
        assert!(e.pos > 0);
        assert!(parse_term("cone(0)").is_err());
        assert!(parse_term("J(w1)").is_err());
        assert!(parse_term("pt +").is_err());
        assert!(parse_term("5").is_err());
        assert!(parse_term("foo").is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        for s in [
            "pt",
            "w1*pt",
            "cone(w*pt)",
            "cone(w1*pt + w*cone(w*pt))",
            "J(w)",
            "isum",
            "w1*pt + cone(w*pt)",
            "J(w+2)",
        ] {
            let t = parse_term(s).unwrap();
            let printed = format!("{t}");
            let t2 = parse_term(&printed).unwrap();
            assert_eq!(t, t2, "roundtrip {s} -> {printed}");
        }
    }
}
