//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! term   := or ("->" term)?                    right-associative
//! or     := and ("|" and)*
//! and    := unary ("&" unary)*
//! unary  := "~" unary
//!         | "<" REL braces? ">" unary | "[" REL braces? "]" unary
//!         | ("F"|"P"|"G"|"H") braces? unary
//!         | ("down"|"swap") ID "." term
//!         | atom
//! atom   := "T" | ID | "@" ID | "(" term ")"
//! braces := "{" ("<"|"<="|"="|">"|">=") INT "}"
//! ```
//!
//! `T`, `F`, `P`, `G`, `H`, `down`, `swap` and the relation names are
//! reserved and cannot be propositions.

use super::lex::{Lexer, Spanned, Tok};
use super::{CmpOp, Constraint, Formula, Relation, TempOp};

/// Parse failure with source position.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct SyntaxError {
    pub msg: String,
    pub line: u32,
    pub col: u32,
}

fn relation_from(name: &str) -> Option<Relation> {
    Some(match name {
        "A" => Relation::A,
        "L" => Relation::L,
        "B" => Relation::B,
        "E" => Relation::E,
        "D" => Relation::D,
        "O" => Relation::O,
        "Abar" => Relation::ABar,
        "Lbar" => Relation::LBar,
        "Bbar" => Relation::BBar,
        "Ebar" => Relation::EBar,
        "Dbar" => Relation::DBar,
        "Obar" => Relation::OBar,
        _ => return None,
    })
}

const RESERVED: [&str; 7] = ["T", "F", "P", "G", "H", "down", "swap"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: u32,
    end_col: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        let (line, col) = self.here();
        Err(SyntaxError {
            msg: msg.into(),
            line,
            col,
        })
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if t == want => {
                self.bump();
                Ok(())
            }
            Some(t) => {
                let t = t.clone();
                self.err(format!("expected {what}, found {t}"))
            }
            None => self.err(format!("expected {what}, found end of input")),
        }
    }

    fn term(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or_term()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.term()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or_term(&mut self) -> Result<Formula, SyntaxError> {
        let mut parts = vec![self.and_term()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            parts.push(self.and_term()?);
        }
        Ok(Formula::or(parts))
    }

    fn and_term(&mut self) -> Result<Formula, SyntaxError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn constraint_braces(&mut self) -> Result<Option<Constraint>, SyntaxError> {
        if self.peek() != Some(&Tok::LBrace) {
            return Ok(None);
        }
        self.bump();
        let op = match self.peek() {
            Some(Tok::Lt) => CmpOp::Lt,
            Some(Tok::Le) => CmpOp::Le,
            Some(Tok::Eq) => CmpOp::Eq,
            Some(Tok::Gt) => CmpOp::Gt,
            Some(Tok::Ge) => CmpOp::Ge,
            Some(t) => {
                let t = t.clone();
                return self.err(format!("expected comparison operator, found {t}"));
            }
            None => return self.err("expected comparison operator, found end of input"),
        };
        self.bump();
        let c = match self.peek() {
            Some(&Tok::Int(n)) => n,
            Some(t) => {
                let t = t.clone();
                return self.err(format!("expected integer constant, found {t}"));
            }
            None => return self.err("expected integer constant, found end of input"),
        };
        self.bump();
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(Some(Constraint::new(op, c)))
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(self.unary()?.negate())
            }
            Some(Tok::LAngle) | Some(Tok::LBracket) => {
                let universal = self.peek() == Some(&Tok::LBracket);
                self.bump();
                let rel = match self.peek() {
                    Some(Tok::Ident(name)) => match relation_from(name) {
                        Some(r) => r,
                        None => {
                            let name = name.clone();
                            return self.err(format!("unknown modality `{name}`"));
                        }
                    },
                    Some(t) => {
                        let t = t.clone();
                        return self.err(format!("expected modality name, found {t}"));
                    }
                    None => return self.err("expected modality name, found end of input"),
                };
                self.bump();
                let constraint = self.constraint_braces()?;
                if universal {
                    self.expect(&Tok::RBracket, "`]`")?;
                } else {
                    self.expect(&Tok::RAngle, "`>`")?;
                }
                let child = self.unary()?;
                Ok(if universal {
                    Formula::hs_univ(rel, constraint, child)
                } else {
                    Formula::hs(rel, constraint, child)
                })
            }
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                match name.as_str() {
                    "T" => {
                        self.bump();
                        Ok(Formula::Top)
                    }
                    "F" | "P" | "G" | "H" => {
                        self.bump();
                        let op = match name.as_str() {
                            "F" => TempOp::F,
                            "P" => TempOp::P,
                            "G" => TempOp::G,
                            _ => TempOp::H,
                        };
                        let constraint = self.constraint_braces()?;
                        let child = self.unary()?;
                        Ok(Formula::temp(op, constraint, child))
                    }
                    "down" | "swap" => {
                        self.bump();
                        let var = match self.peek() {
                            Some(Tok::Ident(v)) if !RESERVED.contains(&v.as_str()) => v.clone(),
                            Some(t) => {
                                let t = t.clone();
                                return self.err(format!("expected variable name, found {t}"));
                            }
                            None => {
                                return self.err("expected variable name, found end of input")
                            }
                        };
                        self.bump();
                        self.expect(&Tok::Dot, "`.`")?;
                        let child = self.term()?;
                        Ok(if name == "down" {
                            Formula::binder(var, child)
                        } else {
                            Formula::swap(var, child)
                        })
                    }
                    _ => {
                        self.bump();
                        Ok(Formula::Prop(name))
                    }
                }
            }
            Some(Tok::At) => {
                self.bump();
                match self.peek() {
                    Some(Tok::Ident(v)) if !RESERVED.contains(&v.as_str()) => {
                        let v = v.clone();
                        self.bump();
                        Ok(Formula::Var(v))
                    }
                    Some(t) => {
                        let t = t.clone();
                        self.err(format!("expected variable name after `@`, found {t}"))
                    }
                    None => self.err("expected variable name after `@`, found end of input"),
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(t) => {
                let t = t.clone();
                self.err(format!("expected formula, found {t}"))
            }
            None => self.err("expected formula, found end of input"),
        }
    }
}

/// Parse a formula from text. Whitespace-insensitive.
pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let toks = Lexer::new(text).tokenize().map_err(|(msg, line, col)| SyntaxError {
        msg,
        line,
        col,
    })?;
    let (end_line, end_col) = toks
        .last()
        .map(|s| (s.line, s.col + 1))
        .unwrap_or((1, 1));
    let mut p = Parser {
        toks,
        pos: 0,
        end_line,
        end_col,
    };
    let phi = p.term()?;
    if p.pos != p.toks.len() {
        let t = p.peek().unwrap().clone();
        return p.err(format!("unexpected trailing {t}"));
    }
    Ok(phi)
}
