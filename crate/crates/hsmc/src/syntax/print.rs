//! Pretty-printer. `parse(print(φ)) == φ` structurally; see the round-trip
//! property test.

use super::{Constraint, Formula};
use std::fmt;

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}{}}}", self.op.token(), self.c)
    }
}

// Precedence levels, loosest to tightest. Implication never prints (the
// parser desugars it), so Or is the loosest live level.
const PREC_OR: u8 = 0;
const PREC_AND: u8 = 1;
const PREC_UNARY: u8 = 2;

fn prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Or(_) => PREC_OR,
        Formula::And(_) => PREC_AND,
        // A binder body swallows everything to its right, so when a binder
        // appears as a child of &/| it must be parenthesized: give it the
        // loosest level.
        Formula::Binder { .. } | Formula::Swap { .. } => PREC_OR,
        _ => PREC_UNARY,
    }
}

fn write_child(phi: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(phi) < min {
        write!(f, "({phi})")
    } else {
        write!(f, "{phi}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "T"),
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Var(v) => write!(f, "@{v}"),
            Formula::Not(c) => {
                write!(f, "~")?;
                write_child(c, PREC_UNARY, f)
            }
            Formula::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write_child(c, PREC_AND + 1, f)?;
                }
                Ok(())
            }
            Formula::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write_child(c, PREC_OR + 1, f)?;
                }
                Ok(())
            }
            Formula::HsMod {
                rel,
                universal,
                constraint,
                child,
            } => {
                let (open, close) = if *universal { ("[", "]") } else { ("<", ">") };
                write!(f, "{open}{}", rel.token())?;
                if let Some(k) = constraint {
                    write!(f, "{k}")?;
                }
                write!(f, "{close} ")?;
                write_child(child, PREC_UNARY, f)
            }
            Formula::ChlTemp {
                op,
                constraint,
                child,
            } => {
                write!(f, "{}", op.token())?;
                if let Some(k) = constraint {
                    write!(f, "{k}")?;
                }
                write!(f, " ")?;
                write_child(child, PREC_UNARY, f)
            }
            Formula::Binder { var, child } => write!(f, "down {var} . {child}"),
            Formula::Swap { var, child } => write!(f, "swap {var} . {child}"),
        }
    }
}
