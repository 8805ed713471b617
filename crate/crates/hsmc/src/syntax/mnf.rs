//! Monotonic normal form for point-based formulas: negations pushed down to
//! propositions/variables/`T`, and every constrained temporal operator
//! rewritten so that only `{<= c}` with `c >= 1` remains.
//!
//! Rewrites used (each is a strong equivalence, oracle-checked in tests):
//!   F{<c}  ψ ≡ F{<=c-1} ψ               and the mirror for P/G/H
//!   F{>=c} ψ ≡ F{>c-1} ψ                "
//!   F{<=c} ψ ≡ ~T         (c <= 0)      strict step has offset >= 1
//!   G{<=c} ψ ≡ T          (c <= 0)
//!   F{>c}  ψ ≡ F ψ        (c <= 0)
//!   F{>c}  ψ ≡ G{<=c} F ψ (c >= 1)
//!   P{>c}  ψ ≡ P T & H{<=c} P ψ (c >= 1)
//!   G{>c}  ψ ≡ F{<=c} G ψ (c >= 1)
//!   H{>c}  ψ ≡ H ~T | P{<=c} H ψ (c >= 1)
//!
//! The `H{>c}` rewrite needs the `H ~T` disjunct (true exactly at position 0)
//! because at position 0 the left side holds vacuously while `P{<=c} H ψ`
//! has no witness.

use super::{CmpOp, Constraint, Formula, TempOp};
use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum MnfError {
    #[error("normal form is defined for point-based formulas; found interval modality")]
    IntervalModality,
    #[error("equality constraint `{{={0}}}` is not monotonic")]
    EqualityConstraint(i64),
}

/// Rewrites per (node address, polarity), so shared subtrees are processed
/// once per polarity they are reached in. Keys point into the input tree,
/// which outlives the pass.
type PolarityMemo = HashMap<(usize, bool), Formula>;

/// Rewrite a monotonic point-based formula into monotonic normal form.
pub fn to_mnf(phi: &Formula) -> Result<Formula, MnfError> {
    positive(phi, &mut HashMap::new())
}

fn positive(phi: &Formula, memo: &mut PolarityMemo) -> Result<Formula, MnfError> {
    let key = (phi as *const Formula as usize, true);
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let out = match phi {
        Formula::Top | Formula::Prop(_) | Formula::Var(_) => phi.clone(),
        Formula::Not(c) => negative(c, memo)?,
        Formula::And(cs) => Formula::and(
            cs.iter()
                .map(|c| positive(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(cs) => Formula::or(
            cs.iter()
                .map(|c| positive(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Binder { var, child } => Formula::binder(var.clone(), positive(child, memo)?),
        Formula::Swap { var, child } => Formula::swap(var.clone(), positive(child, memo)?),
        Formula::ChlTemp {
            op,
            constraint,
            child,
        } => {
            let child = positive(child, memo)?;
            match constraint {
                None => Formula::temp(*op, None, child),
                Some(k) => constrained(*op, *k, child)?,
            }
        }
        Formula::HsMod { .. } => return Err(MnfError::IntervalModality),
    };
    memo.insert(key, out.clone());
    Ok(out)
}

fn negative(phi: &Formula, memo: &mut PolarityMemo) -> Result<Formula, MnfError> {
    let key = (phi as *const Formula as usize, false);
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let out = match phi {
        Formula::Top | Formula::Prop(_) | Formula::Var(_) => phi.clone().negate(),
        Formula::Not(c) => positive(c, memo)?,
        Formula::And(cs) => Formula::or(
            cs.iter()
                .map(|c| negative(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(cs) => Formula::and(
            cs.iter()
                .map(|c| negative(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Binder { var, child } => Formula::binder(var.clone(), negative(child, memo)?),
        Formula::Swap { var, child } => Formula::swap(var.clone(), negative(child, memo)?),
        Formula::ChlTemp {
            op,
            constraint,
            child,
        } => {
            let child = negative(child, memo)?;
            match constraint {
                None => Formula::temp(op.dual(), None, child),
                Some(k) => constrained(op.dual(), *k, child)?,
            }
        }
        Formula::HsMod { .. } => return Err(MnfError::IntervalModality),
    };
    memo.insert(key, out.clone());
    Ok(out)
}

/// Normalize one constrained operator applied to an already-normalized child.
fn constrained(op: TempOp, k: Constraint, child: Formula) -> Result<Formula, MnfError> {
    let le = |c| Some(Constraint::new(CmpOp::Le, c));
    Ok(match k.op {
        CmpOp::Eq => return Err(MnfError::EqualityConstraint(k.c)),
        CmpOp::Lt => constrained(op, Constraint::new(CmpOp::Le, k.c - 1), child)?,
        CmpOp::Ge => constrained(op, Constraint::new(CmpOp::Gt, k.c - 1), child)?,
        CmpOp::Le => {
            if k.c <= 0 {
                if op.is_existential() {
                    Formula::falsum()
                } else {
                    Formula::Top
                }
            } else {
                Formula::temp(op, le(k.c), child)
            }
        }
        CmpOp::Gt => {
            if k.c <= 0 {
                Formula::temp(op, None, child)
            } else {
                match op {
                    TempOp::F => Formula::temp(
                        TempOp::G,
                        le(k.c),
                        Formula::temp(TempOp::F, None, child),
                    ),
                    TempOp::P => Formula::and(vec![
                        Formula::temp(TempOp::P, None, Formula::Top),
                        Formula::temp(
                            TempOp::H,
                            le(k.c),
                            Formula::temp(TempOp::P, None, child),
                        ),
                    ]),
                    TempOp::G => Formula::temp(
                        TempOp::F,
                        le(k.c),
                        Formula::temp(TempOp::G, None, child),
                    ),
                    TempOp::H => Formula::or(vec![
                        Formula::temp(TempOp::H, None, Formula::falsum()),
                        Formula::temp(
                            TempOp::P,
                            le(k.c),
                            Formula::temp(TempOp::H, None, child),
                        ),
                    ]),
                }
            }
        }
    })
}

/// Check the normal-form invariant: negations only on propositions,
/// variables and `T`; constraints only `{<= c}` with `c >= 1`; point-based
/// operators only.
pub fn is_mnf(phi: &Formula) -> bool {
    match phi {
        Formula::Top | Formula::Prop(_) | Formula::Var(_) => true,
        Formula::Not(c) => matches!(**c, Formula::Top | Formula::Prop(_) | Formula::Var(_)),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().all(is_mnf),
        Formula::Binder { child, .. } | Formula::Swap { child, .. } => is_mnf(child),
        Formula::ChlTemp {
            constraint, child, ..
        } => {
            constraint.is_none_or(|k| k.op == CmpOp::Le && k.c >= 1) && is_mnf(child)
        }
        Formula::HsMod { .. } => false,
    }
}

/// Structural dual of a normal-form formula: the normal form of its
/// negation. Involution on MNF trees.
pub fn dual(phi: &Formula) -> Formula {
    dual_rec(phi, &mut HashMap::new())
}

fn dual_rec(phi: &Formula, memo: &mut HashMap<usize, Formula>) -> Formula {
    let key = phi as *const Formula as usize;
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let out = match phi {
        Formula::Top => Formula::falsum(),
        Formula::Prop(_) | Formula::Var(_) => phi.clone().negate(),
        Formula::Not(c) => (**c).clone(),
        Formula::And(cs) => Formula::Or(cs.iter().map(|c| dual_rec(c, memo)).collect()),
        Formula::Or(cs) => Formula::And(cs.iter().map(|c| dual_rec(c, memo)).collect()),
        Formula::ChlTemp {
            op,
            constraint,
            child,
        } => Formula::temp(op.dual(), *constraint, dual_rec(child, memo)),
        Formula::Binder { var, child } => Formula::binder(var.clone(), dual_rec(child, memo)),
        Formula::Swap { var, child } => Formula::swap(var.clone(), dual_rec(child, memo)),
        Formula::HsMod { .. } => unreachable!("dual is only applied to normal-form formulas"),
    };
    memo.insert(key, out.clone());
    out
}
