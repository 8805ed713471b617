//! Formula-to-formula translations between the interval logics and the
//! point-based hybrid logics.
//!
//! Interval side:
//! * [`rewrite_unconstrained_alo`] removes every unconstrained modality other
//!   than prefix/suffix and their inverses;
//! * [`expand_constrained_d`] splits a constrained containment modality into
//!   prefix/suffix chains;
//! * [`to_core`] composes the two, bringing any simple-constrained formula
//!   into the B/E/B̄/Ē core;
//! * [`dab_to_chl1`] maps the monotonic A/B/B̄ fragment to one-variable
//!   binder formulas;
//! * [`dhs_simple_to_schl1`] maps the full simple fragment to one-variable
//!   swap formulas.
//!
//! Point side:
//! * [`chl1_to_schl1`] eliminates binders in favour of swaps;
//! * [`schl1_to_chl2`] eliminates swaps at the cost of a second variable;
//! * [`shl1_to_hs`] brings unconstrained swap formulas back to intervals.
//!
//! All translations preserve truth exactly — the evaluators in [`crate::eval`]
//! are the arbiter, and the test suite sweeps random formula/trace pairs
//! through both sides of every translation. Universal modalities are
//! normalized to negated existential ones on the fly, so the case analyses
//! below only mention the existential forms.

use crate::syntax::{CmpOp, Constraint, Formula, Relation, TempOp};
use std::collections::HashMap;
use std::sync::Arc;

/// Variable name used by translations out of the interval logics. Interval
/// formulas cannot mention position variables, so there is no capture risk.
const VAR: &str = "x";

/// Why a formula is outside the fragment a translation accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("expected an interval-logic formula, found point operators or position variables")]
    ExpectedInterval,
    #[error("expected a point-logic formula, found interval modalities")]
    ExpectedPoint,
    #[error("modality <{}> is outside the A/B/Bbar fragment accepted here", .0.token())]
    UnsupportedRelation(Relation),
    #[error(
        "a difference constraint on <{}> is not supported: constraints may only \
         decorate B, E, D and their inverses",
        .0.token()
    )]
    ConstraintNotSimple(Relation),
    #[error("equality constraints are not monotonic; this translation requires monotonic input")]
    NotMonotonic,
    #[error("expected at most one position variable, found {0}")]
    VariableCount(usize),
    #[error("`down` binders are not part of swap-based input")]
    UnexpectedBinder,
    #[error("constrained temporal operators are not allowed here; only plain F/P/G/H")]
    ConstrainedPoint,
    #[error("expected a <D> or <Dbar> modality")]
    NotDModality,
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// Where the stored position `x` sits relative to the current one while an
/// interval formula is being simulated by a point formula. The pair
/// (variable, current position) spans the interval under consideration:
/// `Before` means `x` is the left endpoint and the current position the
/// right one, `After` the opposite, `Here` a singleton with `x` equal to the
/// current position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Anchor {
    Before,
    Here,
    After,
}

/// `F`/`P` node that drops a vacuous `> 0` bound: both operators are strict,
/// so `F{>0}` is plain `F`. Translations route every constraint through this
/// helper so that unconstrained sources stay unconstrained targets.
fn temp_norm(op: TempOp, k: Option<Constraint>, child: Formula) -> Formula {
    let k = k.filter(|k| !(k.op == CmpOp::Gt && k.c == 0));
    Formula::temp(op, k, child)
}

/// `@x ∨ P @x`: the current position is at or after the stored one.
fn at_or_after_var() -> Formula {
    Formula::or(vec![
        Formula::var(VAR),
        Formula::temp(TempOp::P, None, Formula::var(VAR)),
    ])
}

/// `@x ∨ F @x`: the current position is at or before the stored one.
fn at_or_before_var() -> Formula {
    Formula::or(vec![
        Formula::var(VAR),
        Formula::temp(TempOp::F, None, Formula::var(VAR)),
    ])
}

/// Proposition letters are interval-homogeneous: `p` holds on an interval
/// iff it holds at every position inside. With the current position as the
/// right endpoint and `x` the left one, that reads "p here, and no position
/// strictly before me, at or after `x`, falsifies p".
fn homogeneous_back(p: &str) -> Formula {
    Formula::and(vec![
        Formula::prop(p),
        Formula::temp(
            TempOp::P,
            None,
            Formula::and(vec![Formula::prop(p).negate(), at_or_after_var()]),
        )
        .negate(),
    ])
}

/// Mirror image of [`homogeneous_back`]: current position is the left
/// endpoint, `x` the right one.
fn homogeneous_fwd(p: &str) -> Formula {
    Formula::and(vec![
        Formula::prop(p),
        Formula::temp(
            TempOp::F,
            None,
            Formula::and(vec![Formula::prop(p).negate(), at_or_before_var()]),
        )
        .negate(),
    ])
}

fn ensure_interval(phi: &Formula) -> Result<(), TranslateError> {
    let mut ok = true;
    phi.for_each_node(|n| {
        ok &= !matches!(
            n,
            Formula::ChlTemp { .. } | Formula::Binder { .. } | Formula::Swap { .. } | Formula::Var(_)
        );
    });
    if ok {
        Ok(())
    } else {
        Err(TranslateError::ExpectedInterval)
    }
}

fn ensure_point(phi: &Formula) -> Result<(), TranslateError> {
    let mut ok = true;
    phi.for_each_node(|n| ok &= !matches!(n, Formula::HsMod { .. }));
    if ok {
        Ok(())
    } else {
        Err(TranslateError::ExpectedPoint)
    }
}

fn ensure_at_most_one_var(phi: &Formula) -> Result<(), TranslateError> {
    let n = phi.var_names().len();
    if n > 1 {
        Err(TranslateError::VariableCount(n))
    } else {
        Ok(())
    }
}

fn has_binder(phi: &Formula) -> bool {
    let mut found = false;
    phi.for_each_node(|n| found |= matches!(n, Formula::Binder { .. }));
    found
}

// ---------------------------------------------------------------------------
// Interval-side rewrites
// ---------------------------------------------------------------------------

/// Rewrite every unconstrained modality other than B/E/B̄/Ē into those four.
/// Constrained prefix/suffix/containment modalities pass through untouched;
/// a constraint on any other relation is rejected.
pub fn rewrite_unconstrained_alo(phi: &Formula) -> Result<Formula, TranslateError> {
    ensure_interval(phi)?;
    let mut memo = HashMap::new();
    rewrite_alo(phi, &mut memo)
}

/// Rewrites per node address, so shared subtrees are processed once. Keys
/// point into the input tree, which outlives the pass; universal modalities
/// are normalized by negating the rewritten child rather than by recursing
/// into a `¬⟨X⟩¬ψ` temporary.
type NodeMemo = HashMap<usize, Formula>;

fn rewrite_alo(phi: &Formula, memo: &mut NodeMemo) -> Result<Formula, TranslateError> {
    use Relation::*;
    let key = phi as *const Formula as usize;
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let out = match phi {
        Formula::Top | Formula::Prop(_) => phi.clone(),
        Formula::Not(c) => rewrite_alo(c, memo)?.negate(),
        Formula::And(cs) => Formula::And(
            cs.iter()
                .map(|c| rewrite_alo(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(cs) => Formula::Or(
            cs.iter()
                .map(|c| rewrite_alo(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        Formula::HsMod {
            rel,
            universal,
            constraint,
            child,
        } => match (rel, constraint) {
            // The core relations keep any constraint; containment keeps its
            // constraint for `expand_constrained_d` to deal with later.
            (B | E | BBar | EBar, _) | (D | DBar, Some(_)) => Formula::HsMod {
                rel: *rel,
                universal: *universal,
                constraint: *constraint,
                child: Arc::new(rewrite_alo(child, memo)?),
            },
            (D | DBar | A | ABar | L | LBar | O | OBar, None) => {
                // [X]ψ = ¬⟨X⟩¬ψ; rewriting commutes with ¬, so the child is
                // rewritten first and the negations wrap the expansion.
                if *universal {
                    expand_unconstrained(*rel, rewrite_alo(child, memo)?.negate()).negate()
                } else {
                    expand_unconstrained(*rel, rewrite_alo(child, memo)?)
                }
            }
            (other, Some(_)) => return Err(TranslateError::ConstraintNotSimple(*other)),
        },
        Formula::ChlTemp { .. } | Formula::Binder { .. } | Formula::Swap { .. } | Formula::Var(_) => {
            return Err(TranslateError::ExpectedInterval)
        }
    };
    memo.insert(key, out.clone());
    Ok(out)
}

/// Expansion of one unconstrained non-core existential modality, applied to
/// an already-rewritten child. Never recurses into the child, so composing
/// expansions (as the later/earlier rules do) stays linear.
fn expand_unconstrained(rel: Relation, psi: Formula) -> Formula {
    use Relation::*;
    match rel {
        // Containment: shrink from the right, then from the left.
        D => Formula::hs(B, None, Formula::hs(E, None, psi)),
        DBar => Formula::hs(BBar, None, Formula::hs(EBar, None, psi)),
        // Meet: go to the length-1 suffix (or be it), then stay or extend
        // to the right.
        A => {
            let unit = Formula::hs_univ(E, None, Formula::falsum());
            let hop = Formula::and(vec![
                unit,
                Formula::or(vec![psi.clone(), Formula::hs(BBar, None, psi)]),
            ]);
            Formula::or(vec![hop.clone(), Formula::hs(E, None, hop)])
        }
        // Met-by: the mirror image via the length-1 prefix.
        ABar => {
            let unit = Formula::hs_univ(B, None, Formula::falsum());
            let hop = Formula::and(vec![
                unit,
                Formula::or(vec![psi.clone(), Formula::hs(EBar, None, psi)]),
            ]);
            Formula::or(vec![hop.clone(), Formula::hs(B, None, hop)])
        }
        // Later: two meet steps; the middle interval must have length ≥ 2 so
        // that the final left endpoint lands strictly past our right one.
        L => {
            let inner =
                Formula::and(vec![Formula::len(1).negate(), expand_unconstrained(A, psi)]);
            expand_unconstrained(A, inner)
        }
        LBar => {
            let inner =
                Formula::and(vec![Formula::len(1).negate(), expand_unconstrained(ABar, psi)]);
            expand_unconstrained(ABar, inner)
        }
        // Overlap: a proper suffix of length ≥ 2 (so its left endpoint is
        // strictly inside), extended strictly to the right.
        O => Formula::hs(
            E,
            None,
            Formula::and(vec![Formula::len(1).negate(), Formula::hs(BBar, None, psi)]),
        ),
        OBar => Formula::hs(
            B,
            None,
            Formula::and(vec![Formula::len(1).negate(), Formula::hs(EBar, None, psi)]),
        ),
        B | E | BBar | EBar => unreachable!("core modalities are never expanded"),
    }
}

/// Split one containment modality (constrained or not) into prefix/suffix
/// chains. A containment witness differs from the interval by independent
/// strict extensions (or shrinkings) on both sides, so a bound on the total
/// length difference becomes a disjunction over the ways to apportion it
/// between the two sides; the disjunction has at most `|c|+1` members.
pub fn expand_constrained_d(phi: &Formula) -> Result<Formula, TranslateError> {
    use Relation::{DBar, D};
    let Formula::HsMod {
        rel,
        universal,
        constraint,
        child,
    } = phi
    else {
        return Err(TranslateError::NotDModality);
    };
    if !matches!(rel, D | DBar) {
        return Err(TranslateError::NotDModality);
    }
    if *universal {
        let flipped = Formula::hs(*rel, *constraint, child.as_ref().clone().negate());
        return Ok(expand_constrained_d(&flipped)?.negate());
    }
    let psi = child.as_ref();
    Ok(match (rel, constraint) {
        (D, None) => Formula::hs(Relation::B, None, Formula::hs(Relation::E, None, psi.clone())),
        (DBar, None) => Formula::hs(
            Relation::BBar,
            None,
            Formula::hs(Relation::EBar, None, psi.clone()),
        ),
        (D, Some(k)) => split_d(*k, psi),
        (DBar, Some(k)) => split_dbar(*k, psi),
        _ => unreachable!(),
    })
}

/// `⟨B̄⟩_{k₁}⟨Ē⟩_{k₂}ψ`.
fn dbar_chain(k1: Constraint, k2: Constraint, psi: &Formula) -> Formula {
    Formula::hs(
        Relation::BBar,
        Some(k1),
        Formula::hs(Relation::EBar, Some(k2), psi.clone()),
    )
}

/// `⟨B⟩_{k₁}⟨E⟩_{k₂}ψ`.
fn d_chain(k1: Constraint, k2: Constraint, psi: &Formula) -> Formula {
    Formula::hs(
        Relation::B,
        Some(k1),
        Formula::hs(Relation::E, Some(k2), psi.clone()),
    )
}

/// Outward containment: the witness extends strictly on both sides, so the
/// two partial length differences are each ≥ 1 and sum to the total.
fn split_dbar(k: Constraint, psi: &Formula) -> Formula {
    use CmpOp::*;
    let kk = Constraint::new;
    match k.op {
        Ge => {
            let n = k.c.max(0);
            Formula::or(
                (0..=n)
                    .map(|n1| dbar_chain(kk(Ge, n1), kk(Ge, n - n1), psi))
                    .collect(),
            )
        }
        Gt => {
            let n = k.c.max(0);
            Formula::or(
                (0..=n)
                    .map(|n1| dbar_chain(kk(Ge, n1), kk(Gt, n - n1), psi))
                    .collect(),
            )
        }
        // The total difference is intrinsically ≥ 2, so tight upper bounds
        // collapse to falsity and the splits keep both sides ≥ 1.
        Le => Formula::or(
            (1..=k.c - 1)
                .map(|n1| dbar_chain(kk(Le, n1), kk(Le, k.c - n1), psi))
                .collect(),
        ),
        Lt => Formula::or(
            (1..=k.c - 2)
                .map(|n1| dbar_chain(kk(Le, n1), kk(Lt, k.c - n1), psi))
                .collect(),
        ),
        Eq => Formula::or(
            (1..=k.c - 1)
                .map(|n1| dbar_chain(kk(Eq, n1), kk(Eq, k.c - n1), psi))
                .collect(),
        ),
    }
}

/// Inward containment: the witness shrinks strictly on both sides, so the
/// two partial length differences are each ≤ −1 and sum to the total.
fn split_d(k: Constraint, psi: &Formula) -> Formula {
    use CmpOp::*;
    let kk = Constraint::new;
    match k.op {
        Le => {
            let n = k.c.min(-2);
            Formula::or(
                (n + 1..=-1)
                    .map(|c1| d_chain(kk(Le, c1), kk(Le, n - c1), psi))
                    .collect(),
            )
        }
        Lt => {
            if k.c >= 0 {
                // Always true alongside the intrinsic ≤ −2.
                Formula::hs(Relation::B, None, Formula::hs(Relation::E, None, psi.clone()))
            } else {
                Formula::or(
                    (k.c..=-1)
                        .map(|c1| d_chain(kk(Le, c1), kk(Lt, k.c - c1), psi))
                        .collect(),
                )
            }
        }
        Ge => Formula::or(
            (k.c + 1..=-1)
                .map(|c1| d_chain(kk(Ge, c1), kk(Ge, k.c - c1), psi))
                .collect(),
        ),
        Gt => Formula::or(
            (k.c + 2..=-1)
                .map(|c1| d_chain(kk(Ge, c1), kk(Gt, k.c - c1), psi))
                .collect(),
        ),
        Eq => Formula::or(
            (k.c + 1..=-1)
                .map(|c1| d_chain(kk(Eq, c1), kk(Eq, k.c - c1), psi))
                .collect(),
        ),
    }
}

/// Bring a simple-constrained interval formula into the B/E/B̄/Ē core:
/// rewrite the unconstrained exotic modalities, then split every remaining
/// containment node.
pub fn to_core(phi: &Formula) -> Result<Formula, TranslateError> {
    let alo = rewrite_unconstrained_alo(phi)?;
    let mut memo = HashMap::new();
    expand_d_rec(&alo, &mut memo)
}

fn expand_d_rec(phi: &Formula, memo: &mut NodeMemo) -> Result<Formula, TranslateError> {
    let key = phi as *const Formula as usize;
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let out = match phi {
        Formula::HsMod {
            rel,
            universal,
            constraint,
            child,
        } if matches!(rel, Relation::D | Relation::DBar) => {
            let rebuilt = Formula::HsMod {
                rel: *rel,
                universal: *universal,
                constraint: *constraint,
                child: Arc::new(expand_d_rec(child, memo)?),
            };
            expand_constrained_d(&rebuilt)?
        }
        Formula::HsMod {
            rel,
            universal,
            constraint,
            child,
        } => Formula::HsMod {
            rel: *rel,
            universal: *universal,
            constraint: *constraint,
            child: Arc::new(expand_d_rec(child, memo)?),
        },
        Formula::Not(c) => expand_d_rec(c, memo)?.negate(),
        Formula::And(cs) => Formula::And(
            cs.iter()
                .map(|c| expand_d_rec(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(cs) => Formula::Or(
            cs.iter()
                .map(|c| expand_d_rec(c, memo))
                .collect::<Result<_, _>>()?,
        ),
        leaf => leaf.clone(),
    };
    memo.insert(key, out.clone());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Interval → point translations
// ---------------------------------------------------------------------------

/// Translate a monotonic formula over meet/prefix/inverse-prefix into a
/// one-variable binder sentence. The stored position plays the interval's
/// left endpoint, the current position its right one; the result is the
/// translation of the body under a top-level binder anchoring both to the
/// start of the word.
pub fn dab_to_chl1(phi: &Formula) -> Result<Formula, TranslateError> {
    ensure_interval(phi)?;
    check_dab(phi)?;
    let mut memo = HashMap::new();
    Ok(Formula::binder(VAR, dab(phi, &mut memo)))
}

fn check_dab(phi: &Formula) -> Result<(), TranslateError> {
    let mut verdict = Ok(());
    phi.for_each_node(|n| {
        if let Formula::HsMod {
            rel, constraint, ..
        } = n
        {
            let here = match rel {
                Relation::A => {
                    if constraint.is_some() {
                        Err(TranslateError::ConstraintNotSimple(*rel))
                    } else {
                        Ok(())
                    }
                }
                Relation::B | Relation::BBar => match constraint {
                    Some(k) if k.op == CmpOp::Eq => Err(TranslateError::NotMonotonic),
                    _ => Ok(()),
                },
                other => Err(TranslateError::UnsupportedRelation(*other)),
            };
            if verdict.is_ok() {
                verdict = here;
            }
        }
    });
    verdict
}

fn dab(phi: &Formula, memo: &mut NodeMemo) -> Formula {
    let key = phi as *const Formula as usize;
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let out = match phi {
        Formula::Top => Formula::Top,
        Formula::Prop(p) => homogeneous_back(p),
        Formula::Not(c) => dab(c, memo).negate(),
        Formula::And(cs) => Formula::And(cs.iter().map(|c| dab(c, memo)).collect()),
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| dab(c, memo)).collect()),
        Formula::HsMod {
            rel,
            universal,
            constraint,
            child,
        } => {
            let direct = dab_modal(*rel, *constraint, child, *universal, memo);
            if *universal {
                direct.negate()
            } else {
                direct
            }
        }
        _ => unreachable!("rejected by check_dab / ensure_interval"),
    };
    memo.insert(key, out.clone());
    out
}

/// Existential-modality step of the binder translation; `negate_child`
/// plays the inner negation of `[X]ψ = ¬⟨X⟩¬ψ`.
fn dab_modal(
    rel: Relation,
    constraint: Option<Constraint>,
    psi: &Formula,
    negate_child: bool,
    memo: &mut NodeMemo,
) -> Formula {
    let t = {
        let t = dab(psi, memo);
        if negate_child {
            t.negate()
        } else {
            t
        }
    };
    match rel {
        Relation::A => {
            // Rebind the left endpoint to the current position, then stay or
            // move strictly right.
            Formula::binder(
                VAR,
                Formula::or(vec![t.clone(), Formula::temp(TempOp::F, None, t)]),
            )
        }
        Relation::B => {
            // A proper prefix moves the right endpoint strictly left but not
            // past the stored left endpoint; the length difference flips
            // sign when seen as a past step.
            let k = constraint.unwrap_or(Constraint::new(CmpOp::Lt, 0)).invert();
            temp_norm(TempOp::P, Some(k), Formula::and(vec![t, at_or_after_var()]))
        }
        Relation::BBar => {
            let k = constraint.unwrap_or(Constraint::new(CmpOp::Gt, 0));
            temp_norm(TempOp::F, Some(k), t)
        }
        _ => unreachable!("rejected by check_dab"),
    }
}

/// Translate any simple-constrained interval formula into a one-variable
/// swap sentence. The formula is first brought into the B/E/B̄/Ē core; the
/// core is then simulated with the stored position as one interval endpoint
/// and the current position as the other. On unconstrained input the result
/// uses only plain F/P (no constraints), and the construction is linear.
pub fn dhs_simple_to_schl1(phi: &Formula) -> Result<Formula, TranslateError> {
    let core = to_core(phi)?;
    let mut memo = HashMap::new();
    Ok(Formula::swap(
        VAR,
        core_to_point(&core, Anchor::Here, &mut memo),
    ))
}

/// Translation results per (node address, anchor). The rules reference the
/// same child at several anchors, so without memoization the construction
/// would re-walk (and re-build) shared subtrees once per reference. Keys are
/// addresses into the input tree, which outlives the pass; universal
/// modalities are handled without materializing `¬⟨X⟩¬ψ` so no temporary
/// node address ever enters the table.
type AnchorMemo = HashMap<(usize, Anchor), Formula>;

fn core_to_point(phi: &Formula, a: Anchor, memo: &mut AnchorMemo) -> Formula {
    let key = (phi as *const Formula as usize, a);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let out = match phi {
        Formula::Top => Formula::Top,
        Formula::Prop(p) => match a {
            Anchor::Before => homogeneous_back(p),
            Anchor::After => homogeneous_fwd(p),
            Anchor::Here => Formula::prop(p),
        },
        Formula::Not(c) => core_to_point(c, a, memo).negate(),
        Formula::And(cs) => {
            Formula::And(cs.iter().map(|c| core_to_point(c, a, memo)).collect())
        }
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| core_to_point(c, a, memo)).collect()),
        Formula::HsMod {
            rel,
            universal,
            constraint,
            child,
        } => {
            let direct = core_modal_to_point(*rel, *constraint, child, *universal, a, memo);
            if *universal {
                direct.negate()
            } else {
                direct
            }
        }
        _ => unreachable!("interval input was checked"),
    };
    memo.insert(key, out.clone());
    out
}

/// Existential-modality gadget at anchor `a`. With `negate_child` set this
/// builds the gadget for `⟨X⟩_k ¬ψ`, which plays the inner negation of
/// `[X]_k ψ = ¬⟨X⟩_k ¬ψ` (the translation is homomorphic in ¬, so the
/// child's translation is negated instead of the child itself).
fn core_modal_to_point(
    rel: Relation,
    constraint: Option<Constraint>,
    psi: &Formula,
    negate_child: bool,
    a: Anchor,
    memo: &mut AnchorMemo,
) -> Formula {
    use Anchor::*;
    let sigma = |anchor: Anchor, memo: &mut AnchorMemo| {
        let t = core_to_point(psi, anchor, memo);
        if negate_child {
            t.negate()
        } else {
            t
        }
    };
    match rel {
        Relation::B => {
            // Singletons have no proper prefixes.
            if a == Here {
                return Formula::falsum();
            }
            let k = constraint.unwrap_or(Constraint::new(CmpOp::Lt, 0)).invert();
            // Move the right endpoint strictly left: either it lands on the
            // stored left endpoint (singleton) or stays strictly right of it.
            let at_left = sigma(Here, memo);
            let inside = sigma(Before, memo);
            let body = temp_norm(
                TempOp::P,
                Some(k),
                Formula::or(vec![
                    Formula::and(vec![at_left, Formula::var(VAR)]),
                    Formula::and(vec![
                        inside,
                        Formula::temp(TempOp::P, None, Formula::var(VAR)),
                    ]),
                ]),
            );
            // Seen from the right endpoint the step is direct; seen from the
            // left endpoint, swap there first.
            match a {
                Before => body,
                After => Formula::swap(VAR, body),
                Here => unreachable!(),
            }
        }
        Relation::BBar => {
            let k = constraint.unwrap_or(Constraint::new(CmpOp::Gt, 0));
            let body = temp_norm(TempOp::F, Some(k), sigma(Before, memo));
            match a {
                Before | Here => body,
                After => Formula::swap(VAR, body),
            }
        }
        Relation::E => {
            if a == Here {
                return Formula::falsum();
            }
            let k = constraint.unwrap_or(Constraint::new(CmpOp::Lt, 0)).invert();
            // Move the left endpoint strictly right, up to the right endpoint.
            let at_right = sigma(Here, memo);
            let inside = sigma(After, memo);
            let body = temp_norm(
                TempOp::F,
                Some(k),
                Formula::or(vec![
                    Formula::and(vec![at_right, Formula::var(VAR)]),
                    Formula::and(vec![
                        inside,
                        Formula::temp(TempOp::F, None, Formula::var(VAR)),
                    ]),
                ]),
            );
            match a {
                After => body,
                Before => Formula::swap(VAR, body),
                Here => unreachable!(),
            }
        }
        Relation::EBar => {
            let k = constraint.unwrap_or(Constraint::new(CmpOp::Gt, 0));
            let body = temp_norm(TempOp::P, Some(k), sigma(After, memo));
            match a {
                After | Here => body,
                Before => Formula::swap(VAR, body),
            }
        }
        other => unreachable!("to_core leaves no <{}> nodes", other.token()),
    }
}

// ---------------------------------------------------------------------------
// Point-side translations
// ---------------------------------------------------------------------------

/// Replace every binder by a swap. `down x` stores the current position and
/// stays put; `swap x` jumps but still stores the current position, so a
/// round trip through any other position and back (`F` then `P`, landing on
/// the stored target) restores the binder's behaviour.
pub fn chl1_to_schl1(phi: &Formula) -> Result<Formula, TranslateError> {
    ensure_point(phi)?;
    ensure_at_most_one_var(phi)?;
    let mut memo = HashMap::new();
    Ok(debind(phi, &mut memo))
}

fn debind(phi: &Formula, memo: &mut NodeMemo) -> Formula {
    let key = phi as *const Formula as usize;
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let out = match phi {
        Formula::Binder { var, child } => Formula::swap(
            var.clone(),
            Formula::temp(
                TempOp::F,
                None,
                Formula::temp(
                    TempOp::P,
                    None,
                    Formula::and(vec![Formula::var(var.clone()), debind(child, memo)]),
                ),
            ),
        ),
        Formula::Top | Formula::Prop(_) | Formula::Var(_) => phi.clone(),
        Formula::Not(c) => debind(c, memo).negate(),
        Formula::And(cs) => Formula::And(cs.iter().map(|c| debind(c, memo)).collect()),
        Formula::Or(cs) => Formula::Or(cs.iter().map(|c| debind(c, memo)).collect()),
        Formula::ChlTemp {
            op,
            constraint,
            child,
        } => Formula::temp(*op, *constraint, debind(child, memo)),
        Formula::Swap { var, child } => Formula::swap(var.clone(), debind(child, memo)),
        Formula::HsMod { .. } => unreachable!("point input was checked"),
    };
    memo.insert(key, out.clone());
    out
}

/// Replace every swap by binders over two alternating variables. One
/// variable always holds the swap logic's stored position; simulating a swap
/// binds the *other* variable to the current position, travels to the stored
/// one, and continues with the roles exchanged.
pub fn schl1_to_chl2(phi: &Formula) -> Result<Formula, TranslateError> {
    ensure_point(phi)?;
    ensure_at_most_one_var(phi)?;
    if has_binder(phi) {
        return Err(TranslateError::UnexpectedBinder);
    }
    let base = phi
        .var_names()
        .first()
        .cloned()
        .unwrap_or_else(|| VAR.to_string());
    let names = [format!("{base}1"), format!("{base}2")];
    let mut memo = HashMap::new();
    let body = two_var(phi, 0, &names, &mut memo);
    Ok(Formula::binder(names[0].clone(), body))
}

fn two_var(
    phi: &Formula,
    active: usize,
    names: &[String; 2],
    memo: &mut HashMap<(usize, usize), Formula>,
) -> Formula {
    let key = (phi as *const Formula as usize, active);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let out = match phi {
        Formula::Var(_) => Formula::var(names[active].clone()),
        Formula::Swap { child, .. } => Formula::binder(
            names[1 - active].clone(),
            Formula::temp(
                TempOp::F,
                None,
                Formula::temp(
                    TempOp::P,
                    None,
                    Formula::and(vec![
                        Formula::var(names[active].clone()),
                        two_var(child, 1 - active, names, memo),
                    ]),
                ),
            ),
        ),
        Formula::Top | Formula::Prop(_) => phi.clone(),
        Formula::Not(c) => two_var(c, active, names, memo).negate(),
        Formula::And(cs) => Formula::And(
            cs.iter()
                .map(|c| two_var(c, active, names, memo))
                .collect(),
        ),
        Formula::Or(cs) => Formula::Or(
            cs.iter()
                .map(|c| two_var(c, active, names, memo))
                .collect(),
        ),
        Formula::ChlTemp {
            op,
            constraint,
            child,
        } => Formula::temp(*op, *constraint, two_var(child, active, names, memo)),
        Formula::Binder { .. } | Formula::HsMod { .. } => unreachable!("input was checked"),
    };
    memo.insert(key, out.clone());
    out
}

/// Translate an unconstrained one-variable swap formula back into interval
/// logic. The (stored position, current position) pair spans an interval;
/// singleton subformulas anchor the simulation at `[i, i]`.
pub fn shl1_to_hs(phi: &Formula) -> Result<Formula, TranslateError> {
    ensure_point(phi)?;
    ensure_at_most_one_var(phi)?;
    check_shl1(phi)?;
    let mut memo = HashMap::new();
    Ok(point_to_interval(phi, Anchor::Here, &mut memo))
}

fn check_shl1(phi: &Formula) -> Result<(), TranslateError> {
    let mut verdict = Ok(());
    phi.for_each_node(|n| {
        let here = match n {
            Formula::Binder { .. } => Err(TranslateError::UnexpectedBinder),
            Formula::ChlTemp {
                constraint: Some(_),
                ..
            } => Err(TranslateError::ConstrainedPoint),
            _ => Ok(()),
        };
        if verdict.is_ok() {
            verdict = here;
        }
    });
    verdict
}

fn point_to_interval(phi: &Formula, a: Anchor, memo: &mut AnchorMemo) -> Formula {
    use Anchor::*;
    let key = (phi as *const Formula as usize, a);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let out = match phi {
        Formula::Top => Formula::Top,
        // `@x` asks whether the two endpoints coincide.
        Formula::Var(_) => match a {
            Here => Formula::Top,
            Before | After => Formula::falsum(),
        },
        // A proposition is evaluated at the current position: project the
        // length-1 subinterval at the right endpoint (`Before`) or the left
        // one (`After`).
        Formula::Prop(p) => match a {
            Here => Formula::prop(p),
            Before => Formula::hs(
                Relation::E,
                None,
                Formula::and(vec![Formula::len(1), Formula::prop(p)]),
            ),
            After => Formula::hs(
                Relation::B,
                None,
                Formula::and(vec![Formula::len(1), Formula::prop(p)]),
            ),
        },
        Formula::Not(c) => point_to_interval(c, a, memo).negate(),
        Formula::And(cs) => {
            Formula::And(cs.iter().map(|c| point_to_interval(c, a, memo)).collect())
        }
        Formula::Or(cs) => {
            Formula::Or(cs.iter().map(|c| point_to_interval(c, a, memo)).collect())
        }
        Formula::Swap { child, .. } => match a {
            Before => point_to_interval(child, After, memo),
            After => point_to_interval(child, Before, memo),
            Here => point_to_interval(child, Here, memo),
        },
        // G/H are ¬F¬/¬P¬; the gadget is built for the dual with the child's
        // translation negated (the translation is homomorphic in ¬).
        Formula::ChlTemp { op, child, .. } => {
            let (gadget_op, negate) = match op {
                TempOp::F | TempOp::P => (*op, false),
                TempOp::G | TempOp::H => (op.dual(), true),
            };
            let direct = point_temp_to_interval(gadget_op, child, negate, a, memo);
            if negate {
                direct.negate()
            } else {
                direct
            }
        }
        Formula::Binder { .. } | Formula::HsMod { .. } => unreachable!("input was checked"),
    };
    memo.insert(key, out.clone());
    out
}

/// Gadget for the existential step operators. With `negate_child` set this
/// builds the gadget for `F ¬ψ` / `P ¬ψ`, playing the inner negation of the
/// `G ψ = ¬F ¬ψ` / `H ψ = ¬P ¬ψ` normalization.
fn point_temp_to_interval(
    op: TempOp,
    psi: &Formula,
    negate_child: bool,
    a: Anchor,
    memo: &mut AnchorMemo,
) -> Formula {
    use Anchor::*;
    let sigma = |anchor: Anchor, memo: &mut AnchorMemo| {
        let t = point_to_interval(psi, anchor, memo);
        if negate_child {
            t.negate()
        } else {
            t
        }
    };
    match op {
        TempOp::F => match a {
            // Current position is the right endpoint (or the singleton):
            // moving it right extends the interval.
            Before | Here => Formula::hs(Relation::BBar, None, sigma(Before, memo)),
            // Current position is the left endpoint: moving it right shrinks
            // the interval, collapses it, or jumps past the stored endpoint.
            After => {
                let past_stored = sigma(Before, memo);
                let collapsed = sigma(Here, memo);
                let still_left = sigma(After, memo);
                Formula::or(vec![
                    Formula::hs(
                        Relation::E,
                        None,
                        Formula::and(vec![Formula::len(1).negate(), still_left]),
                    ),
                    Formula::hs(
                        Relation::E,
                        None,
                        Formula::and(vec![Formula::len(1), collapsed]),
                    ),
                    Formula::hs(
                        Relation::A,
                        None,
                        Formula::and(vec![Formula::len(1).negate(), past_stored]),
                    ),
                ])
            }
        },
        TempOp::P => match a {
            After | Here => Formula::hs(Relation::EBar, None, sigma(After, memo)),
            Before => {
                let past_stored = sigma(After, memo);
                let collapsed = sigma(Here, memo);
                let still_right = sigma(Before, memo);
                Formula::or(vec![
                    Formula::hs(
                        Relation::B,
                        None,
                        Formula::and(vec![Formula::len(1).negate(), still_right]),
                    ),
                    Formula::hs(
                        Relation::B,
                        None,
                        Formula::and(vec![Formula::len(1), collapsed]),
                    ),
                    Formula::hs(
                        Relation::ABar,
                        None,
                        Formula::and(vec![Formula::len(1).negate(), past_stored]),
                    ),
                ])
            }
        },
        TempOp::G | TempOp::H => unreachable!("normalized to F/P above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{check_trace_satisfies, check_trace_satisfies_point};
    use crate::syntax::{classify, parse, Family};
    use crate::trace::LassoTrace;

    fn f(text: &str) -> Formula {
        parse(text).expect(text)
    }

    fn w(text: &str) -> LassoTrace {
        text.parse().expect(text)
    }

    /// Both sides of a translation must agree on `w`.
    fn agree_interval_point(phi: &Formula, psi: &Formula, trace: &LassoTrace) {
        let lhs = check_trace_satisfies(trace, phi)
            .unwrap_or_else(|e| panic!("interval oracle failed on {phi} / {trace}: {e}"));
        let rhs = check_trace_satisfies_point(trace, psi)
            .unwrap_or_else(|e| panic!("point oracle failed on {psi} / {trace}: {e}"));
        assert_eq!(lhs, rhs, "{phi}  vs  {psi}  on  {trace}");
    }

    #[test]
    fn prop_translation_states_backward_homogeneity() {
        let got = dab_to_chl1(&f("p")).unwrap();
        assert_eq!(got, f("down x . p & ~P (~p & (@x | P @x))"));
    }

    #[test]
    fn meet_translation_rebinds_and_moves_right() {
        let got = dab_to_chl1(&f("<A> T")).unwrap();
        assert_eq!(got, f("down x . down x . T | F T"));
    }

    #[test]
    fn prefix_constraint_is_inverted() {
        let got = dab_to_chl1(&f("<B{<=-2}> T")).unwrap();
        assert_eq!(got, f("down x . P{>=2} (T & (@x | P @x))"));
    }

    #[test]
    fn unconstrained_prefix_keeps_plain_past() {
        let got = dab_to_chl1(&f("<B> T")).unwrap();
        assert_eq!(got, f("down x . P (T & (@x | P @x))"));
    }

    #[test]
    fn dab_rejects_out_of_fragment_inputs() {
        assert_eq!(
            dab_to_chl1(&f("<E> p")),
            Err(TranslateError::UnsupportedRelation(Relation::E))
        );
        assert_eq!(
            dab_to_chl1(&f("<L> p")),
            Err(TranslateError::UnsupportedRelation(Relation::L))
        );
        assert_eq!(
            dab_to_chl1(&f("<B{=0}> p")),
            Err(TranslateError::NotMonotonic)
        );
        assert_eq!(
            dab_to_chl1(&f("<A{>=1}> p")),
            Err(TranslateError::ConstraintNotSimple(Relation::A))
        );
        assert_eq!(dab_to_chl1(&f("F p")), Err(TranslateError::ExpectedInterval));
    }

    #[test]
    fn dab_agrees_with_interval_oracle() {
        let traces = [
            w("u: ; v: {p}"),
            w("u: {p} {p} ; v: {}"),
            w("u: {} {p} ; v: {p} {}"),
            w("u: {p} ; v: {p} {p} {}"),
        ];
        let formulas = [
            f("p"),
            f("<A> p"),
            f("<B{<=-2}> T"),
            f("[Bbar{<=3}] p"),
            f("<A> <A> p"),
            f("<A> ~p & ~<B> T"),
            f("[A] (p | <Bbar> p)"),
        ];
        for phi in &formulas {
            let psi = dab_to_chl1(phi).unwrap();
            for t in &traces {
                agree_interval_point(phi, &psi, t);
            }
        }
    }

    #[test]
    fn outward_containment_splits_follow_the_budget() {
        let got = expand_constrained_d(&f("<Dbar{>=1}> p")).unwrap();
        assert_eq!(
            got,
            f("<Bbar{>=0}> <Ebar{>=1}> p | <Bbar{>=1}> <Ebar{>=0}> p")
        );
        let got = expand_constrained_d(&f("<Dbar{>=0}> p")).unwrap();
        assert_eq!(got, f("<Bbar{>=0}> <Ebar{>=0}> p"));
    }

    #[test]
    fn unconstrained_containment_is_a_two_step_chain() {
        let got = expand_constrained_d(&f("<D> p")).unwrap();
        assert_eq!(got, f("<B> <E> p"));
        let got = expand_constrained_d(&f("<Dbar> p")).unwrap();
        assert_eq!(got, f("<Bbar> <Ebar> p"));
    }

    #[test]
    fn impossible_containment_bounds_collapse_to_falsum() {
        // An outward witness is at least 2 longer; an inward one at least
        // 2 shorter.
        assert_eq!(expand_constrained_d(&f("<Dbar{<=1}> p")).unwrap(), f("~T"));
        assert_eq!(expand_constrained_d(&f("<Dbar{=1}> p")).unwrap(), f("~T"));
        assert_eq!(expand_constrained_d(&f("<D{>=-1}> p")).unwrap(), f("~T"));
        assert_eq!(expand_constrained_d(&f("<D{=0}> p")).unwrap(), f("~T"));
    }

    #[test]
    fn expand_rejects_other_modalities() {
        assert_eq!(
            expand_constrained_d(&f("<B> p")),
            Err(TranslateError::NotDModality)
        );
        assert_eq!(expand_constrained_d(&f("p")), Err(TranslateError::NotDModality));
    }

    #[test]
    fn meets_expansion_matches_the_two_hop_shape() {
        let got = rewrite_unconstrained_alo(&f("<A> p")).unwrap();
        assert_eq!(
            got,
            f("([E] ~T & (p | <Bbar> p)) | <E> ([E] ~T & (p | <Bbar> p))")
        );
    }

    #[test]
    fn overlap_expansion_uses_an_interior_suffix() {
        let got = rewrite_unconstrained_alo(&f("<O> p")).unwrap();
        assert_eq!(got, f("<E> (~([B] ~T) & <Bbar> p)"));
        let got = rewrite_unconstrained_alo(&f("<Obar> p")).unwrap();
        assert_eq!(got, f("<B> (~([B] ~T) & <Ebar> p)"));
    }

    #[test]
    fn universal_exotic_modalities_dualize() {
        let got = rewrite_unconstrained_alo(&f("[D] p")).unwrap();
        assert_eq!(got, f("~<B> <E> ~p"));
    }

    #[test]
    fn alo_rejects_constraints_on_exotic_modalities() {
        assert_eq!(
            rewrite_unconstrained_alo(&f("<A{>=0}> p")),
            Err(TranslateError::ConstraintNotSimple(Relation::A))
        );
        assert_eq!(
            rewrite_unconstrained_alo(&f("<L{<1}> p")),
            Err(TranslateError::ConstraintNotSimple(Relation::L))
        );
    }

    #[test]
    fn core_keeps_constrained_simple_modalities() {
        let phi = f("<B{<=-1}> <D{<=-3}> p & [Ebar{>2}] q");
        let core = to_core(&phi).unwrap();
        // The containment split is the only change.
        assert_eq!(
            core,
            f("<B{<=-1}> (<B{<=-2}> <E{<=-1}> p | <B{<=-1}> <E{<=-2}> p) & [Ebar{>2}] q")
        );
    }

    #[test]
    fn singleton_has_no_proper_prefix_or_suffix() {
        let got = dhs_simple_to_schl1(&f("<B{<=-1}> p")).unwrap();
        assert_eq!(got, f("swap x . ~T"));
        let got = dhs_simple_to_schl1(&f("<E{<-2}> p")).unwrap();
        assert_eq!(got, f("swap x . ~T"));
    }

    #[test]
    fn right_extension_from_singleton_walks_forward() {
        let got = dhs_simple_to_schl1(&f("<Bbar{>=1}> p")).unwrap();
        assert_eq!(
            got,
            f("swap x . F{>=1} (p & ~P (~p & (@x | P @x)))")
        );
    }

    #[test]
    fn left_extension_from_singleton_walks_backward() {
        let got = dhs_simple_to_schl1(&f("<Ebar{>=2}> p")).unwrap();
        assert_eq!(
            got,
            f("swap x . P{>=2} (p & ~F (~p & (@x | F @x)))")
        );
    }

    #[test]
    fn unconstrained_input_yields_unconstrained_swap_output() {
        for src in ["<A> p", "<E> (p & <Bbar> q)", "[D] p", "<L> q", "<O> p"] {
            let out = dhs_simple_to_schl1(&f(src)).unwrap();
            let d = classify(&out).unwrap();
            assert_eq!(d.family, Family::Schl, "{src} -> {out}");
            assert!(
                d.constrained_relations.is_empty(),
                "{src} translated with constraints: {out}"
            );
            assert!(no_constrained_temp(&out), "{src} -> {out}");
        }
    }

    fn no_constrained_temp(phi: &Formula) -> bool {
        if let Formula::ChlTemp {
            constraint: Some(_),
            ..
        } = phi
        {
            return false;
        }
        phi.children().into_iter().all(no_constrained_temp)
    }

    #[test]
    fn simple_translation_agrees_with_interval_oracle() {
        let traces = [
            w("u: ; v: {p}"),
            w("u: {p} {q} ; v: {}"),
            w("u: {} ; v: {p,q} {p}"),
            w("u: {p} {p} ; v: {q} {} {p}"),
        ];
        let formulas = [
            f("<Bbar{>=2}> p"),
            f("<Ebar> q"),
            f("<A> (p & <E> q)"),
            f("<D{<=-2}> p"),
            f("<Dbar{>=1}> q"),
            f("[Bbar{<=4}] (p | q)"),
            f("<L> q"),
            f("<O> p"),
        ];
        for phi in &formulas {
            let psi = dhs_simple_to_schl1(phi).unwrap();
            for t in &traces {
                agree_interval_point(phi, &psi, t);
            }
        }
    }

    #[test]
    fn binder_becomes_a_swapped_round_trip() {
        let got = chl1_to_schl1(&f("down x . @x")).unwrap();
        assert_eq!(got, f("swap x . F P (@x & @x)"));
        let got = chl1_to_schl1(&f("down x . F @x")).unwrap();
        assert_eq!(got, f("swap x . F P (@x & F @x)"));
    }

    #[test]
    fn debinding_is_homomorphic_elsewhere() {
        let got = chl1_to_schl1(&f("F{<=3} (p & down x . P @x)")).unwrap();
        assert_eq!(got, f("F{<=3} (p & swap x . F P (@x & P @x))"));
    }

    #[test]
    fn debinding_rejects_two_variables() {
        assert_eq!(
            chl1_to_schl1(&f("down x . down y . (@x & @y)")),
            Err(TranslateError::VariableCount(2))
        );
    }

    #[test]
    fn swap_becomes_alternating_binders() {
        let got = schl1_to_chl2(&f("swap x . @x")).unwrap();
        assert_eq!(got, f("down x1 . down x2 . F P (@x1 & @x2)"));
    }

    #[test]
    fn deswapping_rejects_binders() {
        assert_eq!(
            schl1_to_chl2(&f("down x . @x")),
            Err(TranslateError::UnexpectedBinder)
        );
    }

    #[test]
    fn future_at_singleton_extends_right() {
        let got = shl1_to_hs(&f("F p")).unwrap();
        assert_eq!(got, f("<Bbar> <E> ([B] ~T & p)"));
        let got = shl1_to_hs(&f("F @x")).unwrap();
        assert_eq!(got, f("<Bbar> ~T"));
    }

    #[test]
    fn swap_from_singleton_is_identity() {
        let got = shl1_to_hs(&f("swap x . p")).unwrap();
        assert_eq!(got, f("p"));
    }

    #[test]
    fn shl1_rejects_constraints_and_binders() {
        assert_eq!(
            shl1_to_hs(&f("F{<=2} p")),
            Err(TranslateError::ConstrainedPoint)
        );
        assert_eq!(
            shl1_to_hs(&f("down x . @x")),
            Err(TranslateError::UnexpectedBinder)
        );
        assert_eq!(shl1_to_hs(&f("<B> p")), Err(TranslateError::ExpectedPoint));
    }

    #[test]
    fn point_translations_agree_with_point_oracle() {
        let traces = [
            w("u: ; v: {p}"),
            w("u: {p} ; v: {} {p}"),
            w("u: {} {p} ; v: {p} {}"),
        ];
        let sentences = [
            f("down x . F (p & P @x)"),
            f("down x . G (~@x | F p)"),
            f("F down x . P{<=2} p"),
        ];
        for phi in &sentences {
            let via_swap = chl1_to_schl1(phi).unwrap();
            let via_two = schl1_to_chl2(&via_swap).unwrap();
            for t in &traces {
                let a = check_trace_satisfies_point(t, phi).expect("source");
                let b = check_trace_satisfies_point(t, &via_swap).expect("swap form");
                let c = check_trace_satisfies_point(t, &via_two).expect("two-variable form");
                assert_eq!(a, b, "{phi} vs {via_swap} on {t}");
                assert_eq!(a, c, "{phi} vs {via_two} on {t}");
            }
        }
    }

    fn interval_only(phi: &Formula) -> bool {
        !matches!(
            phi,
            Formula::ChlTemp { .. } | Formula::Binder { .. } | Formula::Swap { .. } | Formula::Var(_)
        ) && phi.children().into_iter().all(interval_only)
    }

    #[test]
    fn interval_round_trip_preserves_oracle_verdicts() {
        let traces = [w("u: ; v: {p}"), w("u: {p} {} ; v: {p} {q}")];
        for src in ["<A> p", "<E> q", "[B] p", "<L> (p | q)"] {
            let phi = f(src);
            let swapped = dhs_simple_to_schl1(&phi).unwrap();
            let back = shl1_to_hs(&swapped).unwrap();
            assert!(interval_only(&back), "{src} -> {back}");
            for t in &traces {
                let a = check_trace_satisfies(t, &phi).expect("source");
                let b = check_trace_satisfies(t, &back).expect("round trip");
                assert_eq!(a, b, "{src} round-tripped to {back} on {t}");
            }
        }
    }
}
