//! Shared helpers for the randomized integration sweeps: a seeded RNG,
//! generators for lasso traces and for formulas of the various fragments, and
//! oracle wrappers that retry with doubled horizons when the evaluator
//! reports instability.

#![allow(dead_code)]

use hsmc::eval::{self, EvalError, Valuation};
use hsmc::syntax::{CmpOp, Constraint, Formula, Relation, TempOp};
use hsmc::trace::{Interval, LassoTrace, Letter};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const PROPS: &[&str] = &["p", "q"];

/// Random lasso with `|u| ≤ max_u` and `1 ≤ |v| ≤ max_v` over [`PROPS`].
pub fn gen_lasso(r: &mut ChaCha8Rng, max_u: usize, max_v: usize) -> LassoTrace {
    fn letter(r: &mut ChaCha8Rng) -> Letter {
        PROPS
            .iter()
            .filter(|_| r.gen_bool(0.5))
            .map(|p| p.to_string())
            .collect()
    }
    let nu = r.gen_range(0..=max_u);
    let nv = r.gen_range(1..=max_v);
    LassoTrace::new(
        (0..nu).map(|_| letter(r)).collect(),
        (0..nv).map(|_| letter(r)).collect(),
    )
}

/// Random interval with both endpoints below `|u| + 2|v|` (well inside any
/// default evaluation horizon).
pub fn gen_interval(r: &mut ChaCha8Rng, w: &LassoTrace) -> Interval {
    let bound = w.prefix.len() + 2 * w.cycle.len();
    let lo = r.gen_range(0..bound);
    let hi = r.gen_range(lo..bound);
    Interval::new(lo, hi)
}

pub fn gen_constraint(r: &mut ChaCha8Rng, max_c: i64, allow_eq: bool) -> Constraint {
    let ops: &[CmpOp] = if allow_eq {
        &[CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt]
    } else {
        &[CmpOp::Lt, CmpOp::Le, CmpOp::Ge, CmpOp::Gt]
    };
    Constraint::new(ops[r.gen_range(0..ops.len())], r.gen_range(-max_c..=max_c))
}

pub const ALL_RELS: &[Relation] = &[
    Relation::A,
    Relation::ABar,
    Relation::L,
    Relation::LBar,
    Relation::B,
    Relation::BBar,
    Relation::E,
    Relation::EBar,
    Relation::D,
    Relation::DBar,
    Relation::O,
    Relation::OBar,
];

/// The relations whose length constraints the decision pipeline supports.
pub const SIMPLE_RELS: &[Relation] = &[
    Relation::B,
    Relation::BBar,
    Relation::E,
    Relation::EBar,
    Relation::D,
    Relation::DBar,
];

/// The constraint-friendly core the interval translations reduce to.
pub const CORE_RELS: &[Relation] = &[
    Relation::B,
    Relation::BBar,
    Relation::E,
    Relation::EBar,
];

/// Shape of a random interval-logic formula.
#[derive(Clone, Copy)]
pub struct IntervalGen {
    /// Modalities that may appear.
    pub rels: &'static [Relation],
    /// Subset that may carry a length-difference constraint.
    pub constrained: &'static [Relation],
    pub max_c: i64,
    pub allow_eq: bool,
}

impl IntervalGen {
    /// Anything with constraints on prefix/suffix/subinterval relations.
    pub fn simple(max_c: i64) -> Self {
        IntervalGen {
            rels: ALL_RELS,
            constrained: SIMPLE_RELS,
            max_c,
            allow_eq: true,
        }
    }

    /// Like [`IntervalGen::simple`] but constraints only on the four-relation
    /// core, keeping translated formulas small.
    pub fn simple_core_constraints(max_c: i64) -> Self {
        IntervalGen {
            constrained: CORE_RELS,
            ..IntervalGen::simple(max_c)
        }
    }

    /// Constraint-free formulas over all twelve relations.
    pub fn unconstrained() -> Self {
        IntervalGen {
            rels: ALL_RELS,
            constrained: &[],
            max_c: 0,
            allow_eq: false,
        }
    }

    /// Monotonic formulas over meet/prefix/inverse-prefix.
    pub fn meet_prefix(max_c: i64) -> Self {
        IntervalGen {
            rels: &[Relation::A, Relation::B, Relation::BBar],
            constrained: &[Relation::B, Relation::BBar],
            max_c,
            allow_eq: false,
        }
    }
}

pub fn gen_interval_formula(r: &mut ChaCha8Rng, depth: usize, g: &IntervalGen) -> Formula {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..4) {
            0 => Formula::prop("p"),
            1 => Formula::prop("q"),
            2 => Formula::top(),
            _ => Formula::falsum(),
        };
    }
    match r.gen_range(0..6) {
        0 => gen_interval_formula(r, depth - 1, g).negate(),
        1 => Formula::and(vec![
            gen_interval_formula(r, depth - 1, g),
            gen_interval_formula(r, depth - 1, g),
        ]),
        2 => Formula::or(vec![
            gen_interval_formula(r, depth - 1, g),
            gen_interval_formula(r, depth - 1, g),
        ]),
        _ => {
            let rel = g.rels[r.gen_range(0..g.rels.len())];
            let k = if g.constrained.contains(&rel) && r.gen_bool(0.6) {
                Some(gen_constraint(r, g.max_c, g.allow_eq))
            } else {
                None
            };
            let child = gen_interval_formula(r, depth - 1, g);
            if r.gen_bool(0.3) {
                Formula::hs_univ(rel, k, child)
            } else {
                Formula::hs(rel, k, child)
            }
        }
    }
}

/// Shape of a random one-variable point-logic formula.
#[derive(Clone, Copy)]
pub struct PointGen {
    /// Rebinding (`swap`) style instead of plain `down` binders.
    pub swap: bool,
    /// Whether F/P may carry distance constraints.
    pub constrained: bool,
    pub max_c: i64,
    /// Whether equality constraints may appear (false keeps formulas monotonic).
    pub allow_eq: bool,
}

/// Random point formula over the single variable `x`, wrapped in a top-level
/// binder of the configured style so the result is a sentence.
pub fn gen_point_sentence(r: &mut ChaCha8Rng, depth: usize, g: &PointGen) -> Formula {
    let body = gen_point_formula(r, depth, g);
    if g.swap {
        Formula::swap("x", body)
    } else {
        Formula::binder("x", body)
    }
}

pub fn gen_point_formula(r: &mut ChaCha8Rng, depth: usize, g: &PointGen) -> Formula {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..4) {
            0 => Formula::prop("p"),
            1 => Formula::prop("q"),
            2 => Formula::top(),
            _ => Formula::var("x"),
        };
    }
    match r.gen_range(0..7) {
        0 => gen_point_formula(r, depth - 1, g).negate(),
        1 => Formula::and(vec![
            gen_point_formula(r, depth - 1, g),
            gen_point_formula(r, depth - 1, g),
        ]),
        2 => Formula::or(vec![
            gen_point_formula(r, depth - 1, g),
            gen_point_formula(r, depth - 1, g),
        ]),
        3 => {
            let child = gen_point_formula(r, depth - 1, g);
            if g.swap {
                Formula::swap("x", child)
            } else {
                Formula::binder("x", child)
            }
        }
        _ => {
            let op = [TempOp::F, TempOp::P, TempOp::G, TempOp::H][r.gen_range(0..4)];
            let k = if g.constrained && r.gen_bool(0.5) {
                Some(gen_constraint(r, g.max_c, g.allow_eq))
            } else {
                None
            };
            Formula::temp(op, k, gen_point_formula(r, depth - 1, g))
        }
    }
}

const MAX_RETRIES: u32 = 6;

/// Interval-logic verdict at `i`, retrying with doubled horizons when the
/// evaluator reports instability.
pub fn interval_verdict(w: &LassoTrace, i: Interval, phi: &Formula) -> bool {
    let mut h = eval::default_horizon(w, phi).max(i.hi + 1 + w.cycle.len());
    for _ in 0..MAX_RETRIES {
        match eval::eval_dhs(w, i, phi, h) {
            Ok(b) => return b,
            Err(EvalError::Unstable { .. }) => h *= 2,
            Err(e) => panic!("interval oracle failed on `{phi}` at {i} of `{w}`: {e}"),
        }
    }
    panic!("interval oracle did not stabilize on `{phi}` at {i} of `{w}`")
}

/// Point-logic verdict at position `i` under `g`, retrying with doubled
/// horizons when the evaluator reports instability.
pub fn point_verdict(w: &LassoTrace, i: usize, g: &Valuation, phi: &Formula) -> bool {
    let mut h = eval::default_horizon(w, phi).max(i + 1 + w.cycle.len());
    for _ in 0..MAX_RETRIES {
        match eval::eval_chl(w, i, g, phi, h) {
            Ok(b) => return b,
            Err(EvalError::Unstable { .. }) => h *= 2,
            Err(e) => panic!("point oracle failed on `{phi}` at {i} of `{w}`: {e}"),
        }
    }
    panic!("point oracle did not stabilize on `{phi}` at {i} of `{w}`")
}

/// Sentence-level interval verdict (`w ⊨ φ` at the initial point interval).
pub fn interval_sentence_verdict(w: &LassoTrace, phi: &Formula) -> bool {
    eval::check_trace_satisfies(w, phi)
        .unwrap_or_else(|e| panic!("interval oracle failed on `{phi}` over `{w}`: {e}"))
}

/// Sentence-level point verdict (`w ⊨ φ` at position 0, initial valuation).
pub fn point_sentence_verdict(w: &LassoTrace, phi: &Formula) -> bool {
    eval::check_trace_satisfies_point(w, phi)
        .unwrap_or_else(|e| panic!("point oracle failed on `{phi}` over `{w}`: {e}"))
}
