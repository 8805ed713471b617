//! Ground-truth semantics over lasso traces, by brute force: interval
//! formulas are evaluated on a finite grid of intervals, point formulas on a
//! finite window of positions. Both engines treat the window's last
//! loop-width band as representatives of everything beyond the window
//! (positions beyond fold back by the loop length), and every public entry
//! point recomputes with a doubled window and insists the verdict is stable.
//! These evaluators are deliberately independent from the automaton pipeline:
//! they are the oracle everything else is checked against.

mod chl;
mod dhs;

pub use chl::ChlEvaluator;
pub use dhs::DhsEvaluator;

use crate::syntax::Formula;
use crate::trace::{Interval, LassoTrace};
use std::collections::BTreeMap;

/// Assignment of positions to variables. Variables absent from the map are
/// read as position 0, matching the initial valuation that maps every
/// variable to 0.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Valuation(pub BTreeMap<String, usize>);

impl Valuation {
    /// The initial valuation: every variable at position 0.
    pub fn initial() -> Self {
        Valuation::default()
    }

    pub fn with(mut self, var: impl Into<String>, pos: usize) -> Self {
        self.0.insert(var.into(), pos);
        self
    }

    pub fn get(&self, var: &str) -> usize {
        self.0.get(var).copied().unwrap_or(0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum EvalError {
    #[error("horizon {horizon} is too small; it must be at least {min}")]
    HorizonTooSmall { horizon: usize, min: usize },
    #[error("interval {0} does not fit under the horizon")]
    OutOfWindow(Interval),
    #[error(
        "evaluation did not stabilize: horizons {horizon} and {doubled} disagree; \
         enlarge the horizon"
    )]
    Unstable { horizon: usize, doubled: usize },
    #[error("formula mixes interval and point operators")]
    MixedFamilies,
    #[error("point-based evaluation supports at most 2 variables, found {0}")]
    TooManyVariables(usize),
    #[error("expected an interval-logic formula, found point operators")]
    NotInterval,
    #[error("expected a point-logic formula, found interval modalities")]
    NotPoint,
}

/// Default evaluation horizon for a formula on a trace:
/// `|u| + (T·(c_max+1) + 2)·|v|`, where `T` counts distinct temporal
/// subformulas and `c_max` is the largest constraint magnitude. Satisfaction over `u·v^ω`
/// settles into a `|v|`-periodic pattern after a transient bounded by the
/// constraint reach of the formula; the stability assertion in the
/// evaluators turns this heuristic into a checked assumption.
pub fn default_horizon(w: &LassoTrace, phi: &Formula) -> usize {
    let t = phi.distinct_temporal_node_count().max(1);
    let c = phi.max_constant().unsigned_abs() as usize;
    w.prefix.len() + (t * (c + 1) + 2) * w.cycle.len()
}

/// Truth of `φ` on the interval `I` of `w`, computed on the `[0,horizon)`
/// grid and re-checked at horizon `2·horizon`.
pub fn eval_dhs(
    w: &LassoTrace,
    i: Interval,
    phi: &Formula,
    horizon: usize,
) -> Result<bool, EvalError> {
    DhsEvaluator::new(phi)?.eval(w, i, horizon)
}

/// Truth of `φ` at position `i` of `w` under valuation `g`, computed on the
/// `[0,horizon)` window and re-checked at horizon `2·horizon`.
pub fn eval_chl(
    w: &LassoTrace,
    i: usize,
    g: &Valuation,
    phi: &Formula,
    horizon: usize,
) -> Result<bool, EvalError> {
    ChlEvaluator::new(phi)?.eval(w, i, g, horizon)
}

/// `w ⊨ φ` for interval formulas: truth at `[0,0]`, with an auto-chosen
/// horizon that doubles (a bounded number of times) if the stability check
/// fails.
pub fn check_trace_satisfies(w: &LassoTrace, phi: &Formula) -> Result<bool, EvalError> {
    let ev = DhsEvaluator::new(phi)?;
    retry_doubling(default_horizon(w, phi), |h| {
        ev.eval(w, Interval::new(0, 0), h)
    })
}

/// `w ⊨ φ` for point formulas: truth at position 0 under the initial
/// valuation, with the same auto-horizon policy.
pub fn check_trace_satisfies_point(w: &LassoTrace, phi: &Formula) -> Result<bool, EvalError> {
    let ev = ChlEvaluator::new(phi)?;
    retry_doubling(default_horizon(w, phi), |h| {
        ev.eval(w, 0, &Valuation::initial(), h)
    })
}

const MAX_DOUBLINGS: u32 = 5;

pub(crate) fn retry_doubling(
    h0: usize,
    mut attempt: impl FnMut(usize) -> Result<bool, EvalError>,
) -> Result<bool, EvalError> {
    let mut h = h0;
    let mut last = Err(EvalError::Unstable {
        horizon: h0,
        doubled: 2 * h0,
    });
    for _ in 0..=MAX_DOUBLINGS {
        last = attempt(h);
        match &last {
            Err(EvalError::Unstable { .. }) => h *= 2,
            _ => return last,
        }
    }
    last
}
