//! Abstract syntax shared by all logics in the toolkit: interval modalities
//! with optional difference constraints, point-based temporal operators, the
//! position binder `down x`, and the position exchanger `swap x`.

mod lex;
mod mnf;
mod parse;
mod print;

pub use mnf::{dual, is_mnf, to_mnf, MnfError};
pub use parse::{parse, SyntaxError};

use std::collections::BTreeSet;
use std::sync::Arc;

/// Comparison operator of a difference constraint.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn token(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A difference constraint `∼ c` attached to a modality: the quantified
/// offset must compare to `c` under `op`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Constraint {
    pub op: CmpOp,
    pub c: i64,
}

impl Constraint {
    pub fn new(op: CmpOp, c: i64) -> Self {
        Constraint { op, c }
    }

    /// Does `delta ∼ c` hold?
    pub fn sat(self, delta: i64) -> bool {
        match self.op {
            CmpOp::Lt => delta < self.c,
            CmpOp::Le => delta <= self.c,
            CmpOp::Eq => delta == self.c,
            CmpOp::Gt => delta > self.c,
            CmpOp::Ge => delta >= self.c,
        }
    }

    /// The inverted constraint `(∼ c)⁻¹`: swaps the inequality direction and
    /// negates the constant, so that `delta ∼ c` iff `−delta (∼c)⁻¹`.
    /// Involution: `invert(invert(k)) = k`.
    pub fn invert(self) -> Self {
        let op = match self.op {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
        };
        Constraint { op, c: -self.c }
    }
}

/// The six Allen relations used by interval modalities, plus their inverses.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Relation {
    A,
    L,
    B,
    E,
    D,
    O,
    ABar,
    LBar,
    BBar,
    EBar,
    DBar,
    OBar,
}

pub const ALL_RELATIONS: [Relation; 12] = [
    Relation::A,
    Relation::L,
    Relation::B,
    Relation::E,
    Relation::D,
    Relation::O,
    Relation::ABar,
    Relation::LBar,
    Relation::BBar,
    Relation::EBar,
    Relation::DBar,
    Relation::OBar,
];

impl Relation {
    pub fn inverse(self) -> Self {
        match self {
            Relation::A => Relation::ABar,
            Relation::L => Relation::LBar,
            Relation::B => Relation::BBar,
            Relation::E => Relation::EBar,
            Relation::D => Relation::DBar,
            Relation::O => Relation::OBar,
            Relation::ABar => Relation::A,
            Relation::LBar => Relation::L,
            Relation::BBar => Relation::B,
            Relation::EBar => Relation::E,
            Relation::DBar => Relation::D,
            Relation::OBar => Relation::O,
        }
    }

    /// Relations that may carry constraints in the "simple" fragment.
    pub fn is_simple(self) -> bool {
        matches!(
            self,
            Relation::B
                | Relation::E
                | Relation::D
                | Relation::BBar
                | Relation::EBar
                | Relation::DBar
        )
    }

    pub fn token(self) -> &'static str {
        match self {
            Relation::A => "A",
            Relation::L => "L",
            Relation::B => "B",
            Relation::E => "E",
            Relation::D => "D",
            Relation::O => "O",
            Relation::ABar => "Abar",
            Relation::LBar => "Lbar",
            Relation::BBar => "Bbar",
            Relation::EBar => "Ebar",
            Relation::DBar => "Dbar",
            Relation::OBar => "Obar",
        }
    }
}

/// Point-based temporal operators: strict future/past and their universal
/// duals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum TempOp {
    F,
    P,
    G,
    H,
}

impl TempOp {
    /// F↔G, P↔H.
    pub fn dual(self) -> Self {
        match self {
            TempOp::F => TempOp::G,
            TempOp::P => TempOp::H,
            TempOp::G => TempOp::F,
            TempOp::H => TempOp::P,
        }
    }

    pub fn is_future(self) -> bool {
        matches!(self, TempOp::F | TempOp::G)
    }

    pub fn is_existential(self) -> bool {
        matches!(self, TempOp::F | TempOp::P)
    }

    pub fn token(self) -> &'static str {
        match self {
            TempOp::F => "F",
            TempOp::P => "P",
            TempOp::G => "G",
            TempOp::H => "H",
        }
    }
}

/// Formula over every logic handled by the toolkit. Interval and point
/// operators never mix in well-formed input; `classify` reports which family
/// a tree belongs to.
///
/// Children are reference-counted: translations reference the same child at
/// several anchors, and with exclusive ownership those constructions would
/// duplicate whole subtrees and compound exponentially across pipeline
/// stages. Sharing keeps them linear; equality and hashing stay structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Top,
    Prop(String),
    /// Position variable occurrence `@x`.
    Var(String),
    Not(Arc<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// Interval modality `<X{∼c}>` (existential) or `[X{∼c}]` (universal).
    HsMod {
        rel: Relation,
        universal: bool,
        constraint: Option<Constraint>,
        child: Arc<Formula>,
    },
    /// Point temporal operator `F/P/G/H{∼c}`.
    ChlTemp {
        op: TempOp,
        constraint: Option<Constraint>,
        child: Arc<Formula>,
    },
    /// `down x . φ`: bind `x` to the current position.
    Binder { var: String, child: Arc<Formula> },
    /// `swap x . φ`: jump to the position stored in `x` while storing the
    /// current one in its place.
    Swap { var: String, child: Arc<Formula> },
}

impl Formula {
    pub fn top() -> Formula {
        Formula::Top
    }

    /// `¬⊤`, the canonical falsum.
    pub fn falsum() -> Formula {
        Formula::Top.negate()
    }

    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn negate(self) -> Formula {
        Formula::Not(Arc::new(self))
    }

    /// Conjunction; collapses the empty and singleton cases.
    pub fn and(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::Top,
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction; collapses the empty and singleton cases.
    pub fn or(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::falsum(),
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::or(vec![self.negate(), rhs])
    }

    pub fn hs(rel: Relation, constraint: Option<Constraint>, child: Formula) -> Formula {
        Formula::HsMod {
            rel,
            universal: false,
            constraint,
            child: Arc::new(child),
        }
    }

    pub fn hs_univ(rel: Relation, constraint: Option<Constraint>, child: Formula) -> Formula {
        Formula::HsMod {
            rel,
            universal: true,
            constraint,
            child: Arc::new(child),
        }
    }

    pub fn temp(op: TempOp, constraint: Option<Constraint>, child: Formula) -> Formula {
        Formula::ChlTemp {
            op,
            constraint,
            child: Arc::new(child),
        }
    }

    pub fn binder(var: impl Into<String>, child: Formula) -> Formula {
        Formula::Binder {
            var: var.into(),
            child: Arc::new(child),
        }
    }

    pub fn swap(var: impl Into<String>, child: Formula) -> Formula {
        Formula::Swap {
            var: var.into(),
            child: Arc::new(child),
        }
    }

    /// `len_k`: holds exactly on intervals of length `k` (k ≥ 1), via
    /// `<B>^{k−1}⊤ ∧ [B]^k ¬⊤`.
    pub fn len(k: usize) -> Formula {
        assert!(k >= 1, "interval lengths start at 1");
        let mut upper = Formula::falsum();
        for _ in 0..k {
            upper = Formula::hs_univ(Relation::B, None, upper);
        }
        if k == 1 {
            return upper;
        }
        let mut lower = Formula::Top;
        for _ in 0..k - 1 {
            lower = Formula::hs(Relation::B, None, lower);
        }
        Formula::and(vec![lower, upper])
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Prop(_) | Formula::Var(_) => vec![],
            Formula::Not(c) => vec![c],
            Formula::And(cs) | Formula::Or(cs) => cs.iter().collect(),
            Formula::HsMod { child, .. }
            | Formula::ChlTemp { child, .. }
            | Formula::Binder { child, .. }
            | Formula::Swap { child, .. } => vec![child],
        }
    }

    /// Calls `f` once for every node, visiting each shared subtree once (by
    /// address). Formulas built by the translations share children freely, so
    /// per-node analyses must walk the DAG, not its tree unfolding.
    pub fn for_each_node<'a>(&'a self, mut f: impl FnMut(&'a Formula)) {
        fn walk<'a>(
            phi: &'a Formula,
            seen: &mut std::collections::HashSet<usize>,
            f: &mut impl FnMut(&'a Formula),
        ) {
            if !seen.insert(phi as *const Formula as usize) {
                return;
            }
            f(phi);
            for c in phi.children() {
                walk(c, seen, f);
            }
        }
        walk(self, &mut std::collections::HashSet::new(), &mut f);
    }

    /// All proposition names, sorted and deduplicated.
    pub fn props(&self) -> Vec<String> {
        let mut set = BTreeSet::new();
        self.for_each_node(|n| {
            if let Formula::Prop(p) = n {
                set.insert(p.clone());
            }
        });
        set.into_iter().collect()
    }

    /// Variable names in order of first occurrence (binders, swaps and
    /// occurrences all count).
    pub fn var_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.for_each_node(|n| {
            if let Formula::Var(v) | Formula::Binder { var: v, .. } | Formula::Swap { var: v, .. } =
                n
            {
                if !out.iter().any(|w| w == v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    /// Largest constraint magnitude occurring anywhere (0 if none).
    pub fn max_constant(&self) -> i64 {
        let mut max = 0;
        self.for_each_node(|n| {
            if let Formula::HsMod {
                constraint: Some(k),
                ..
            }
            | Formula::ChlTemp {
                constraint: Some(k),
                ..
            } = n
            {
                max = max.max(k.c.abs());
            }
        });
        max
    }

    /// Number of structurally distinct modal/temporal subformulas. Translated
    /// formulas repeat identical subtrees freely, so horizon heuristics use
    /// this instead of the raw tree count: shared obligations settle together
    /// and must not each widen the window.
    pub fn distinct_temporal_node_count(&self) -> usize {
        census(self).distinct_temporal
    }
}

/// Logic family of a classified formula.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    /// Interval logic without constraints.
    Hs,
    /// Interval logic with difference constraints.
    Dhs,
    /// Point-based hybrid logic with `down` binders only.
    Chl,
    /// Point-based hybrid logic using `swap`.
    Schl,
}

/// Everything the rest of the pipeline wants to know about a formula's shape.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FragmentDescriptor {
    pub family: Family,
    /// Distinct variable names.
    pub variables: usize,
    /// No equality constraints anywhere.
    pub monotonic: bool,
    /// Every constrained interval modality uses B/E/D or an inverse.
    pub simple: bool,
    pub constrained_relations: BTreeSet<Relation>,
    /// For point logics: no free variable occurrences.
    pub sentence: bool,
}

/// Why a formula fails to classify.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("formula mixes interval modalities with point operators/variables")]
    MixedFamilies,
}

/// Inspect a tree and report its logic family and fragment flags.
pub fn classify(phi: &Formula) -> Result<FragmentDescriptor, ClassifyError> {
    let mut has_interval = false;
    let mut has_point = false;
    let mut has_swap = false;
    let mut monotonic = true;
    let mut simple = true;
    let mut constrained = BTreeSet::new();
    phi.for_each_node(|n| match n {
        Formula::HsMod {
            rel, constraint, ..
        } => {
            has_interval = true;
            if let Some(k) = constraint {
                constrained.insert(*rel);
                if k.op == CmpOp::Eq {
                    monotonic = false;
                }
                if !rel.is_simple() {
                    simple = false;
                }
            }
        }
        Formula::ChlTemp { constraint, .. } => {
            has_point = true;
            if let Some(k) = constraint {
                if k.op == CmpOp::Eq {
                    monotonic = false;
                }
            }
        }
        Formula::Binder { .. } | Formula::Var(_) => has_point = true,
        Formula::Swap { .. } => {
            has_point = true;
            has_swap = true;
        }
        _ => {}
    });
    if has_interval && has_point {
        return Err(ClassifyError::MixedFamilies);
    }
    let family = if has_interval {
        if constrained.is_empty() {
            Family::Hs
        } else {
            Family::Dhs
        }
    } else if has_swap {
        Family::Schl
    } else {
        Family::Chl
    };
    Ok(FragmentDescriptor {
        family,
        variables: phi.var_names().len(),
        monotonic,
        simple,
        constrained_relations: constrained,
        sentence: free_vars(phi).is_empty(),
    })
}

/// Variable names with at least one occurrence not captured by a binder or
/// swap for that name.
pub fn free_vars(phi: &Formula) -> BTreeSet<String> {
    // Whether a node contributes a free occurrence depends on the set of
    // names bound on the path to it, so shared subtrees are revisited once
    // per distinct bound set (at most 2^#names, and names are few).
    let names = phi.var_names();
    if names.len() > 64 {
        // No bitmask for this many names; plain scope-stack walk. Only
        // hand-written trees can get here, and those have no sharing.
        let mut out = BTreeSet::new();
        collect_free_stack(phi, &mut Vec::new(), &mut out);
        return out;
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = BTreeSet::new();
    collect_free(phi, &names, 0, &mut seen, &mut out);
    out
}

fn collect_free_stack(phi: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match phi {
        Formula::Var(v) => {
            if !bound.iter().any(|w| w == v) {
                out.insert(v.clone());
            }
        }
        Formula::Binder { var, child } | Formula::Swap { var, child } => {
            bound.push(var.clone());
            collect_free_stack(child, bound, out);
            bound.pop();
        }
        _ => {
            for c in phi.children() {
                collect_free_stack(c, bound, out);
            }
        }
    }
}

fn collect_free(
    phi: &Formula,
    names: &[String],
    bound: u64,
    seen: &mut std::collections::HashSet<(usize, u64)>,
    out: &mut BTreeSet<String>,
) {
    if !seen.insert((phi as *const Formula as usize, bound)) {
        return;
    }
    match phi {
        Formula::Var(v) => {
            let i = names.iter().position(|n| n == v).expect("collected name");
            if bound & (1 << i) == 0 {
                out.insert(v.clone());
            }
        }
        Formula::Binder { var, child } | Formula::Swap { var, child } => {
            let i = names.iter().position(|n| n == var).expect("collected name");
            collect_free(child, names, bound | (1 << i), seen, out);
        }
        _ => {
            for c in phi.children() {
                collect_free(c, names, bound, seen, out);
            }
        }
    }
}

/// Size metric: (distinct subformulas + distinct constraints) × bit-width of
/// the largest constant. And/Or children are order-normalized before
/// comparing subformulas, so `p ∧ q` and `q ∧ p` count the same.
pub fn size(phi: &Formula) -> u64 {
    let c = census(phi);
    (c.distinct as u64 + c.constraints as u64) * bits(c.max_c)
}

fn bits(c: i64) -> u64 {
    let c = c.unsigned_abs();
    if c == 0 {
        1
    } else {
        64 - c.leading_zeros() as u64
    }
}

/// Structural census of a formula. Distinctness is up to And/Or child order;
/// subformulas are interned bottom-up into ids so that comparing or hashing
/// a node costs its child count, never a walk of the whole subtree. Shared
/// children are interned once (by address), so the census is linear in the
/// stored graph even when the tree unfolding is enormous.
struct Census {
    /// Distinct subformulas.
    distinct: usize,
    /// Distinct modal/temporal subformulas.
    distinct_temporal: usize,
    /// Distinct constraints.
    constraints: usize,
    /// Largest constraint magnitude (0 if none).
    max_c: i64,
}

fn census(phi: &Formula) -> Census {
    #[derive(PartialEq, Eq, Hash)]
    enum Key {
        Top,
        Prop(String),
        Var(String),
        Not(u32),
        And(Vec<u32>),
        Or(Vec<u32>),
        HsMod(Relation, bool, Option<Constraint>, u32),
        ChlTemp(TempOp, Option<Constraint>, u32),
        Binder(String, u32),
        Swap(String, u32),
    }
    struct St {
        ids: std::collections::HashMap<Key, u32>,
        by_addr: std::collections::HashMap<usize, u32>,
        temporal: usize,
        constraints: std::collections::HashSet<Constraint>,
        max_c: i64,
    }
    fn intern(phi: &Formula, st: &mut St) -> u32 {
        let addr = phi as *const Formula as usize;
        if let Some(&id) = st.by_addr.get(&addr) {
            return id;
        }
        let key = match phi {
            Formula::Top => Key::Top,
            Formula::Prop(p) => Key::Prop(p.clone()),
            Formula::Var(v) => Key::Var(v.clone()),
            Formula::Not(c) => Key::Not(intern(c, st)),
            Formula::And(cs) => {
                let mut ids: Vec<u32> = cs.iter().map(|c| intern(c, st)).collect();
                ids.sort_unstable();
                Key::And(ids)
            }
            Formula::Or(cs) => {
                let mut ids: Vec<u32> = cs.iter().map(|c| intern(c, st)).collect();
                ids.sort_unstable();
                Key::Or(ids)
            }
            Formula::HsMod {
                rel,
                universal,
                constraint,
                child,
            } => Key::HsMod(*rel, *universal, *constraint, intern(child, st)),
            Formula::ChlTemp {
                op,
                constraint,
                child,
            } => Key::ChlTemp(*op, *constraint, intern(child, st)),
            Formula::Binder { var, child } => Key::Binder(var.clone(), intern(child, st)),
            Formula::Swap { var, child } => Key::Swap(var.clone(), intern(child, st)),
        };
        if let Formula::HsMod {
            constraint: Some(k),
            ..
        }
        | Formula::ChlTemp {
            constraint: Some(k),
            ..
        } = phi
        {
            st.constraints.insert(*k);
            st.max_c = st.max_c.max(k.c.abs());
        }
        let next = st.ids.len() as u32;
        let id = *st.ids.entry(key).or_insert(next);
        if id == next && matches!(phi, Formula::HsMod { .. } | Formula::ChlTemp { .. }) {
            st.temporal += 1;
        }
        st.by_addr.insert(addr, id);
        id
    }
    let mut st = St {
        ids: std::collections::HashMap::new(),
        by_addr: std::collections::HashMap::new(),
        temporal: 0,
        constraints: std::collections::HashSet::new(),
        max_c: 0,
    };
    intern(phi, &mut st);
    Census {
        distinct: st.ids.len(),
        distinct_temporal: st.temporal,
        constraints: st.constraints.len(),
        max_c: st.max_c,
    }
}
