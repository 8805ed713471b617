//! Local-consistency machinery for the one-variable point logic: closure of a
//! normal-form formula, counter obligations for bounded operators, atoms
//! (maximal locally-consistent subsets), the step relation between atoms at
//! consecutive trace positions, and finite-prefix checking of atom sequences.
//!
//! Everything here is purely combinatorial: atoms are bitsets over a fixed
//! ordering of the closure items plus obligations, and the step relation is a
//! conjunction of per-operator requirement families evaluated on bit pairs.
//! The automata layer builds on these pieces; satisfaction of full sequences
//! (fairness, binder witnessing) is decided there, not here.

use crate::syntax::{classify, is_mnf, CmpOp, Constraint, Family, Formula, TempOp};
use crate::trace::LassoTrace;
use std::collections::HashMap;
use std::sync::Arc;

/// Why a formula is rejected by the closure/atom machinery.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum TableauError {
    #[error("formula must be in monotonic normal form (negations on leaves, constraints `<= c` with c >= 1)")]
    NotNormalForm,
    #[error("formula mixes interval modalities with point operators, or uses interval modalities")]
    IntervalModality,
    #[error("swap binders are outside the one-variable point fragment")]
    SwapUnsupported,
    #[error("the point fragment admits one variable; found {0}")]
    TooManyVariables(usize),
    #[error("operation exceeded the configured resource limit: {0}")]
    Resource(String),
}

/// Hard cap on the number of undetermined bits the guided successor/seed
/// enumerations are willing to expand (2^cap candidates).
const MAX_RESIDUAL_BITS: usize = 26;

// ---------------------------------------------------------------------------
// Formula pool: hash-consed normal-form nodes with precomputed duals.
// ---------------------------------------------------------------------------

pub(crate) type NodeId = u32;

/// Structure of a pooled node; children are pool ids, so hashing and equality
/// never re-walk subtrees (safe on heavily shared input trees).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Node {
    Top,
    Prop(String),
    Var,
    /// Negation of an atomic node (leaf-level negation only, per normal form).
    NotAtom(NodeId),
    And(Box<[NodeId]>),
    Or(Box<[NodeId]>),
    Temp {
        op: TempOp,
        bound: Option<u32>,
        child: NodeId,
    },
    Binder(NodeId),
}

/// Hash-consing pool for normal-form point formulas. Interning is bottom-up;
/// every node gets its dual interned alongside it, so `dual(id)` is O(1).
pub(crate) struct FormulaPool {
    nodes: Vec<Node>,
    duals: Vec<NodeId>,
    terms: Vec<Formula>,
    index: HashMap<Node, NodeId>,
    var_name: Option<String>,
}

impl FormulaPool {
    pub(crate) fn new() -> Self {
        FormulaPool {
            nodes: Vec::new(),
            duals: Vec::new(),
            terms: Vec::new(),
            index: HashMap::new(),
            var_name: None,
        }
    }

    pub(crate) fn var_name(&self) -> &str {
        self.var_name.as_deref().unwrap_or("x")
    }

    /// Intern a normal-form formula. Shared subtrees are visited once thanks
    /// to the per-call address memo (addresses are not cached across calls:
    /// the allocator may reuse them once the caller drops its tree).
    pub(crate) fn intern(&mut self, phi: &Formula) -> NodeId {
        let mut by_addr = HashMap::new();
        self.intern_rec(phi, &mut by_addr)
    }

    fn intern_rec(&mut self, phi: &Formula, by_addr: &mut HashMap<usize, NodeId>) -> NodeId {
        let key = phi as *const Formula as usize;
        if let Some(&id) = by_addr.get(&key) {
            return id;
        }
        let node = match phi {
            Formula::Top => Node::Top,
            Formula::Prop(p) => Node::Prop(p.clone()),
            Formula::Var(v) => {
                self.note_var(v);
                Node::Var
            }
            Formula::Not(c) => {
                let inner = self.intern_rec(c, by_addr);
                debug_assert!(matches!(
                    self.nodes[inner as usize],
                    Node::Top | Node::Prop(_) | Node::Var
                ));
                Node::NotAtom(inner)
            }
            Formula::And(cs) => Node::And(cs.iter().map(|c| self.intern_rec(c, by_addr)).collect()),
            Formula::Or(cs) => Node::Or(cs.iter().map(|c| self.intern_rec(c, by_addr)).collect()),
            Formula::ChlTemp {
                op,
                constraint,
                child,
            } => {
                let bound = constraint.map(|k| {
                    debug_assert!(k.op == CmpOp::Le && k.c >= 1);
                    k.c as u32
                });
                Node::Temp {
                    op: *op,
                    bound,
                    child: self.intern_rec(child, by_addr),
                }
            }
            Formula::Binder { var, child } => {
                self.note_var(var);
                Node::Binder(self.intern_rec(child, by_addr))
            }
            Formula::Swap { .. } | Formula::HsMod { .. } => {
                unreachable!("pool input is validated to the point fragment in normal form")
            }
        };
        let id = self.intern_node(node);
        by_addr.insert(key, id);
        id
    }

    fn note_var(&mut self, v: &str) {
        if self.var_name.is_none() {
            self.var_name = Some(v.to_string());
        }
    }

    /// Intern a structural node whose children are already pooled; interns the
    /// dual right after, so both directions of the pairing stay O(1).
    fn intern_node(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.push_node(node.clone());
        let dual = match &node {
            Node::Top | Node::Prop(_) | Node::Var => Node::NotAtom(id),
            Node::NotAtom(a) => return self.pair_with(id, *a),
            Node::And(cs) => Node::Or(cs.iter().map(|&c| self.duals[c as usize]).collect()),
            Node::Or(cs) => Node::And(cs.iter().map(|&c| self.duals[c as usize]).collect()),
            Node::Temp { op, bound, child } => Node::Temp {
                op: op.dual(),
                bound: *bound,
                child: self.duals[*child as usize],
            },
            Node::Binder(c) => Node::Binder(self.duals[*c as usize]),
        };
        let dual_id = self.intern_node(dual);
        self.duals[id as usize] = dual_id;
        self.duals[dual_id as usize] = id;
        id
    }

    fn pair_with(&mut self, id: NodeId, partner: NodeId) -> NodeId {
        self.duals[id as usize] = partner;
        self.duals[partner as usize] = id;
        id
    }

    fn push_node(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len() as NodeId;
        let term = self.materialize(&node);
        self.nodes.push(node.clone());
        self.duals.push(id); // patched by intern_node
        self.terms.push(term);
        self.index.insert(node, id);
        id
    }

    fn materialize(&self, node: &Node) -> Formula {
        match node {
            Node::Top => Formula::Top,
            Node::Prop(p) => Formula::prop(p),
            Node::Var => Formula::var(self.var_name()),
            Node::NotAtom(a) => Formula::Not(Arc::new(self.terms[*a as usize].clone())),
            Node::And(cs) => {
                Formula::And(cs.iter().map(|&c| self.terms[c as usize].clone()).collect())
            }
            Node::Or(cs) => {
                Formula::Or(cs.iter().map(|&c| self.terms[c as usize].clone()).collect())
            }
            Node::Temp { op, bound, child } => Formula::temp(
                *op,
                bound.map(|c| Constraint::new(CmpOp::Le, c as i64)),
                self.terms[*child as usize].clone(),
            ),
            Node::Binder(c) => {
                Formula::binder(self.var_name(), self.terms[*c as usize].clone())
            }
        }
    }

    pub(crate) fn dual(&self, id: NodeId) -> NodeId {
        self.duals[id as usize]
    }

    pub(crate) fn term(&self, id: NodeId) -> &Formula {
        &self.terms[id as usize]
    }

    fn temp(&mut self, op: TempOp, bound: Option<u32>, child: NodeId) -> NodeId {
        self.intern_node(Node::Temp { op, bound, child })
    }

    fn top(&mut self) -> NodeId {
        self.intern_node(Node::Top)
    }

    fn var(&mut self) -> NodeId {
        self.intern_node(Node::Var)
    }

    fn prop(&mut self, name: &str) -> NodeId {
        self.intern_node(Node::Prop(name.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

/// Shape of a closure item, with children rebased to item indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ItemKind {
    Top,
    NotTop,
    /// Index into [`Closure::props`].
    Prop(usize),
    NotProp(usize),
    Var,
    NotVar,
    And(Vec<usize>),
    Or(Vec<usize>),
    Temp {
        op: TempOp,
        bound: Option<u32>,
        child: usize,
    },
    /// Binder formula; the body is intentionally not a closure item (it gets
    /// its own closure in the scope graph).
    Binder,
}

/// One closure member: its formula, structural kind, and dual partner.
#[derive(Clone, Debug)]
pub struct Item {
    pub formula: Formula,
    pub kind: ItemKind,
    pub dual: usize,
    pool_id: NodeId,
}

/// A counter obligation `(carrier, d)`: the carrier is a bounded operator
/// item with bound `c >= 2`, and `1 <= d <= c-1` records the exact residual
/// distance to the extremal witness.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Obligation {
    pub carrier: usize,
    pub d: u32,
}

#[derive(Clone, Copy, Debug)]
struct Carrier {
    item: usize,
    c: u32,
    obl_start: usize,
}

#[derive(Clone, Copy, Debug)]
struct UnconReq {
    item: usize,
    child: usize,
}

#[derive(Clone, Copy, Debug)]
struct ConReq {
    item: usize,
    child: usize,
    c: u32,
    /// Start of this carrier's obligation bits (item-count offset already
    /// applied); meaningless when `c == 1`.
    obl_start: usize,
    /// For bounded universal carriers with `c >= 2`: item index of the
    /// one-step existential wrapper of the child, read by the `d = 1` rule.
    wrapper: usize,
}

#[derive(Clone, Copy, Debug)]
enum EnumStep {
    Forced(bool),
    Free(usize),
    DualOf(usize),
    Conn,
}

/// Whether a closure keeps the one-step wrappers of every first-level
/// subformula (the definitional closure) or only those wrappers some step
/// rule actually reads (a language-preserving quotient used by the automata
/// layer; dropped wrapper bits are neighbor-determined and never read).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum WrapperMode {
    Full,
    Reduced,
}

/// Closure of a normal-form formula: an indexed, dual-paired set of formulas
/// together with the counter obligations of its bounded carriers and the
/// precomputed requirement tables for the atom step relation.
pub struct Closure {
    items: Vec<Item>,
    obligations: Vec<Obligation>,
    carriers: Vec<Carrier>,
    /// Alphabet of the surrounding universe, sorted; atoms constrain exactly
    /// these propositions.
    props: Vec<String>,
    prop_items: Vec<usize>,
    var_item: usize,
    /// Item index of the formula the closure was built from.
    root_item: usize,
    binder_items: Vec<usize>,
    uncon_f: Vec<UnconReq>,
    uncon_p: Vec<UnconReq>,
    uncon_g: Vec<UnconReq>,
    uncon_h: Vec<UnconReq>,
    con_f: Vec<ConReq>,
    con_p: Vec<ConReq>,
    con_g: Vec<ConReq>,
    con_h: Vec<ConReq>,
    /// Bits that must be absent from a position-0 atom: past formulas and
    /// past-flavored obligations.
    initial_forbidden: Box<[u64]>,
    enum_plan: Vec<EnumStep>,
    free_count: usize,
    total_bits: usize,
}

/// Statistics for the debug dump and the growth-trend checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureStats {
    pub items: usize,
    pub obligations: usize,
    pub dual_pairs: usize,
    pub free_pairs: usize,
    pub carriers: usize,
    /// Exact atom count when it fits in 128 bits.
    pub atom_count: Option<u128>,
    pub atom_count_log2: f64,
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// An atom: a subset of closure items and obligations satisfying the local
/// consistency axioms, stored as a bitset in closure ordering.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    bits: Box<[u64]>,
}

impl Atom {
    fn zeroed(total_bits: usize) -> Atom {
        Atom {
            bits: vec![0u64; words_for(total_bits)].into_boxed_slice(),
        }
    }

    #[inline]
    pub fn get(&self, bit: usize) -> bool {
        self.bits[bit / 64] >> (bit % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, bit: usize, v: bool) {
        if v {
            self.bits[bit / 64] |= 1 << (bit % 64);
        } else {
            self.bits[bit / 64] &= !(1 << (bit % 64));
        }
    }

    fn intersects(&self, mask: &[u64]) -> bool {
        self.bits.iter().zip(mask).any(|(a, m)| a & m != 0)
    }
}

/// Validate a formula for the closure machinery: normal form, point-based,
/// at most one variable.
fn validate(phi: &Formula) -> Result<(), TableauError> {
    let desc = classify(phi).map_err(|_| TableauError::IntervalModality)?;
    match desc.family {
        Family::Hs | Family::Dhs => return Err(TableauError::IntervalModality),
        Family::Schl => return Err(TableauError::SwapUnsupported),
        Family::Chl => {}
    }
    if desc.variables > 1 {
        return Err(TableauError::TooManyVariables(desc.variables));
    }
    if !is_mnf(phi) {
        return Err(TableauError::NotNormalForm);
    }
    Ok(())
}

/// Build the closure of a normal-form one-variable point formula, with the
/// alphabet taken from the formula itself.
pub fn closure(phi: &Formula) -> Result<Closure, TableauError> {
    validate(phi)?;
    let mut pool = FormulaPool::new();
    let root = pool.intern(phi);
    let ap = phi.props();
    Ok(build_closure(&mut pool, root, &ap, WrapperMode::Full))
}

/// Collect the pool ids reachable from `root` without entering binder bodies
/// (binder nodes themselves are collected).
fn first_level_ids(pool: &FormulaPool, root: NodeId) -> Vec<NodeId> {
    let mut seen = vec![false; pool.nodes.len()];
    let mut stack = vec![root];
    let mut out = Vec::new();
    while let Some(id) = stack.pop() {
        if seen[id as usize] {
            continue;
        }
        seen[id as usize] = true;
        out.push(id);
        match &pool.nodes[id as usize] {
            Node::And(cs) | Node::Or(cs) => stack.extend(cs.iter().copied()),
            Node::Temp { child, .. } => stack.push(*child),
            Node::Binder(_) => {} // body belongs to its own scope
            Node::Top | Node::Prop(_) | Node::Var | Node::NotAtom(_) => {}
        }
    }
    out
}

fn build_closure(
    pool: &mut FormulaPool,
    root: NodeId,
    universe_ap: &[String],
    mode: WrapperMode,
) -> Closure {
    let top = pool.top();
    let var = pool.var();
    let p1top = pool.temp(TempOp::P, Some(1), top);
    let mut ids: Vec<NodeId> = vec![top, var, p1top];
    for p in universe_ap {
        ids.push(pool.prop(p));
    }
    let first_level = first_level_ids(pool, root);
    ids.extend(first_level.iter().copied());
    if mode == WrapperMode::Full {
        for &psi in &first_level {
            ids.push(pool.temp(TempOp::F, Some(1), psi));
            ids.push(pool.temp(TempOp::P, Some(1), psi));
        }
    }
    // Close under duals.
    for i in 0..ids.len() {
        ids.push(pool.dual(ids[i]));
    }
    // The d = 1 step rule for a bounded universal carrier reads the one-step
    // existential wrapper of its child; make sure it is present (bounded
    // carriers arising as duals need it even though their children are not
    // first-level subformulas), then close under duals once more. The added
    // wrappers have bound 1 and trigger nothing further.
    let mut extra = Vec::new();
    ids.sort_unstable();
    ids.dedup();
    for &id in &ids {
        if let Node::Temp {
            op,
            bound: Some(c),
            child,
        } = pool.nodes[id as usize]
        {
            if c >= 2 {
                match op {
                    TempOp::G => extra.push(pool.temp(TempOp::F, Some(1), child)),
                    TempOp::H => extra.push(pool.temp(TempOp::P, Some(1), child)),
                    TempOp::F | TempOp::P => {}
                }
            }
        }
    }
    for i in 0..extra.len() {
        extra.push(pool.dual(extra[i]));
    }
    ids.extend(extra);
    ids.sort_unstable();
    ids.dedup();

    // Rebase to item indices (pool ids are bottom-up, so children precede
    // parents in the sorted order).
    let index_of: HashMap<NodeId, usize> =
        ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let prop_index: HashMap<&str, usize> = universe_ap
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i))
        .collect();
    let mut items = Vec::with_capacity(ids.len());
    for &id in &ids {
        let kind = match &pool.nodes[id as usize] {
            Node::Top => ItemKind::Top,
            Node::Prop(p) => ItemKind::Prop(prop_index[p.as_str()]),
            Node::Var => ItemKind::Var,
            Node::NotAtom(a) => match &pool.nodes[*a as usize] {
                Node::Top => ItemKind::NotTop,
                Node::Prop(p) => ItemKind::NotProp(prop_index[p.as_str()]),
                Node::Var => ItemKind::NotVar,
                _ => unreachable!("leaf negation"),
            },
            Node::And(cs) => ItemKind::And(cs.iter().map(|c| index_of[c]).collect()),
            Node::Or(cs) => ItemKind::Or(cs.iter().map(|c| index_of[c]).collect()),
            Node::Temp { op, bound, child } => ItemKind::Temp {
                op: *op,
                bound: *bound,
                child: index_of[child],
            },
            Node::Binder(_) => ItemKind::Binder,
        };
        items.push(Item {
            formula: pool.term(id).clone(),
            kind,
            dual: index_of[&pool.dual(id)],
            pool_id: id,
        });
    }

    // Obligations, requirement tables, initial mask, enumeration plan.
    let n = items.len();
    let mut obligations = Vec::new();
    let mut carriers = Vec::new();
    for (i, item) in items.iter().enumerate() {
        if let ItemKind::Temp {
            bound: Some(c), ..
        } = item.kind
        {
            if c >= 2 {
                let obl_start = n + obligations.len();
                for d in 1..c {
                    obligations.push(Obligation { carrier: i, d });
                }
                carriers.push(Carrier {
                    item: i,
                    c,
                    obl_start,
                });
            }
        }
    }
    let total_bits = n + obligations.len();

    let carrier_of = |i: usize| carriers.iter().find(|cr| cr.item == i);
    let wrapper_of = |items: &[Item], op: TempOp, child: usize| -> usize {
        let want = ItemKind::Temp {
            op,
            bound: Some(1),
            child,
        };
        items
            .iter()
            .position(|it| it.kind == want)
            .expect("one-step wrapper present by closure construction")
    };

    let (mut uncon_f, mut uncon_p, mut uncon_g, mut uncon_h) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut con_f, mut con_p, mut con_g, mut con_h) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut binder_items = Vec::new();
    for (i, item) in items.iter().enumerate() {
        match item.kind {
            ItemKind::Binder => binder_items.push(i),
            ItemKind::Temp {
                op,
                bound: None,
                child,
            } => {
                let req = UnconReq { item: i, child };
                match op {
                    TempOp::F => uncon_f.push(req),
                    TempOp::P => uncon_p.push(req),
                    TempOp::G => uncon_g.push(req),
                    TempOp::H => uncon_h.push(req),
                }
            }
            ItemKind::Temp {
                op,
                bound: Some(c),
                child,
            } => {
                let obl_start = carrier_of(i).map_or(usize::MAX, |cr| cr.obl_start);
                let wrapper = if c >= 2 {
                    match op {
                        TempOp::G => wrapper_of(&items, TempOp::F, child),
                        TempOp::H => wrapper_of(&items, TempOp::P, child),
                        _ => usize::MAX,
                    }
                } else {
                    usize::MAX
                };
                let req = ConReq {
                    item: i,
                    child,
                    c,
                    obl_start,
                    wrapper,
                };
                match op {
                    TempOp::F => con_f.push(req),
                    TempOp::P => con_p.push(req),
                    TempOp::G => con_g.push(req),
                    TempOp::H => con_h.push(req),
                }
            }
            _ => {}
        }
    }

    let mut initial_forbidden = vec![0u64; words_for(total_bits)];
    let mut forbid = |bit: usize| initial_forbidden[bit / 64] |= 1 << (bit % 64);
    for (i, item) in items.iter().enumerate() {
        if let ItemKind::Temp { op: TempOp::P, .. } = item.kind {
            forbid(i);
        }
    }
    for (oi, ob) in obligations.iter().enumerate() {
        if let ItemKind::Temp {
            op: TempOp::P | TempOp::H,
            ..
        } = items[ob.carrier].kind
        {
            forbid(n + oi);
        }
    }

    let mut enum_plan = Vec::with_capacity(n);
    let mut free_count = 0;
    for (i, item) in items.iter().enumerate() {
        let step = match item.kind {
            ItemKind::Top => EnumStep::Forced(true),
            ItemKind::NotTop => EnumStep::Forced(false),
            ItemKind::And(_) | ItemKind::Or(_) => {
                if item.dual < i {
                    EnumStep::DualOf(item.dual)
                } else {
                    EnumStep::Conn
                }
            }
            _ => {
                if item.dual < i {
                    EnumStep::DualOf(item.dual)
                } else {
                    let s = EnumStep::Free(free_count);
                    free_count += 1;
                    s
                }
            }
        };
        enum_plan.push(step);
    }

    let var_item = items
        .iter()
        .position(|it| it.kind == ItemKind::Var)
        .expect("variable item present");
    let prop_items = (0..universe_ap.len())
        .map(|pi| {
            items
                .iter()
                .position(|it| it.kind == ItemKind::Prop(pi))
                .expect("proposition item present")
        })
        .collect();

    Closure {
        root_item: index_of[&root],
        items,
        obligations,
        carriers,
        props: universe_ap.to_vec(),
        prop_items,
        var_item,
        binder_items,
        uncon_f,
        uncon_p,
        uncon_g,
        uncon_h,
        con_f,
        con_p,
        con_g,
        con_h,
        initial_forbidden: initial_forbidden.into_boxed_slice(),
        enum_plan,
        free_count,
        total_bits,
    }
}

impl Closure {
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn obligations(&self) -> &[Obligation] {
        &self.obligations
    }

    /// Alphabet the atoms constrain (sorted proposition names).
    pub fn alphabet(&self) -> &[String] {
        &self.props
    }

    /// Item index of the formula this closure was built from.
    pub fn root_item(&self) -> usize {
        self.root_item
    }

    pub fn var_item(&self) -> usize {
        self.var_item
    }

    pub(crate) fn binder_item_indices(&self) -> &[usize] {
        &self.binder_items
    }

    pub(crate) fn unconstrained_f_items(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.uncon_f.iter().map(|r| (r.item, r.child))
    }

    pub(crate) fn pool_id_of(&self, item: usize) -> NodeId {
        self.items[item].pool_id
    }

    pub fn item_index(&self, phi: &Formula) -> Option<usize> {
        self.items.iter().position(|it| &it.formula == phi)
    }

    /// Total bitset width: items then obligations.
    pub fn total_bits(&self) -> usize {
        self.total_bits
    }

    pub fn stats(&self) -> ClosureStats {
        let mut count: Option<u128> = Some(1u128 << self.free_count.min(127));
        if self.free_count > 127 {
            count = None;
        }
        let mut log2 = self.free_count as f64;
        for cr in &self.carriers {
            log2 += (cr.c as f64).log2();
            count = count.and_then(|v| v.checked_mul(cr.c as u128));
        }
        ClosureStats {
            items: self.items.len(),
            obligations: self.obligations.len(),
            dual_pairs: self.items.len() / 2,
            free_pairs: self.free_count,
            carriers: self.carriers.len(),
            atom_count: count,
            atom_count_log2: log2,
        }
    }

    /// Does the bitset satisfy the atom axioms?
    pub fn is_atom(&self, a: &Atom) -> bool {
        for (i, item) in self.items.iter().enumerate() {
            let ok = match &item.kind {
                ItemKind::Top => a.get(i),
                ItemKind::And(cs) => a.get(i) == cs.iter().all(|&c| a.get(c)),
                ItemKind::Or(cs) => a.get(i) == cs.iter().any(|&c| a.get(c)),
                _ => true,
            };
            if !ok || a.get(i) == a.get(item.dual) {
                return false;
            }
        }
        self.carriers.iter().all(|cr| {
            (0..cr.c - 1)
                .filter(|&k| a.get(cr.obl_start + k as usize))
                .count()
                <= 1
        })
    }

    /// No past formulas, no past-flavored obligations.
    pub fn is_initial(&self, a: &Atom) -> bool {
        !a.intersects(&self.initial_forbidden)
    }

    /// Propositional content of an atom as a mask in alphabet order.
    pub fn letter_of(&self, a: &Atom) -> u32 {
        let mut m = 0;
        for (pi, &it) in self.prop_items.iter().enumerate() {
            if a.get(it) {
                m |= 1 << pi;
            }
        }
        m
    }

    /// Project a trace letter onto this closure's alphabet.
    pub fn mask_of_letter(&self, letter: &std::collections::BTreeSet<String>) -> u32 {
        let mut m = 0;
        for (pi, p) in self.props.iter().enumerate() {
            if letter.contains(p) {
                m |= 1 << pi;
            }
        }
        m
    }

    /// Build an atom from item indices and `(carrier item, d)` obligations,
    /// validating the axioms.
    pub fn make_atom(&self, item_idxs: &[usize], obls: &[(usize, u32)]) -> Option<Atom> {
        let mut a = Atom::zeroed(self.total_bits);
        for &i in item_idxs {
            a.set(i, true);
        }
        for &(carrier, d) in obls {
            let cr = self.carriers.iter().find(|cr| cr.item == carrier)?;
            if d == 0 || d >= cr.c {
                return None;
            }
            a.set(cr.obl_start + (d - 1) as usize, true);
        }
        self.is_atom(&a).then_some(a)
    }

    /// Formulas asserted by an atom, in closure order.
    pub fn member_formulas<'a>(&'a self, a: &'a Atom) -> impl Iterator<Item = &'a Formula> + 'a {
        self.items
            .iter()
            .enumerate()
            .filter(move |(i, _)| a.get(*i))
            .map(|(_, it)| &it.formula)
    }

    /// Obligations asserted by an atom.
    pub fn member_obligations<'a>(&'a self, a: &'a Atom) -> impl Iterator<Item = Obligation> + 'a {
        self.obligations
            .iter()
            .enumerate()
            .filter(move |(k, _)| a.get(self.items.len() + *k))
            .map(|(_, ob)| *ob)
    }

    /// Number of atoms (exact when small, as log2 always).
    pub fn atom_count(&self) -> Option<u128> {
        self.stats().atom_count
    }

    /// Stream all atoms in a fixed deterministic order.
    pub fn enumerate_atoms(&self) -> AtomIter<'_> {
        AtomIter {
            cl: self,
            digits: vec![0; self.free_count + self.carriers.len()],
            done: false,
        }
    }

    fn build_from_digits(&self, digits: &[usize]) -> Atom {
        let mut a = Atom::zeroed(self.total_bits);
        for (i, step) in self.enum_plan.iter().enumerate() {
            let v = match *step {
                EnumStep::Forced(v) => v,
                EnumStep::Free(k) => digits[k] == 1,
                EnumStep::DualOf(j) => !a.get(j),
                EnumStep::Conn => match &self.items[i].kind {
                    ItemKind::And(cs) => cs.iter().all(|&c| a.get(c)),
                    ItemKind::Or(cs) => cs.iter().any(|&c| a.get(c)),
                    _ => unreachable!(),
                },
            };
            a.set(i, v);
        }
        for (k, cr) in self.carriers.iter().enumerate() {
            let digit = digits[self.free_count + k];
            if digit > 0 {
                a.set(cr.obl_start + digit - 1, true);
            }
        }
        a
    }
}

/// Streaming atom enumerator (odometer over free pair bits and per-carrier
/// obligation digits).
pub struct AtomIter<'a> {
    cl: &'a Closure,
    digits: Vec<usize>,
    done: bool,
}

impl<'a> Iterator for AtomIter<'a> {
    type Item = Atom;

    fn next(&mut self) -> Option<Atom> {
        if self.done {
            return None;
        }
        let atom = self.cl.build_from_digits(&self.digits);
        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == self.digits.len() {
                self.done = true;
                break;
            }
            let radix = if pos < self.cl.free_count {
                2
            } else {
                self.cl.carriers[pos - self.cl.free_count].c as usize
            };
            self.digits[pos] += 1;
            if self.digits[pos] < radix {
                break;
            }
            self.digits[pos] = 0;
            pos += 1;
        }
        Some(atom)
    }
}

// ---------------------------------------------------------------------------
// Step relation
// ---------------------------------------------------------------------------

/// The atom step relation: `b` can follow `a` at consecutive positions.
/// `b` must not be a position-0 atom, and all eight requirement families
/// (four unconstrained, four bounded) must hold on the pair.
pub fn is_succ(cl: &Closure, a: &Atom, b: &Atom) -> bool {
    if cl.is_initial(b) {
        return false;
    }
    for r in &cl.uncon_f {
        if a.get(r.item) != (b.get(r.item) || b.get(r.child)) {
            return false;
        }
    }
    for r in &cl.uncon_p {
        if b.get(r.item) != (a.get(r.item) || a.get(r.child)) {
            return false;
        }
    }
    for r in &cl.uncon_g {
        if a.get(r.item) != (b.get(r.item) && b.get(r.child)) {
            return false;
        }
    }
    for r in &cl.uncon_h {
        if b.get(r.item) != (a.get(r.item) && a.get(r.child)) {
            return false;
        }
    }
    for r in &cl.con_f {
        let any_b = r.c >= 2 && (0..r.c - 1).any(|k| b.get(r.obl_start + k as usize));
        if a.get(r.item) != (b.get(r.child) || any_b) {
            return false;
        }
        for d in 1..r.c {
            let lhs = a.get(r.obl_start + (d - 1) as usize);
            let rhs = if d == 1 {
                b.get(r.child)
            } else {
                !b.get(r.child) && b.get(r.obl_start + (d - 2) as usize)
            };
            if lhs != rhs {
                return false;
            }
        }
    }
    for r in &cl.con_p {
        let any_a = r.c >= 2 && (0..r.c - 1).any(|k| a.get(r.obl_start + k as usize));
        if b.get(r.item) != (a.get(r.child) || any_a) {
            return false;
        }
        for d in 1..r.c {
            let lhs = b.get(r.obl_start + (d - 1) as usize);
            let rhs = if d == 1 {
                a.get(r.child)
            } else {
                !a.get(r.child) && a.get(r.obl_start + (d - 2) as usize)
            };
            if lhs != rhs {
                return false;
            }
        }
    }
    for r in &cl.con_g {
        let last_b = r.c >= 2 && b.get(r.obl_start + (r.c - 2) as usize);
        if a.get(r.item) != (b.get(r.child) && (r.c == 1 || b.get(r.item) || last_b)) {
            return false;
        }
        for d in 1..r.c {
            let lhs = a.get(r.obl_start + (d - 1) as usize);
            let rhs = if d == 1 {
                b.get(r.child) && !b.get(r.wrapper)
            } else {
                b.get(r.child) && b.get(r.obl_start + (d - 2) as usize)
            };
            if lhs != rhs {
                return false;
            }
        }
    }
    for r in &cl.con_h {
        let last_a = r.c >= 2 && a.get(r.obl_start + (r.c - 2) as usize);
        if b.get(r.item) != (a.get(r.child) && (r.c == 1 || a.get(r.item) || last_a)) {
            return false;
        }
        for d in 1..r.c {
            let lhs = b.get(r.obl_start + (d - 1) as usize);
            let rhs = if d == 1 {
                a.get(r.child) && !a.get(r.wrapper)
            } else {
                a.get(r.child) && a.get(r.obl_start + (d - 2) as usize)
            };
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Guided enumeration: successors and position-0 atoms
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct Partial {
    /// -1 unknown, 0/1 decided; items then obligations.
    bits: Vec<i8>,
}

struct Conflict;

impl Partial {
    fn new(total: usize) -> Partial {
        Partial {
            bits: vec![-1; total],
        }
    }

    fn set_raw(&mut self, bit: usize, v: bool) -> Result<(), Conflict> {
        let w = v as i8;
        match self.bits[bit] {
            -1 => {
                self.bits[bit] = w;
                Ok(())
            }
            x if x == w => Ok(()),
            _ => Err(Conflict),
        }
    }
}

impl Closure {
    fn assign_item(&self, p: &mut Partial, item: usize, v: bool) -> Result<(), Conflict> {
        p.set_raw(item, v)?;
        p.set_raw(self.items[item].dual, !v)
    }

    /// Enumerate completions of a partial assignment and keep those passing
    /// `accept`. The residual free space is the set of undecided dual-pair
    /// representatives plus undecided obligation digits.
    fn complete(
        &self,
        p: &Partial,
        accept: impl Fn(&Atom) -> bool,
    ) -> Result<Vec<Atom>, TableauError> {
        let n = self.items.len();
        // Residual pair representatives: undecided non-connective items whose
        // dual is also undecided (connectives are recomputed from children).
        let mut reps = Vec::new();
        for (i, item) in self.items.iter().enumerate() {
            if p.bits[i] == -1
                && item.dual > i
                && !matches!(item.kind, ItemKind::And(_) | ItemKind::Or(_))
                && !matches!(item.kind, ItemKind::Top | ItemKind::NotTop)
            {
                reps.push(i);
            }
        }
        // Residual carriers: those with every obligation bit undecided. If
        // any bit of a carrier was decided in the guided phase, the whole
        // carrier was decided there.
        let mut free_carriers = Vec::new();
        for cr in &self.carriers {
            let undecided =
                (0..cr.c - 1).all(|k| p.bits[cr.obl_start + k as usize] == -1);
            if undecided {
                free_carriers.push(*cr);
            }
        }
        let residual_bits = reps.len()
            + free_carriers
                .iter()
                .map(|cr| usize::BITS as usize - ((cr.c as usize).leading_zeros() as usize))
                .sum::<usize>();
        if residual_bits > MAX_RESIDUAL_BITS {
            return Err(TableauError::Resource(format!(
                "successor enumeration would branch over 2^{residual_bits} candidates"
            )));
        }

        let mut digits = vec![0usize; reps.len() + free_carriers.len()];
        let mut out = Vec::new();
        loop {
            // Build the candidate.
            let mut a = Atom::zeroed(self.total_bits);
            let mut ok = true;
            for (i, item) in self.items.iter().enumerate() {
                let v = match item.kind {
                    ItemKind::Top => true,
                    ItemKind::NotTop => false,
                    ItemKind::And(ref cs) => {
                        let v = cs.iter().all(|&c| a.get(c));
                        if p.bits[i] >= 0 && p.bits[i] != v as i8 {
                            ok = false;
                            break;
                        }
                        v
                    }
                    ItemKind::Or(ref cs) => {
                        let v = cs.iter().any(|&c| a.get(c));
                        if p.bits[i] >= 0 && p.bits[i] != v as i8 {
                            ok = false;
                            break;
                        }
                        v
                    }
                    _ => {
                        if p.bits[i] >= 0 {
                            p.bits[i] == 1
                        } else if item.dual < i {
                            !a.get(item.dual)
                        } else {
                            let k = reps.binary_search(&i).expect("undecided item is a rep");
                            digits[k] == 1
                        }
                    }
                };
                a.set(i, v);
            }
            if ok {
                for k in 0..self.obligations.len() {
                    let bit = n + k;
                    if p.bits[bit] >= 0 {
                        a.set(bit, p.bits[bit] == 1);
                    }
                }
                for (ci, cr) in free_carriers.iter().enumerate() {
                    let digit = digits[reps.len() + ci];
                    if digit > 0 {
                        a.set(cr.obl_start + digit - 1, true);
                    }
                }
                if accept(&a) {
                    out.push(a);
                }
            }
            // Advance.
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return Ok(out);
                }
                let radix = if pos < reps.len() {
                    2
                } else {
                    free_carriers[pos - reps.len()].c as usize
                };
                digits[pos] += 1;
                if digits[pos] < radix {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }

    fn pin_letter(&self, p: &mut Partial, letter: u32) -> Result<(), Conflict> {
        for (pi, &it) in self.prop_items.iter().enumerate() {
            self.assign_item(p, it, letter >> pi & 1 == 1)?;
        }
        Ok(())
    }

    /// Successors of `a` whose propositional content is `letter`, with extra
    /// item pins (variable bit, binder-track bits). Deterministic order.
    pub(crate) fn successors(
        &self,
        a: &Atom,
        letter: Option<u32>,
        pins: &[(usize, bool)],
    ) -> Result<Vec<Atom>, TableauError> {
        let mut p = Partial::new(self.total_bits);
        let mut run = || -> Result<(), Conflict> {
            if let Some(m) = letter {
                self.pin_letter(&mut p, m)?;
            }
            for &(it, v) in pins {
                self.assign_item(&mut p, it, v)?;
            }
            // Past-flavored content of the successor is a function of `a`.
            for r in &self.uncon_p {
                self.assign_item(&mut p, r.item, a.get(r.item) || a.get(r.child))?;
            }
            for r in &self.uncon_h {
                self.assign_item(&mut p, r.item, a.get(r.item) && a.get(r.child))?;
            }
            for r in &self.con_p {
                let any_a = r.c >= 2 && (0..r.c - 1).any(|k| a.get(r.obl_start + k as usize));
                self.assign_item(&mut p, r.item, a.get(r.child) || any_a)?;
                for d in 1..r.c {
                    let v = if d == 1 {
                        a.get(r.child)
                    } else {
                        !a.get(r.child) && a.get(r.obl_start + (d - 2) as usize)
                    };
                    p.set_raw(r.obl_start + (d - 1) as usize, v)?;
                }
            }
            for r in &self.con_h {
                let last_a = r.c >= 2 && a.get(r.obl_start + (r.c - 2) as usize);
                self.assign_item(
                    &mut p,
                    r.item,
                    a.get(r.child) && (r.c == 1 || a.get(r.item) || last_a),
                )?;
                let mut count = 0;
                for d in 1..r.c {
                    let v = if d == 1 {
                        a.get(r.child) && !a.get(r.wrapper)
                    } else {
                        a.get(r.child) && a.get(r.obl_start + (d - 2) as usize)
                    };
                    count += v as u32;
                    p.set_raw(r.obl_start + (d - 1) as usize, v)?;
                }
                if count > 1 {
                    return Err(Conflict);
                }
            }
            // Forward pruning from the bounded-eventually family: the
            // successor's child bit and digit are forced unless the current
            // digit is exactly 1.
            for r in &self.con_f {
                let af = a.get(r.item);
                if r.c == 1 {
                    self.assign_item(&mut p, r.child, af)?;
                    continue;
                }
                let a_digit = (1..r.c).find(|&d| a.get(r.obl_start + (d - 1) as usize));
                match a_digit {
                    None if !af => {
                        self.assign_item(&mut p, r.child, false)?;
                        for d in 1..r.c {
                            p.set_raw(r.obl_start + (d - 1) as usize, false)?;
                        }
                    }
                    None => {
                        // witness strictly beyond the next position
                        self.assign_item(&mut p, r.child, false)?;
                        for d in 1..r.c {
                            p.set_raw(r.obl_start + (d - 1) as usize, d == r.c - 1)?;
                        }
                    }
                    Some(_) if !af => return Err(Conflict),
                    Some(1) => {
                        self.assign_item(&mut p, r.child, true)?;
                        // successor digit free
                    }
                    Some(d0) => {
                        self.assign_item(&mut p, r.child, false)?;
                        for d in 1..r.c {
                            p.set_raw(r.obl_start + (d - 1) as usize, d == d0 - 1)?;
                        }
                    }
                }
            }
            // Partial pruning from the bounded-always family.
            for r in &self.con_g {
                if r.c == 1 {
                    self.assign_item(&mut p, r.child, a.get(r.item))?;
                    continue;
                }
                let a_digit = (1..r.c).find(|&d| a.get(r.obl_start + (d - 1) as usize));
                match a_digit {
                    Some(1) => {
                        self.assign_item(&mut p, r.child, true)?;
                        self.assign_item(&mut p, r.wrapper, false)?;
                    }
                    Some(d0) => {
                        self.assign_item(&mut p, r.child, true)?;
                        self.assign_item(&mut p, r.wrapper, true)?;
                        for d in 1..r.c {
                            p.set_raw(r.obl_start + (d - 1) as usize, d == d0 - 1)?;
                        }
                    }
                    None if a.get(r.item) => {
                        self.assign_item(&mut p, r.child, true)?;
                        self.assign_item(&mut p, r.wrapper, true)?;
                    }
                    None => {}
                }
            }
            // Unconstrained families: forced halves only.
            for r in &self.uncon_f {
                if !a.get(r.item) {
                    self.assign_item(&mut p, r.item, false)?;
                    self.assign_item(&mut p, r.child, false)?;
                }
            }
            for r in &self.uncon_g {
                if a.get(r.item) {
                    self.assign_item(&mut p, r.item, true)?;
                    self.assign_item(&mut p, r.child, true)?;
                }
            }
            Ok(())
        };
        if run().is_err() {
            return Ok(Vec::new());
        }
        let letter_ok = |b: &Atom| letter.is_none_or(|m| self.letter_of(b) == m);
        self.complete(&p, |b| {
            letter_ok(b) && self.is_atom(b) && is_succ(self, a, b)
        })
    }

    /// Position-0 atoms with the given propositional content and pins.
    pub(crate) fn initial_atoms(
        &self,
        letter: Option<u32>,
        pins: &[(usize, bool)],
    ) -> Result<Vec<Atom>, TableauError> {
        let n = self.items.len();
        let mut p = Partial::new(self.total_bits);
        let mut run = || -> Result<(), Conflict> {
            if let Some(m) = letter {
                self.pin_letter(&mut p, m)?;
            }
            for &(it, v) in pins {
                self.assign_item(&mut p, it, v)?;
            }
            for (i, item) in self.items.iter().enumerate() {
                if let ItemKind::Temp { op: TempOp::P, .. } = item.kind {
                    self.assign_item(&mut p, i, false)?;
                }
            }
            for (k, ob) in self.obligations.iter().enumerate() {
                if let ItemKind::Temp {
                    op: TempOp::P | TempOp::H,
                    ..
                } = self.items[ob.carrier].kind
                {
                    p.set_raw(n + k, false)?;
                }
            }
            Ok(())
        };
        if run().is_err() {
            return Ok(Vec::new());
        }
        let letter_ok = |b: &Atom| letter.is_none_or(|m| self.letter_of(b) == m);
        self.complete(&p, |b| {
            letter_ok(b) && self.is_atom(b) && self.is_initial(b)
        })
    }
}

// ---------------------------------------------------------------------------
// Finite-prefix checking of atom sequences
// ---------------------------------------------------------------------------

/// A finitely-checkable defect of an atom-sequence prefix. Fairness and
/// binder witnessing are not prefix-checkable and are intentionally outside
/// this report; an empty list means every locally checkable condition holds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// The bitset at this index fails the atom axioms.
    InvalidAtom { pos: usize },
    /// The first atom asserts past content.
    FirstNotInitial,
    /// The anchor position lies in the prefix but does not carry the variable.
    VarMissing { pos: usize },
    /// The variable is asserted away from the anchor position.
    VarUnexpected { pos: usize },
    /// Atom propositions disagree with the trace letter at this position.
    LetterMismatch { pos: usize },
    /// The atom at `pos + 1` cannot follow the atom at `pos`.
    NotSuccessor { pos: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::InvalidAtom { pos } => write!(f, "set at index {pos} is not an atom"),
            Violation::FirstNotInitial => write!(f, "atom at index 0 asserts past content"),
            Violation::VarMissing { pos } => {
                write!(f, "anchor position {pos} does not carry the variable")
            }
            Violation::VarUnexpected { pos } => {
                write!(f, "variable asserted at non-anchor position {pos}")
            }
            Violation::LetterMismatch { pos } => {
                write!(f, "atom propositions disagree with trace letter at {pos}")
            }
            Violation::NotSuccessor { pos } => {
                write!(f, "atom at index {} cannot follow atom at index {pos}", pos + 1)
            }
        }
    }
}

/// Check every finitely-decidable sequence condition on a prefix: axiom
/// validity per atom, position-0 shape, variable placement against the
/// anchor `anchor`, propositional consistency with the trace, and the step
/// relation between neighbours. Fairness and binder witnessing are beyond
/// finite prefixes and are not part of the verdict.
pub fn check_sequence_prefix(
    cl: &Closure,
    rho: &[Atom],
    w: &LassoTrace,
    anchor: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, a) in rho.iter().enumerate() {
        if !cl.is_atom(a) {
            out.push(Violation::InvalidAtom { pos: i });
        }
    }
    if let Some(first) = rho.first() {
        if !cl.is_initial(first) {
            out.push(Violation::FirstNotInitial);
        }
    }
    for (i, a) in rho.iter().enumerate() {
        let has_var = a.get(cl.var_item);
        if i == anchor && !has_var {
            out.push(Violation::VarMissing { pos: i });
        }
        if i != anchor && has_var {
            out.push(Violation::VarUnexpected { pos: i });
        }
    }
    for (i, a) in rho.iter().enumerate() {
        let want = cl.mask_of_letter(w.letter(i));
        if cl.letter_of(a) != want {
            out.push(Violation::LetterMismatch { pos: i });
        }
    }
    for i in 0..rho.len().saturating_sub(1) {
        if !is_succ(cl, &rho[i], &rho[i + 1]) {
            out.push(Violation::NotSuccessor { pos: i });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Scope graph: one closure per binder body (and its dual), shared pool
// ---------------------------------------------------------------------------

pub(crate) type ScopeId = usize;

/// A binder body pair tracked across the scope graph: `pos` is the
/// numerically smaller pool id of the two dual bodies.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TrackPair {
    pub pos: NodeId,
    pub neg: NodeId,
}

/// Per-scope data: the closure of the scope formula plus, for each binder
/// item in the closure, which global track it asserts and with which
/// polarity.
pub(crate) struct ScopeData {
    pub formula_id: NodeId,
    pub closure: Closure,
    /// (closure item index of the binder formula, track index, polarity):
    /// the item asserts "track value == polarity".
    pub binder_tracks: Vec<(usize, usize, bool)>,
    /// Closure item indices of the positive/negative body-pair formulas for
    /// each track whose bodies this scope *is* (only set on non-root scopes).
    pub own_track: Option<usize>,
}

/// The full scope graph of a sentence: the root scope plus one scope per
/// binder-body dual pair, all sharing one formula pool and one alphabet.
pub(crate) struct Universe {
    pub pool: FormulaPool,
    pub scopes: Vec<ScopeData>,
    pub tracks: Vec<TrackPair>,
    pub ap: Vec<String>,
}

impl Universe {
    /// Build the scope graph for `phi` (validated normal-form one-variable
    /// point formula). The alphabet is the proposition set of `phi` and is
    /// shared by every scope.
    pub(crate) fn build(phi: &Formula, mode: WrapperMode) -> Result<Universe, TableauError> {
        validate(phi)?;
        let mut pool = FormulaPool::new();
        let root = pool.intern(phi);
        let ap = phi.props();

        let mut tracks: Vec<TrackPair> = Vec::new();
        let mut track_of_body: HashMap<NodeId, usize> = HashMap::new();
        let mut scopes = Vec::new();
        let mut queue: Vec<(NodeId, Option<usize>)> = vec![(root, None)];
        let mut qi = 0;
        while qi < queue.len() {
            let (formula_id, own_track) = queue[qi];
            qi += 1;
            let closure = build_closure(&mut pool, formula_id, &ap, mode);
            let mut binder_tracks = Vec::new();
            for &bi in &closure.binder_items {
                let body = match pool.nodes[closure.items[bi].pool_id as usize] {
                    Node::Binder(b) => b,
                    _ => unreachable!(),
                };
                let track = match track_of_body.get(&body) {
                    Some(&t) => t,
                    None => {
                        let dual = pool.dual(body);
                        let pair = TrackPair {
                            pos: body.min(dual),
                            neg: body.max(dual),
                        };
                        let t = tracks.len();
                        tracks.push(pair);
                        track_of_body.insert(pair.pos, t);
                        track_of_body.insert(pair.neg, t);
                        queue.push((pair.pos, Some(t)));
                        t
                    }
                };
                let polarity = body == tracks[track].pos;
                binder_tracks.push((bi, track, polarity));
            }
            scopes.push(ScopeData {
                formula_id,
                closure,
                binder_tracks,
                own_track,
            });
        }
        Ok(Universe {
            pool,
            scopes,
            tracks,
            ap,
        })
    }

    /// Scope index checking a given track (scope 1 + discovery order).
    pub(crate) fn scope_of_track(&self, track: usize) -> ScopeId {
        self.scopes
            .iter()
            .position(|s| s.own_track == Some(track))
            .expect("every track has a scope")
    }

    /// Sum over scopes of exact atom counts (None on overflow).
    pub(crate) fn total_atom_count(&self) -> Option<u128> {
        let mut total: u128 = 0;
        for s in &self.scopes {
            total = total.checked_add(s.closure.atom_count()?)?;
        }
        Some(total)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
