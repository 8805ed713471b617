//! Brute-force evaluator for point formulas with position variables. Each
//! distinct (subformula, valuation) pair gets one truth bit-vector over a
//! finite window of positions. Window edges are handled in two ways:
//!
//! * variable-free subformulas are loop-periodic past a transient, so
//!   far-future witness searches treat the window's last loop-width band as
//!   representatives of everything beyond (positions fold back by the loop
//!   length);
//! * a binder or swap diagonal (truth as a function of the position stored
//!   into the variable) is also eventually loop-periodic, so the engine
//!   computes it explicitly on a safely interior prefix, checks that the
//!   last two loop blocks of that prefix agree, and extends periodically.
//!
//! The explicit prefix of a diagonal must outlast its transient, and the
//! transient of a *nested* binder/swap grows with the positions the
//! enclosing diagonal loop stores into the variable. The prefixes are
//! therefore layered by nesting level: a level-`d` binder/swap (1 =
//! outermost) computes its diagonal on `[0, h + d·slack)`, so the valuations
//! it is driven at stay one slack zone below its own stability-check window.
//!
//! Subformulas that mention a pinned variable get no fold — a variable marks
//! one concrete position and is not periodic — and instead rely on the
//! window being padded generously past the requested horizon. Every public
//! entry point evaluates at both `h` and `2h` and reports instability rather
//! than guessing when the two disagree.

use super::{EvalError, Valuation};
use crate::syntax::{CmpOp, Formula, TempOp};
use crate::trace::{Interval, LassoTrace};
use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Hash)]
enum CNode {
    Top,
    Prop(usize),
    Var(u8),
    Not(u32),
    And(Vec<u32>),
    Or(Vec<u32>),
    /// Distance window: witnesses at distance `d ∈ [a, b]` from the current
    /// position (`b = None` means unbounded), in the direction of `op`.
    Temp {
        op: TempOp,
        a: i64,
        b: Option<i64>,
        child: u32,
    },
    Binder {
        var: u8,
        child: u32,
    },
    Swap {
        var: u8,
        child: u32,
    },
}

#[derive(Default)]
struct CompileMemo {
    by_addr: HashMap<usize, u32>,
    by_node: HashMap<CNode, u32>,
}

/// A compiled point formula, reusable across traces and horizons.
pub struct ChlEvaluator {
    nodes: Vec<CNode>,
    free: Vec<u8>,
    /// Binder/swap nesting level counted from the root (outermost = 1);
    /// 0 for other nodes.
    levels: Vec<u32>,
    aps: Vec<String>,
    vars: Vec<String>,
    root: u32,
    binder_depth: usize,
    slack_blocks: usize,
}

impl ChlEvaluator {
    pub fn new(phi: &Formula) -> Result<Self, EvalError> {
        let n_vars = phi.var_names().len();
        if n_vars > 2 {
            return Err(EvalError::TooManyVariables(n_vars));
        }
        let mut ev = ChlEvaluator {
            nodes: Vec::new(),
            free: Vec::new(),
            levels: Vec::new(),
            aps: Vec::new(),
            vars: Vec::new(),
            root: 0,
            binder_depth: 0,
            slack_blocks: 0,
        };
        let mut memo = CompileMemo::default();
        ev.root = ev.compile(phi, &mut memo)?;
        // Nodes are in post-order, so a single forward pass computes, for
        // each node, the deepest binder/swap chain below (and including) it;
        // the nesting level seen from the root is its complement.
        let mut below = vec![0u32; ev.nodes.len()];
        for (i, n) in ev.nodes.iter().enumerate() {
            below[i] = match n {
                CNode::Top | CNode::Prop(_) | CNode::Var(_) => 0,
                CNode::Not(c) | CNode::Temp { child: c, .. } => below[*c as usize],
                CNode::And(cs) | CNode::Or(cs) => {
                    cs.iter().map(|c| below[*c as usize]).max().unwrap_or(0)
                }
                CNode::Binder { child, .. } | CNode::Swap { child, .. } => {
                    1 + below[*child as usize]
                }
            };
        }
        ev.binder_depth = below[ev.root as usize] as usize;
        let total = below[ev.root as usize];
        ev.levels = ev
            .nodes
            .iter()
            .zip(&below)
            .map(|(n, b)| match n {
                CNode::Binder { .. } | CNode::Swap { .. } => total + 1 - b,
                _ => 0,
            })
            .collect();
        // Compiled nodes are deduplicated, so this is the number of distinct
        // temporal subformulas — repeated subtrees must not widen the window.
        let t = ev
            .nodes
            .iter()
            .filter(|n| matches!(n, CNode::Temp { .. }))
            .count()
            .max(1);
        let c = phi.max_constant().unsigned_abs() as usize;
        ev.slack_blocks = t * (c + 1) + 2;
        Ok(ev)
    }

    /// Truth at position `i` under valuation `g`, checked for stability at `2h`.
    pub fn eval(
        &self,
        w: &LassoTrace,
        i: usize,
        g: &Valuation,
        horizon: usize,
    ) -> Result<bool, EvalError> {
        let min = w.prefix.len() + w.cycle.len();
        if horizon < min {
            return Err(EvalError::HorizonTooSmall { horizon, min });
        }
        if i >= horizon {
            return Err(EvalError::OutOfWindow(Interval::new(i, i)));
        }
        let mut gv = [0u32; 2];
        for (k, name) in self.vars.iter().enumerate() {
            let v = g.get(name);
            if v >= horizon {
                return Err(EvalError::OutOfWindow(Interval::new(v, v)));
            }
            gv[k] = v as u32;
        }
        let a = self.run(w, horizon, gv, i)?;
        let b = self.run(w, 2 * horizon, gv, i)?;
        if a != b {
            return Err(EvalError::Unstable {
                horizon,
                doubled: 2 * horizon,
            });
        }
        Ok(a)
    }

    fn compile(&mut self, phi: &Formula, memo: &mut CompileMemo) -> Result<u32, EvalError> {
        // Two layers of deduplication: shared children are compiled once (by
        // address — formulas out of the translations are DAGs, and hashing a
        // node structurally would walk its whole tree unfolding), and equal
        // structure built at different addresses still maps to one node (by
        // the compiled form, whose hash only touches child ids).
        if let Some(&idx) = memo.by_addr.get(&(phi as *const Formula as usize)) {
            return Ok(idx);
        }
        let (node, free) = match phi {
            Formula::Top => (CNode::Top, 0),
            Formula::Prop(p) => (CNode::Prop(self.ap_index(p)), 0),
            Formula::Var(v) => {
                let k = self.var_index(v);
                (CNode::Var(k), 1 << k)
            }
            Formula::Not(c) => {
                let c = self.compile(c, memo)?;
                (CNode::Not(c), self.free[c as usize])
            }
            Formula::And(cs) | Formula::Or(cs) => {
                let mut ids = Vec::with_capacity(cs.len());
                let mut fr = 0;
                for c in cs {
                    let id = self.compile(c, memo)?;
                    fr |= self.free[id as usize];
                    ids.push(id);
                }
                if matches!(phi, Formula::And(_)) {
                    (CNode::And(ids), fr)
                } else {
                    (CNode::Or(ids), fr)
                }
            }
            Formula::ChlTemp { op, constraint, child } => {
                // Bounds on the distance d ≥ 1 between witness and current
                // position: future ops measure j − i, past ops i − j.
                let (a, b) = match constraint {
                    None => (1, None),
                    Some(k) => match k.op {
                        CmpOp::Lt => (1, Some(k.c - 1)),
                        CmpOp::Le => (1, Some(k.c)),
                        CmpOp::Eq => (k.c.max(1), Some(k.c)),
                        CmpOp::Gt => ((k.c + 1).max(1), None),
                        CmpOp::Ge => (k.c.max(1), None),
                    },
                };
                let c = self.compile(child, memo)?;
                (
                    CNode::Temp { op: *op, a, b, child: c },
                    self.free[c as usize],
                )
            }
            Formula::Binder { var, child } => {
                let k = self.var_index(var);
                let c = self.compile(child, memo)?;
                (CNode::Binder { var: k, child: c }, self.free[c as usize] & !(1 << k))
            }
            Formula::Swap { var, child } => {
                let k = self.var_index(var);
                let c = self.compile(child, memo)?;
                // The swap target position is read from the current value of
                // the variable, so the variable stays free.
                (CNode::Swap { var: k, child: c }, self.free[c as usize] | 1 << k)
            }
            Formula::HsMod { .. } => return Err(EvalError::NotPoint),
        };
        let idx = match memo.by_node.get(&node) {
            Some(&idx) => idx,
            None => {
                self.nodes.push(node.clone());
                self.free.push(free);
                let idx = (self.nodes.len() - 1) as u32;
                memo.by_node.insert(node, idx);
                idx
            }
        };
        memo.by_addr.insert(phi as *const Formula as usize, idx);
        Ok(idx)
    }

    fn ap_index(&mut self, p: &str) -> usize {
        if let Some(i) = self.aps.iter().position(|a| a == p) {
            i
        } else {
            self.aps.push(p.to_string());
            self.aps.len() - 1
        }
    }

    fn var_index(&mut self, v: &str) -> u8 {
        if let Some(i) = self.vars.iter().position(|x| x == v) {
            i as u8
        } else {
            self.vars.push(v.to_string());
            (self.vars.len() - 1) as u8
        }
    }

    fn run(&self, w: &LassoTrace, h: usize, gv: [u32; 2], at: usize) -> Result<bool, EvalError> {
        let loop_len = w.cycle.len();
        let slack = self.slack_blocks * loop_len;
        // Window = requested horizon + one slack zone per binder level: the
        // explicit part of each diagonal must stay clear of the zone it
        // periodically extends.
        let width = h + (self.binder_depth + 1) * slack + 2 * loop_len;
        let mut ctx = Ctx {
            nodes: &self.nodes,
            free: &self.free,
            levels: &self.levels,
            w: width,
            words: width.div_ceil(64),
            loop_len,
            band_start: width - loop_len,
            slack,
            base: h,
            ap_bits: self
                .aps
                .iter()
                .map(|a| {
                    let mut bits = vec![0u64; width.div_ceil(64)];
                    for pos in 0..width {
                        if w.letter(pos).contains(a) {
                            bits[pos / 64] |= 1 << (pos % 64);
                        }
                    }
                    bits
                })
                .collect(),
            arena: Vec::new(),
            memo: HashMap::new(),
        };
        let idx = ctx.eval(self.root, gv)?;
        Ok(ctx.bit(idx, at))
    }
}

struct Ctx<'a> {
    nodes: &'a [CNode],
    free: &'a [u8],
    levels: &'a [u32],
    w: usize,
    words: usize,
    loop_len: usize,
    band_start: usize,
    slack: usize,
    /// Requested horizon; binder/swap diagonals at nesting level `d` are
    /// explicit on `[0, base + d·slack)`.
    base: usize,
    ap_bits: Vec<Vec<u64>>,
    arena: Vec<Vec<u64>>,
    memo: HashMap<u64, usize>,
}

impl Ctx<'_> {
    fn eval(&mut self, node: u32, gv: [u32; 2]) -> Result<usize, EvalError> {
        let fr = self.free[node as usize];
        let key = (node as u64) << 42
            | (if fr & 1 != 0 { gv[0] as u64 + 1 } else { 0 }) << 21
            | (if fr & 2 != 0 { gv[1] as u64 + 1 } else { 0 });
        if let Some(&idx) = self.memo.get(&key) {
            return Ok(idx);
        }
        let var_free = fr == 0;
        let vec = match &self.nodes[node as usize] {
            CNode::Top => self.ones(),
            CNode::Prop(a) => self.ap_bits[*a].clone(),
            CNode::Var(k) => {
                let mut v = vec![0u64; self.words];
                let pos = gv[*k as usize] as usize;
                if pos < self.w {
                    v[pos / 64] |= 1 << (pos % 64);
                }
                v
            }
            CNode::Not(c) => {
                let c = self.eval(*c, gv)?;
                self.complement(&self.arena[c].clone())
            }
            CNode::And(cs) => {
                let ids: Result<Vec<usize>, _> = cs.clone().iter().map(|c| self.eval(*c, gv)).collect();
                let ids = ids?;
                let mut v = self.arena[ids[0]].clone();
                for id in &ids[1..] {
                    for (d, s) in v.iter_mut().zip(&self.arena[*id]) {
                        *d &= *s;
                    }
                }
                v
            }
            CNode::Or(cs) => {
                let ids: Result<Vec<usize>, _> = cs.clone().iter().map(|c| self.eval(*c, gv)).collect();
                let ids = ids?;
                let mut v = self.arena[ids[0]].clone();
                for id in &ids[1..] {
                    for (d, s) in v.iter_mut().zip(&self.arena[*id]) {
                        *d |= *s;
                    }
                }
                v
            }
            CNode::Temp { op, a, b, child } => {
                let (op, a, b, child) = (*op, *a, *b, *child);
                let cid = self.eval(child, gv)?;
                let cv = self.arena[cid].clone();
                match op {
                    TempOp::F => self.exists_future(&cv, a, b, var_free),
                    TempOp::P => self.exists_past(&cv, a, b),
                    TempOp::G => {
                        let nc = self.complement(&cv);
                        let e = self.exists_future(&nc, a, b, var_free);
                        self.complement(&e)
                    }
                    TempOp::H => {
                        let nc = self.complement(&cv);
                        let e = self.exists_past(&nc, a, b);
                        self.complement(&e)
                    }
                }
            }
            CNode::Binder { var, child } => {
                let (var, child) = (*var, *child);
                let t0 = self.diag_end(node);
                let mut v = vec![0u64; self.words];
                for i in 0..t0 {
                    let mut g2 = gv;
                    g2[var as usize] = i as u32;
                    let cid = self.eval(child, g2)?;
                    if self.bit(cid, i) {
                        v[i / 64] |= 1 << (i % 64);
                    }
                }
                self.extend_diagonal(&mut v, t0)?;
                v
            }
            CNode::Swap { var, child } => {
                let (var, child) = (*var, *child);
                let target = gv[var as usize] as usize;
                let t0 = self.diag_end(node);
                let mut v = vec![0u64; self.words];
                for i in 0..t0 {
                    let mut g2 = gv;
                    g2[var as usize] = i as u32;
                    let cid = self.eval(child, g2)?;
                    if self.bit(cid, target) {
                        v[i / 64] |= 1 << (i % 64);
                    }
                }
                self.extend_diagonal(&mut v, t0)?;
                v
            }
        };
        self.arena.push(vec);
        let idx = self.arena.len() - 1;
        self.memo.insert(key, idx);
        Ok(idx)
    }

    fn bit(&self, idx: usize, i: usize) -> bool {
        self.arena[idx][i / 64] >> (i % 64) & 1 == 1
    }

    fn ones(&self) -> Vec<u64> {
        let mut v = vec![!0u64; self.words];
        self.mask(&mut v);
        v
    }

    fn mask(&self, v: &mut [u64]) {
        let used = self.w % 64;
        if used != 0 {
            v[self.words - 1] &= (1u64 << used) - 1;
        }
    }

    fn complement(&self, v: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = v.iter().map(|x| !x).collect();
        self.mask(&mut out);
        out
    }

    /// `res[i] = ∃j = i + d, d ∈ [a,b]: child[j]`, folding far witnesses
    /// back into the band for loop-periodic (variable-free) children.
    fn exists_future(&self, child: &[u64], a: i64, b: Option<i64>, var_free: bool) -> Vec<u64> {
        let w = self.w as i64;
        let cnt = inclusive_counts(child, self.w);
        let range_any = |lo: i64, hi: i64| -> bool {
            let lo = lo.max(0);
            let hi = hi.min(w - 1);
            lo <= hi && cnt[hi as usize + 1] > cnt[lo as usize]
        };
        let band_any = range_any(self.band_start as i64, w - 1);
        let mut out = vec![0u64; self.words];
        for i in 0..self.w {
            let lo = i as i64 + a;
            let hit = match b {
                None => {
                    range_any(lo, w - 1) || (var_free && band_any)
                }
                Some(b) => {
                    let hi = i as i64 + b;
                    if range_any(lo, hi.min(w - 1)) {
                        true
                    } else if var_free && hi >= w {
                        // A bounded range reaching past the window touches at
                        // most one copy of each fold class.
                        let start = lo.max(w);
                        (0..self.loop_len as i64).any(|k| {
                            let j = start + k;
                            j <= hi && {
                                let jb = self.band_start + (j as usize - self.band_start) % self.loop_len;
                                child[jb / 64] >> (jb % 64) & 1 == 1
                            }
                        })
                    } else {
                        false
                    }
                }
            };
            if hit {
                out[i / 64] |= 1 << (i % 64);
            }
        }
        out
    }

    /// `res[i] = ∃j = i − d, d ∈ [a,b]: child[j]`; the past is bounded by
    /// position 0, so no fold is involved.
    fn exists_past(&self, child: &[u64], a: i64, b: Option<i64>) -> Vec<u64> {
        let w = self.w as i64;
        let cnt = inclusive_counts(child, self.w);
        let mut out = vec![0u64; self.words];
        for i in 0..self.w {
            let hi = i as i64 - a;
            let lo = b.map_or(0, |b| i as i64 - b).max(0);
            if lo <= hi.min(w - 1) && cnt[hi.min(w - 1) as usize + 1] > cnt[lo as usize] {
                out[i / 64] |= 1 << (i % 64);
            }
        }
        out
    }

    /// Where the explicit part of this binder/swap node's diagonal ends:
    /// one slack zone per nesting level past the requested horizon, so the
    /// stability-check window sits clear of the transient driven by the
    /// enclosing diagonal loops.
    fn diag_end(&self, node: u32) -> usize {
        let t0 = self.base + self.levels[node as usize] as usize * self.slack;
        debug_assert!(t0 + self.loop_len <= self.w);
        t0.min(self.w - self.loop_len)
    }

    /// Replace the tail `[t0, w)` of a binder/swap diagonal by the periodic
    /// extension of the explicit prefix `[0, t0)`, after checking that the
    /// prefix has actually become periodic (its last two loop blocks agree).
    fn extend_diagonal(&self, v: &mut [u64], t0: usize) -> Result<(), EvalError> {
        let l = self.loop_len;
        if t0 < 2 * l {
            return Err(EvalError::Unstable {
                horizon: self.w,
                doubled: 2 * self.w,
            });
        }
        let bit = |v: &[u64], i: usize| v[i / 64] >> (i % 64) & 1 == 1;
        for k in 0..l {
            if bit(v, t0 - 2 * l + k) != bit(v, t0 - l + k) {
                return Err(EvalError::Unstable {
                    horizon: self.w,
                    doubled: 2 * self.w,
                });
            }
        }
        for i in t0..self.w {
            let rep = t0 - l + (i - (t0 - l)) % l;
            if bit(v, rep) {
                v[i / 64] |= 1 << (i % 64);
            } else {
                v[i / 64] &= !(1 << (i % 64));
            }
        }
        Ok(())
    }
}

fn inclusive_counts(bits: &[u64], n: usize) -> Vec<u32> {
    let mut cnt = vec![0u32; n + 1];
    for i in 0..n {
        cnt[i + 1] = cnt[i] + (bits[i / 64] >> (i % 64) & 1) as u32;
    }
    cnt
}
