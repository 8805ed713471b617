//! Brute-force evaluator for interval formulas. Truth is computed bottom-up
//! over every interval `[lo,hi]` with `hi < horizon`, one dense bit table per
//! distinct subformula. Right-unbounded witness searches treat the final
//! loop-width band of the grid as class representatives of everything
//! beyond: an endpoint `z ≥ horizon` folds back to
//! `band_start + (z − band_start) mod |v|`, which names an interval with the
//! same eventual behaviour once truth values have become loop-periodic. The
//! caller-facing entry point evaluates at both `h` and `2h` and reports
//! instability instead of guessing when the two grids disagree on the query.

use super::EvalError;
use crate::syntax::{CmpOp, Formula, Relation};
use crate::trace::{Interval, LassoTrace};
use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Hash)]
enum DNode {
    Top,
    Prop(usize),
    Not(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Modal {
        rel: Relation,
        universal: bool,
        lmin_off: i64,
        lmax_off: Option<i64>,
        child: usize,
    },
}

#[derive(Default)]
struct CompileMemo {
    by_addr: HashMap<usize, usize>,
    by_node: HashMap<DNode, usize>,
}

/// A compiled interval formula, reusable across traces and horizons.
pub struct DhsEvaluator {
    nodes: Vec<DNode>,
    aps: Vec<String>,
    root: usize,
}

impl DhsEvaluator {
    pub fn new(phi: &Formula) -> Result<Self, EvalError> {
        let mut ev = DhsEvaluator {
            nodes: Vec::new(),
            aps: Vec::new(),
            root: 0,
        };
        let mut memo = CompileMemo::default();
        ev.root = ev.compile(phi, &mut memo)?;
        Ok(ev)
    }

    /// Truth of the compiled formula on `i`, checked for stability at `2h`.
    pub fn eval(&self, w: &LassoTrace, i: Interval, horizon: usize) -> Result<bool, EvalError> {
        let min = w.prefix.len() + w.cycle.len();
        if horizon < min {
            return Err(EvalError::HorizonTooSmall { horizon, min });
        }
        if i.hi >= horizon {
            return Err(EvalError::OutOfWindow(i));
        }
        let at_h = self.grid(w, horizon);
        let at_2h = self.grid(w, 2 * horizon);
        let a = get_bit(&at_h[self.root], horizon, i.lo, i.hi);
        let b = get_bit(&at_2h[self.root], 2 * horizon, i.lo, i.hi);
        if a != b {
            return Err(EvalError::Unstable {
                horizon,
                doubled: 2 * horizon,
            });
        }
        Ok(a)
    }

    fn compile(&mut self, phi: &Formula, memo: &mut CompileMemo) -> Result<usize, EvalError> {
        // Shared children compile once (by address — translated formulas are
        // DAGs whose structural hash would walk the whole tree unfolding);
        // equal structure at different addresses still maps to one node via
        // the compiled form, whose hash only touches child ids.
        if let Some(&idx) = memo.by_addr.get(&(phi as *const Formula as usize)) {
            return Ok(idx);
        }
        let node = match phi {
            Formula::Top => DNode::Top,
            Formula::Prop(p) => DNode::Prop(self.ap_index(p)),
            Formula::Not(c) => DNode::Not(self.compile(c, memo)?),
            Formula::And(cs) => {
                let mut ids = Vec::with_capacity(cs.len());
                for c in cs {
                    ids.push(self.compile(c, memo)?);
                }
                DNode::And(ids)
            }
            Formula::Or(cs) => {
                let mut ids = Vec::with_capacity(cs.len());
                for c in cs {
                    ids.push(self.compile(c, memo)?);
                }
                DNode::Or(ids)
            }
            Formula::HsMod {
                rel,
                universal,
                constraint,
                child,
            } => {
                // Encode the constraint `|J| − |I| ∼ c` as bounds on the
                // witness length: |J| ∈ [|I| + lmin_off, |I| + lmax_off].
                let (lmin_off, lmax_off) = match constraint {
                    None => (i64::MIN, None),
                    Some(k) => match k.op {
                        CmpOp::Lt => (i64::MIN, Some(k.c - 1)),
                        CmpOp::Le => (i64::MIN, Some(k.c)),
                        CmpOp::Eq => (k.c, Some(k.c)),
                        CmpOp::Gt => (k.c + 1, None),
                        CmpOp::Ge => (k.c, None),
                    },
                };
                DNode::Modal {
                    rel: *rel,
                    universal: *universal,
                    lmin_off,
                    lmax_off,
                    child: self.compile(child, memo)?,
                }
            }
            Formula::Var(_) | Formula::ChlTemp { .. } | Formula::Binder { .. } | Formula::Swap { .. } => {
                return Err(EvalError::NotInterval)
            }
        };
        let idx = match memo.by_node.get(&node) {
            Some(&idx) => idx,
            None => {
                self.nodes.push(node.clone());
                let idx = self.nodes.len() - 1;
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

    /// One bit table per node over all intervals with `hi < h`.
    fn grid(&self, w: &LassoTrace, h: usize) -> Vec<Vec<u64>> {
        let words = (h * h).div_ceil(64);
        let band_start = h - w.cycle.len();
        // Per-proposition truth at each position of the window.
        let ap_at: Vec<Vec<bool>> = self
            .aps
            .iter()
            .map(|a| (0..h).map(|pos| w.letter(pos).contains(a)).collect())
            .collect();
        let valid = valid_mask(h, words);
        let mut tables: Vec<Vec<u64>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let table = match node {
                DNode::Top => valid.clone(),
                DNode::Prop(a) => {
                    let truth = &ap_at[*a];
                    let mut t = vec![0u64; words];
                    for lo in 0..h {
                        for (hi, &holds) in truth.iter().enumerate().skip(lo) {
                            if !holds {
                                break;
                            }
                            set_bit(&mut t, h, lo, hi);
                        }
                    }
                    t
                }
                DNode::Not(c) => complement(&tables[*c], &valid),
                DNode::And(ids) => {
                    let mut t = tables[ids[0]].clone();
                    for id in &ids[1..] {
                        for (dst, src) in t.iter_mut().zip(&tables[*id]) {
                            *dst &= *src;
                        }
                    }
                    t
                }
                DNode::Or(ids) => {
                    let mut t = tables[ids[0]].clone();
                    for id in &ids[1..] {
                        for (dst, src) in t.iter_mut().zip(&tables[*id]) {
                            *dst |= *src;
                        }
                    }
                    t
                }
                DNode::Modal {
                    rel,
                    universal,
                    lmin_off,
                    lmax_off,
                    child,
                } => {
                    if *universal {
                        let flipped = complement(&tables[*child], &valid);
                        let wit = witnesses(&flipped, h, band_start, w.cycle.len(), *rel, *lmin_off, *lmax_off);
                        complement(&wit, &valid)
                    } else {
                        witnesses(&tables[*child], h, band_start, w.cycle.len(), *rel, *lmin_off, *lmax_off)
                    }
                }
            };
            tables.push(table);
        }
        tables
    }
}

fn bit_index(h: usize, lo: usize, hi: usize) -> usize {
    lo * h + hi
}

fn get_bit(t: &[u64], h: usize, lo: usize, hi: usize) -> bool {
    let b = bit_index(h, lo, hi);
    t[b / 64] >> (b % 64) & 1 == 1
}

fn set_bit(t: &mut [u64], h: usize, lo: usize, hi: usize) {
    let b = bit_index(h, lo, hi);
    t[b / 64] |= 1 << (b % 64);
}

fn valid_mask(h: usize, words: usize) -> Vec<u64> {
    let mut t = vec![0u64; words];
    for lo in 0..h {
        for hi in lo..h {
            set_bit(&mut t, h, lo, hi);
        }
    }
    t
}

fn complement(t: &[u64], valid: &[u64]) -> Vec<u64> {
    t.iter().zip(valid).map(|(a, v)| !a & v).collect()
}

/// Witness search: the table of `∃J. I R J ∧ |J| ∈ [|I|+lmin, |I|+lmax] ∧ J ∈ child`.
fn witnesses(
    child: &[u64],
    h: usize,
    band_start: usize,
    loop_len: usize,
    rel: Relation,
    lmin_off: i64,
    lmax_off: Option<i64>,
) -> Vec<u64> {
    let words = (h * h).div_ceil(64);
    let mut out = vec![0u64; words];
    let needs_rows = matches!(
        rel,
        Relation::A | Relation::L | Relation::B | Relation::BBar | Relation::D | Relation::DBar | Relation::O
    );
    // Cumulative counts along each row (fixed lo) or column (fixed hi) of the
    // child table make range-emptiness queries O(1).
    let cum: Vec<u32> = if needs_rows {
        let mut c = vec![0u32; h * h];
        for lo in 0..h {
            let mut run = 0u32;
            for hi in lo..h {
                run += get_bit(child, h, lo, hi) as u32;
                c[lo * h + hi] = run;
            }
        }
        c
    } else {
        let mut c = vec![0u32; h * h];
        for hi in 0..h {
            let mut run = 0u32;
            for lo in 0..=hi {
                run += get_bit(child, h, lo, hi) as u32;
                c[hi * h + lo] = run;
            }
        }
        c
    };
    let row_range = |lo: usize, a: i64, b: i64| -> bool {
        let a = a.max(lo as i64);
        let b = b.min(h as i64 - 1);
        if a > b {
            return false;
        }
        let (a, b) = (a as usize, b as usize);
        let below = if a > lo { cum[lo * h + a - 1] } else { 0 };
        cum[lo * h + b] > below
    };
    let col_range = |hi: usize, a: i64, b: i64| -> bool {
        let a = a.max(0);
        let b = b.min(hi as i64);
        if a > b {
            return false;
        }
        let (a, b) = (a as usize, b as usize);
        let below = if a > 0 { cum[hi * h + a - 1] } else { 0 };
        cum[hi * h + b] > below
    };
    let fold = |z: i64| -> usize { band_start + ((z as usize - band_start) % loop_len) };
    // Row search with a right-unbounded or beyond-window endpoint range.
    let row_far = |lo: usize, zlo: i64, zhi: Option<i64>| -> bool {
        let explicit_hi = zhi.map_or(h as i64 - 1, |b| b.min(h as i64 - 1));
        if row_range(lo, zlo, explicit_hi) {
            return true;
        }
        match zhi {
            // Far endpoints reach every fold class of the band.
            None => row_range(lo, band_start as i64, h as i64 - 1),
            Some(b) if b >= h as i64 => {
                let start = zlo.max(h as i64);
                for k in 0..loop_len as i64 {
                    let z = start + k;
                    if z > b {
                        break;
                    }
                    let zb = fold(z);
                    if zb >= lo && get_bit(child, h, lo, zb) {
                        return true;
                    }
                }
                false
            }
            _ => false,
        }
    };
    for x in 0..h {
        for y in x..h {
            let ilen = (y - x + 1) as i64;
            let lmin = lmin_off.saturating_add(ilen).max(1);
            let lmax = lmax_off.map(|m| m + ilen);
            if let Some(m) = lmax {
                if m < lmin {
                    continue;
                }
            }
            let (xi, yi) = (x as i64, y as i64);
            let hit = match rel {
                // J = [y, z]: shares the right-extension point.
                Relation::A => row_far(y, yi + lmin - 1, lmax.map(|m| yi + m - 1)),
                // J = [v, x]: ends where I begins.
                Relation::ABar => {
                    let vlo = lmax.map_or(0, |m| xi - m + 1);
                    col_range(x, vlo, xi - lmin + 1)
                }
                // J entirely to the right: scan start points, including the
                // band rows that stand in for starts beyond the window.
                Relation::L => {
                    let vstart = (y + 1).min(band_start);
                    (vstart..h).any(|v| {
                        let vi = v as i64;
                        row_far(v, vi + lmin - 1, lmax.map(|m| vi + m - 1))
                    })
                }
                // J entirely to the left.
                Relation::LBar => (0..x).any(|z| {
                    let zi = z as i64;
                    col_range(z, lmax.map_or(0, |m| zi - m + 1), zi - lmin + 1)
                }),
                // J = [x, z], z < y: proper prefix.
                Relation::B => {
                    let zhi = lmax.map_or(yi - 1, |m| (xi + m - 1).min(yi - 1));
                    row_range(x, xi + lmin - 1, zhi)
                }
                // J = [x, z], z > y: right extension.
                Relation::BBar => row_far(x, (xi + lmin - 1).max(yi + 1), lmax.map(|m| xi + m - 1)),
                // J = [v, y], v > x: proper suffix.
                Relation::E => {
                    let vlo = lmax.map_or(xi + 1, |m| (yi - m + 1).max(xi + 1));
                    col_range(y, vlo, yi - lmin + 1)
                }
                // J = [v, y], v < x: left extension.
                Relation::EBar => {
                    let vlo = lmax.map_or(0, |m| yi - m + 1);
                    col_range(y, vlo, (yi - lmin + 1).min(xi - 1))
                }
                // J strictly inside I.
                Relation::D => (x + 1..y).any(|v| {
                    let vi = v as i64;
                    let zhi = lmax.map_or(yi - 1, |m| (vi + m - 1).min(yi - 1));
                    row_range(v, vi + lmin - 1, zhi)
                }),
                // I strictly inside J.
                Relation::DBar => (0..x).any(|v| {
                    let vi = v as i64;
                    row_far(v, (vi + lmin - 1).max(yi + 1), lmax.map(|m| vi + m - 1))
                }),
                // J starts inside I and ends past it.
                Relation::O => (x + 1..y).any(|v| {
                    let vi = v as i64;
                    row_far(v, (vi + lmin - 1).max(yi + 1), lmax.map(|m| vi + m - 1))
                }),
                // J starts before I and ends inside it.
                Relation::OBar => (x + 1..y).any(|z| {
                    let zi = z as i64;
                    col_range(z, lmax.map_or(0, |m| zi - m + 1), (zi - lmin + 1).min(xi - 1))
                }),
            };
            if hit {
                set_bit(&mut out, h, x, y);
            }
        }
    }
    out
}
