//! Finite Kripke structures with left-total transition relations, and
//! bounded enumeration of their lasso-shaped paths.
//!
//! Text format, one declaration per line (`#` starts a comment):
//! ```text
//! state s0 {p,q}
//! state s1 {}
//! init s0
//! edge s0 s1
//! edge s1 s0
//! ```

use crate::trace::{fmt_letter, parse_letter_body, LassoTrace, Letter};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KripkeStructure {
    /// State names, indexable.
    pub states: Vec<String>,
    pub labels: Vec<Letter>,
    /// Adjacency lists over state indices, each nonempty (left-total).
    pub edges: Vec<Vec<usize>>,
    pub init: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("bad Kripke structure: {0}")]
pub struct KripkeParseError(pub String);

impl KripkeStructure {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn parse(text: &str) -> Result<Self, KripkeParseError> {
        let mut states: Vec<String> = Vec::new();
        let mut labels: Vec<Letter> = Vec::new();
        let mut edge_decls: Vec<(String, String)> = Vec::new();
        let mut init: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| KripkeParseError(format!("line {}: {msg}", no + 1));
            let mut words = line.split_whitespace();
            match words.next().unwrap() {
                "state" => {
                    let name = words
                        .next()
                        .ok_or_else(|| err("missing state name".into()))?;
                    let label_src: String = words.collect::<Vec<_>>().join(" ");
                    let label_src = label_src.trim();
                    let inner = label_src
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| err(format!("state `{name}` needs a {{...}} label")))?;
                    let label =
                        parse_letter_body(inner).map_err(|e| err(e.to_string()))?;
                    if states.iter().any(|s| s == name) {
                        return Err(err(format!("duplicate state `{name}`")));
                    }
                    states.push(name.to_string());
                    labels.push(label);
                }
                "init" => {
                    let name = words
                        .next()
                        .ok_or_else(|| err("missing initial state name".into()))?;
                    if init.replace(name.to_string()).is_some() {
                        return Err(err("duplicate init declaration".into()));
                    }
                }
                "edge" => {
                    let from = words
                        .next()
                        .ok_or_else(|| err("missing edge source".into()))?;
                    let to = words
                        .next()
                        .ok_or_else(|| err("missing edge target".into()))?;
                    edge_decls.push((from.to_string(), to.to_string()));
                }
                other => return Err(err(format!("unknown declaration `{other}`"))),
            }
        }
        let init = init.ok_or_else(|| KripkeParseError("missing init declaration".into()))?;
        let mut k = KripkeStructure {
            edges: vec![Vec::new(); states.len()],
            init: 0,
            states,
            labels,
        };
        k.init = k
            .state_index(&init)
            .ok_or_else(|| KripkeParseError(format!("unknown initial state `{init}`")))?;
        for (from, to) in edge_decls {
            let f = k
                .state_index(&from)
                .ok_or_else(|| KripkeParseError(format!("edge from unknown state `{from}`")))?;
            let t = k
                .state_index(&to)
                .ok_or_else(|| KripkeParseError(format!("edge to unknown state `{to}`")))?;
            if !k.edges[f].contains(&t) {
                k.edges[f].push(t);
            }
        }
        for (i, succs) in k.edges.iter().enumerate() {
            if succs.is_empty() {
                return Err(KripkeParseError(format!(
                    "state `{}` has no outgoing edge (transition relation must be left-total)",
                    k.states[i]
                )));
            }
        }
        Ok(k)
    }
}

impl fmt::Display for KripkeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, l) in self.states.iter().zip(&self.labels) {
            write!(f, "state {s} ")?;
            fmt_letter(l, f)?;
            writeln!(f)?;
        }
        writeln!(f, "init {}", self.states[self.init])?;
        for s in 0..self.states.len() {
            for &t in &self.edges[s] {
                writeln!(f, "edge {} {}", self.states[s], self.states[t])?;
            }
        }
        Ok(())
    }
}

/// A lasso-shaped path of a Kripke structure: `prefix · cycleᵂ` over state
/// indices, with an edge from the last cycle state back to the first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LassoPath {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl LassoPath {
    pub fn trace(&self, k: &KripkeStructure) -> LassoTrace {
        LassoTrace::new(
            self.prefix.iter().map(|&s| k.labels[s].clone()).collect(),
            self.cycle.iter().map(|&s| k.labels[s].clone()).collect(),
        )
    }
}

/// Depth-first enumeration of all lasso paths from the initial state with
/// `|prefix| <= max_prefix` and `1 <= |cycle| <= max_cycle`. Deterministic
/// order; streaming (paths are produced one at a time).
pub fn kripke_lasso_paths(
    k: &KripkeStructure,
    max_prefix: usize,
    max_cycle: usize,
) -> LassoPathIter<'_> {
    assert!(max_cycle >= 1, "cycle bound must be at least 1");
    LassoPathIter {
        k,
        max_prefix,
        max_cycle,
        path: vec![k.init],
        succ_pos: vec![0],
        pending_loopback: Some(0),
    }
}

/// Bounded enumeration of the traces of lasso paths; the same infinite word
/// may appear under several prefix/cycle splits, mirroring the underlying
/// paths.
pub fn kripke_lassos(
    k: &KripkeStructure,
    max_prefix: usize,
    max_cycle: usize,
) -> impl Iterator<Item = LassoTrace> + '_ {
    kripke_lasso_paths(k, max_prefix, max_cycle).map(|p| p.trace(k))
}

pub struct LassoPathIter<'a> {
    k: &'a KripkeStructure,
    max_prefix: usize,
    max_cycle: usize,
    /// Current DFS path, starting at the initial state.
    path: Vec<usize>,
    /// Per-level position in the successor list (next child to explore).
    succ_pos: Vec<usize>,
    /// Next loopback index to try for the current path.
    pending_loopback: Option<usize>,
}

impl LassoPathIter<'_> {
    fn emit(&self, j: usize) -> LassoPath {
        LassoPath {
            prefix: self.path[..j].to_vec(),
            cycle: self.path[j..].to_vec(),
        }
    }
}

impl Iterator for LassoPathIter<'_> {
    type Item = LassoPath;

    fn next(&mut self) -> Option<LassoPath> {
        loop {
            if self.path.is_empty() {
                return None;
            }
            let n = self.path.len() - 1;
            let last = self.path[n];
            // First drain loopbacks of the current path: indices j with
            // cycle length n-j+1 <= max_cycle, prefix length j <= max_prefix,
            // and an edge back from the last state to path[j].
            if let Some(j0) = self.pending_loopback {
                let j_min = (n + 1).saturating_sub(self.max_cycle);
                for j in j0.max(j_min)..=n.min(self.max_prefix) {
                    if self.k.edges[last].contains(&self.path[j]) {
                        self.pending_loopback = Some(j + 1);
                        return Some(self.emit(j));
                    }
                }
                self.pending_loopback = None;
            }
            // Then extend the path depth-first, if it may still spawn lassos.
            if self.path.len() < self.max_prefix + self.max_cycle {
                let pos = self.succ_pos[n];
                if pos < self.k.edges[last].len() {
                    self.succ_pos[n] += 1;
                    self.path.push(self.k.edges[last][pos]);
                    self.succ_pos.push(0);
                    self.pending_loopback = Some(0);
                    continue;
                }
            }
            // Exhausted: backtrack.
            self.path.pop();
            self.succ_pos.pop();
            self.pending_loopback = None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn self_loop() -> KripkeStructure {
        KripkeStructure::parse("state s0 {p}\ninit s0\nedge s0 s0\n").unwrap()
    }

    #[test]
    fn parse_rejects_non_left_total() {
        let err = KripkeStructure::parse("state s0 {p}\nstate s1 {}\ninit s0\nedge s0 s1\n");
        assert!(err.is_err());
        assert!(err.unwrap_err().to_string().contains("left-total"));
    }

    #[test]
    fn parse_roundtrip() {
        let k = KripkeStructure::parse(
            "state s0 {p}\nstate s1 {q}\ninit s0\nedge s0 s1\nedge s1 s0\nedge s1 s1\n",
        )
        .unwrap();
        assert_eq!(KripkeStructure::parse(&k.to_string()).unwrap(), k);
    }

    #[test]
    fn self_loop_lassos_all_denote_the_same_word() {
        let k = self_loop();
        let all: Vec<_> = kripke_lassos(&k, 2, 2).collect();
        assert_eq!(all.len(), 6);
        let p: crate::trace::Letter = [String::from("p")].into_iter().collect();
        for w in &all {
            for i in 0..8 {
                assert_eq!(w.letter(i), &p);
            }
        }
    }

    #[test]
    fn branching_start_yields_distinct_lassos() {
        let k = KripkeStructure::parse(
            "state s0 {}\nstate s1 {p}\nstate s2 {q}\ninit s0\n\
             edge s0 s1\nedge s0 s2\nedge s1 s1\nedge s2 s2\n",
        )
        .unwrap();
        let all: Vec<_> = kripke_lassos(&k, 3, 3).collect();
        let mut words: Vec<String> = all.iter().map(|w| w.to_string()).collect();
        words.sort();
        words.dedup();
        assert!(words.len() >= 2, "{words:?}");
    }

    #[test]
    fn every_emitted_path_is_a_real_path() {
        let k = KripkeStructure::parse(
            "state a {}\nstate b {p}\ninit a\nedge a b\nedge b a\nedge b b\n",
        )
        .unwrap();
        for lp in kripke_lasso_paths(&k, 3, 3) {
            let full: Vec<usize> = lp.prefix.iter().chain(&lp.cycle).copied().collect();
            assert_eq!(full[0], k.init);
            for pair in full.windows(2) {
                assert!(k.edges[pair[0]].contains(&pair[1]));
            }
            let last = *lp.cycle.last().unwrap();
            assert!(k.edges[last].contains(&lp.cycle[0]));
            assert!(!lp.cycle.is_empty());
        }
    }

    #[test]
    fn bounds_are_respected_and_exhaustive() {
        let k = self_loop();
        // max_prefix=1, max_cycle=1: paths [s](loop j=0), [s,s](loop j=1).
        let all: Vec<_> = kripke_lasso_paths(&k, 1, 1).collect();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|lp| lp.cycle.len() == 1 && lp.prefix.len() <= 1));
    }
}
