//! Ultimately periodic traces (lassos) over `2^AP`, with the textual format
//! `u: {p,q} {} ; v: {q}`.

use std::collections::BTreeSet;
use std::fmt;

/// One position's letter: the set of propositions holding there.
pub type Letter = BTreeSet<String>;

/// The infinite word `u · v^ω`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LassoTrace {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl LassoTrace {
    /// Build a lasso; the cycle must be nonempty.
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        LassoTrace { prefix, cycle }
    }

    /// The letter at position `i` of the infinite word.
    pub fn letter(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Propositions mentioned anywhere in the word.
    pub fn alphabet(&self) -> BTreeSet<String> {
        self.prefix
            .iter()
            .chain(self.cycle.iter())
            .flat_map(|l| l.iter().cloned())
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self, TraceParseError> {
        let (u_part, v_part) = text
            .split_once(';')
            .ok_or_else(|| TraceParseError("expected `u: ... ; v: ...`".into()))?;
        let u_part = u_part.trim();
        let v_part = v_part.trim();
        let u_body = u_part
            .strip_prefix("u:")
            .ok_or_else(|| TraceParseError("prefix part must start with `u:`".into()))?;
        let v_body = v_part
            .strip_prefix("v:")
            .ok_or_else(|| TraceParseError("cycle part must start with `v:`".into()))?;
        let prefix = parse_letters(u_body)?;
        let cycle = parse_letters(v_body)?;
        if cycle.is_empty() {
            return Err(TraceParseError("cycle must contain at least one letter".into()));
        }
        Ok(LassoTrace { prefix, cycle })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("bad trace: {0}")]
pub struct TraceParseError(pub String);

pub(crate) fn parse_letters(body: &str) -> Result<Vec<Letter>, TraceParseError> {
    let mut out = Vec::new();
    let mut rest = body.trim_start();
    while !rest.is_empty() {
        if !rest.starts_with('{') {
            return Err(TraceParseError(format!(
                "expected `{{`, found `{}`",
                rest.chars().next().unwrap()
            )));
        }
        let close = rest
            .find('}')
            .ok_or_else(|| TraceParseError("unterminated letter".into()))?;
        let inner = &rest[1..close];
        out.push(parse_letter_body(inner)?);
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

pub(crate) fn parse_letter_body(inner: &str) -> Result<Letter, TraceParseError> {
    let mut letter = Letter::new();
    for part in inner.split(',') {
        let name = part.trim();
        if name.is_empty() {
            continue;
        }
        if !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$' || c == '#')
        {
            return Err(TraceParseError(format!("bad proposition name `{name}`")));
        }
        letter.insert(name.to_string());
    }
    Ok(letter)
}

pub(crate) fn fmt_letter(l: &Letter, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, p) in l.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{p}")?;
    }
    write!(f, "}}")
}

impl std::str::FromStr for LassoTrace {
    type Err = TraceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LassoTrace::parse(s)
    }
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u:")?;
        for l in &self.prefix {
            write!(f, " ")?;
            fmt_letter(l, f)?;
        }
        write!(f, " ; v:")?;
        for l in &self.cycle {
            write!(f, " ")?;
            fmt_letter(l, f)?;
        }
        Ok(())
    }
}

/// A discrete interval `[lo, hi]` with `lo <= hi`; its length is
/// `hi - lo + 1` (singletons have length 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    // Intervals are never empty: lo <= hi always, so len >= 1.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letter(ps: &[&str]) -> Letter {
        ps.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn parse_roundtrip() {
        let w = LassoTrace::parse("u: {p,q} {} ; v: {q}").unwrap();
        assert_eq!(w.prefix, vec![letter(&["p", "q"]), letter(&[])]);
        assert_eq!(w.cycle, vec![letter(&["q"])]);
        assert_eq!(LassoTrace::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn parse_empty_prefix() {
        let w = LassoTrace::parse("u: ; v: {p}").unwrap();
        assert!(w.prefix.is_empty());
        assert_eq!(LassoTrace::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn cycle_must_be_nonempty() {
        assert!(LassoTrace::parse("u: {p} ; v:").is_err());
    }

    #[test]
    fn letters_fold_into_cycle() {
        let w = LassoTrace::parse("u: {p} ; v: {q} {}").unwrap();
        assert_eq!(w.letter(0), &letter(&["p"]));
        assert_eq!(w.letter(1), &letter(&["q"]));
        assert_eq!(w.letter(2), &letter(&[]));
        assert_eq!(w.letter(3), &letter(&["q"]));
        assert_eq!(w.letter(42), &letter(&[]));
    }

    #[test]
    fn interval_length() {
        assert_eq!(Interval::new(2, 2).len(), 1);
        assert_eq!(Interval::new(2, 5).len(), 4);
    }
}
