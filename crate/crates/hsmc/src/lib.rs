//! Interval temporal logic toolkit: satisfiability and model checking for
//! Halpern–Shoham logic with difference constraints (under homogeneity) and
//! for one-variable constrained hybrid logics, decided through a
//! translation → tableau-atom → two-way-alternating-automaton → Büchi
//! pipeline, cross-validated by a brute-force evaluator over lasso traces.

pub mod automata;
pub mod checker;
pub mod eval;
pub mod kripke;
pub mod reductions;
pub mod syntax;
pub mod tableau;
pub mod trace;
pub mod translate;
