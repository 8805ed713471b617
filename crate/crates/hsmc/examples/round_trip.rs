//! Parse a lasso trace, run an interval formula through the translation
//! pipeline, and cross-check every stage against the brute-force oracles.
//!
//! ```text
//! cargo run --example round_trip
//! ```

use hsmc::eval::{check_trace_satisfies, check_trace_satisfies_point};
use hsmc::syntax::{Formula, Relation};
use hsmc::trace::LassoTrace;
use hsmc::translate::{dhs_simple_to_schl1, schl1_to_chl2, shl1_to_hs};

fn main() {
    // "p then p∧q" as prefix, then "q, nothing" repeating forever.
    let w: LassoTrace = "u: {p} {p,q}; v: {q} {}".parse().expect("trace syntax");

    // ⟨B̄⟩ q: some proper extension of the current interval is all-q.
    let phi = Formula::hs(Relation::BBar, None, Formula::prop("q"));

    let swapped = dhs_simple_to_schl1(&phi).expect("interval → rebinding sentence");
    let two_var = schl1_to_chl2(&swapped).expect("rebinding → two-variable binders");
    let back = shl1_to_hs(&swapped).expect("rebinding → interval");

    let source = check_trace_satisfies(&w, &phi).expect("interval oracle");
    let point = check_trace_satisfies_point(&w, &swapped).expect("point oracle");
    let binders = check_trace_satisfies_point(&w, &two_var).expect("two-variable oracle");
    let round = check_trace_satisfies(&w, &back).expect("round-trip oracle");

    println!("trace:        {w}");
    println!("source:       {phi}  →  {source}");
    println!("rebinding:    {swapped}  →  {point}");
    println!("two-variable: {two_var}  →  {binders}");
    println!("round trip:   {back}  →  {round}");

    assert_eq!(source, point);
    assert_eq!(source, binders);
    assert_eq!(source, round);
    println!("all stages agree");
}
